// Command-line front end for the hyperlocal library.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid flags or arguments,
// 3 a bound or gate violation reported by `converge`.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hyperlocal/exploration.hpp"
#include "hyperlocal/gw_sampler.hpp"
#include "hyperlocal/harness.hpp"
#include "hyperlocal/hypergraph.hpp"
#include "hyperlocal/io.hpp"
#include "hyperlocal/line_graph.hpp"
#include "hyperlocal/spectra.hpp"

namespace hl = hyperlocal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitViolation = 3;

// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ModelFlags {
  int n = 0;
  int k = 0;
  int r = 1;
  double p = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  CLI::Option* n_opt = nullptr;
  CLI::Option* p_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* r_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void add_to(CLI::App* app, bool required) {
    n_opt = app->add_option("--n", n, "number of vertices")->check(CLI::PositiveNumber);
    auto* k_opt = app->add_option("--k", k, "hyperedge size")->check(CLI::PositiveNumber);
    r_opt = app->add_option("--r", r, "root r-set size (default 1)")->check(CLI::PositiveNumber);
    p_opt = app->add_option("--p", p, "hyperedge probability");
    lambda_opt = app->add_option("--lambda", lambda, "expected r-set degree; p = lambda / C(n-r, k-r)");
    p_opt->excludes(lambda_opt);
    seed_opt = app->add_option("--seed", seed, "random seed");
    if (required) {
      n_opt->required();
      k_opt->required();
      seed_opt->required();
    }
  }

  bool given() const { return n_opt->count() > 0; }

  hl::ModelParams resolve() const {
    if (p_opt->count() == 0 && lambda_opt->count() == 0) {
      throw UsageError("exactly one of --p or --lambda is required");
    }
    if (seed_opt->count() == 0) throw UsageError("--seed is required for sampling");
    if (lambda_opt->count() > 0) return hl::resolve_params(n, k, r, lambda);
    auto params = hl::params_from_probability(n, k, p, r);
    return params;
  }
};

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    hl::write_file_atomic(path, content);
  }
}

std::vector<hl::Vertex> parse_rset(const std::string& text) {
  std::vector<hl::Vertex> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--root must be a comma-separated list of vertices, got '" + text + "'");
    }
  }
  return out;
}

hl::Hypergraph load_or_sample(const std::string& in_path, const ModelFlags& model) {
  if (!in_path.empty()) {
    if (model.given()) throw UsageError("--in cannot be combined with sampling flags");
    return hl::hypergraph_from_json(hl::Json::parse(hl::read_file(in_path)));
  }
  if (!model.given()) throw UsageError("either --in or --n/--k/--p|--lambda/--seed is required");
  return hl::sample_hypergraph(model.resolve(), model.seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse random hypergraphs, r-set line graphs and their local limits"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "sample H(n, k, p) and write it as JSON");
  ModelFlags sample_model;
  sample_model.add_to(sample, true);
  std::string sample_out;
  sample->add_option("--out", sample_out, "output file (default: standard output)");

  // linegraph
  auto* linegraph = app.add_subcommand("linegraph", "build the r-set weighted line graph");
  std::string lg_in;
  std::string lg_out;
  ModelFlags lg_model;
  linegraph->add_option("--in", lg_in, "hypergraph JSON (otherwise sample from the model flags)");
  lg_model.add_to(linegraph, false);
  linegraph->add_option("--out", lg_out, "output file (default: standard output)");

  // explore
  auto* explore = app.add_subcommand("explore", "run the breadth-first exploration process");
  std::string ex_in;
  std::string ex_out;
  std::string ex_root;
  int ex_depth = 0;
  ModelFlags ex_model;
  explore->add_option("--in", ex_in, "hypergraph JSON (otherwise sample from the model flags)");
  ex_model.add_to(explore, false);
  explore->add_option("--root", ex_root, "root r-set, e.g. 1,2 (default 1..r)");
  explore->add_option("--depth", ex_depth, "number of exploration steps scanned for deviations (0 = all)")
      ->check(CLI::NonNegativeNumber);
  explore->add_option("--out", ex_out, "trace CSV (default: standard output)");

  // gw
  auto* gw = app.add_subcommand("gw", "sample a d-block Galton-Watson graph or its root moments");
  int gw_k = 0;
  int gw_r = 1;
  double gw_lambda = 0.0;
  int gw_depth = 0;
  std::uint64_t gw_seed = 0;
  std::uint64_t gw_trials = 0;
  int gw_order = 8;
  int gw_threads = 1;
  std::string gw_out;
  std::string gw_hypertree_out;
  gw->add_option("--k", gw_k, "hyperedge size")->required()->check(CLI::PositiveNumber);
  gw->add_option("--r", gw_r, "root r-set size; d = C(k, r) - 1")->check(CLI::PositiveNumber);
  gw->add_option("--lambda", gw_lambda, "Poisson rate of block offspring")->required();
  gw->add_option("--depth", gw_depth, "block generations to sample")->check(CLI::NonNegativeNumber);
  gw->add_option("--seed", gw_seed, "random seed")->required();
  gw->add_option("--gw-trials", gw_trials,
                 "when positive, estimate root closed-walk moments over this many samples instead");
  gw->add_option("--moment-order", gw_order, "highest moment K")->check(CLI::PositiveNumber);
  gw->add_option("--threads", gw_threads, "worker threads")->check(CLI::PositiveNumber);
  gw->add_option("--out", gw_out, "output JSON (default: standard output)");
  gw->add_option("--hypertree-out", gw_hypertree_out, "also write the corresponding hypertree JSON");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and moments of the r-set adjacency matrix");
  std::string sp_in;
  std::string sp_out;
  std::string sp_moments_out;
  std::string sp_hist_out;
  int sp_order = 8;
  std::size_t sp_bins = 50;
  ModelFlags sp_model;
  spectrum->add_option("--in", sp_in, "hypergraph JSON (otherwise sample from the model flags)");
  sp_model.add_to(spectrum, false);
  spectrum->add_option("--moment-order", sp_order, "highest moment K")->check(CLI::PositiveNumber);
  spectrum->add_option("--out", sp_out, "eigenvalue CSV (default: standard output)");
  spectrum->add_option("--moments-out", sp_moments_out, "moments JSON");
  spectrum->add_option("--hist-out", sp_hist_out, "histogram CSV");
  spectrum->add_option("--bins", sp_bins, "histogram bins")->check(CLI::PositiveNumber);

  // converge
  auto* converge = app.add_subcommand("converge", "run the convergence experiments of a config");
  std::string cv_config;
  std::string cv_out;
  int cv_threads = 1;
  std::optional<std::uint64_t> cv_seed;
  std::optional<std::uint64_t> cv_trials;
  std::optional<std::uint64_t> cv_gw_trials;
  std::optional<int> cv_depth;
  std::optional<int> cv_order;
  converge->add_option("--config", cv_config, "experiment config JSON")->required()->check(CLI::ExistingFile);
  converge->add_option("--out", cv_out, "output directory (overrides output_dir)");
  converge->add_option("--threads", cv_threads, "worker threads; never changes the results")
      ->check(CLI::PositiveNumber);
  converge->add_option("--seed", cv_seed, "override master_seed");
  converge->add_option("--trials", cv_trials, "override trials");
  converge->add_option("--gw-trials", cv_gw_trials, "override gw_trials");
  converge->add_option("--depth", cv_depth, "override depth");
  converge->add_option("--moment-order", cv_order, "override moment_order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sample) {
      const auto params = sample_model.resolve();
      const auto h = hl::sample_hypergraph(params, sample_model.seed);
      write_or_print(sample_out, hl::hypergraph_to_json(h).dump() + "\n");
      const auto trials = hl::binomial(static_cast<std::uint64_t>(params.n - params.r),
                                       static_cast<std::uint64_t>(params.k - params.r));
      std::ostream& info = (sample_out.empty() || sample_out == "-") ? std::cerr : std::cout;
      info << "edges " << h.edge_count() << "\n";
      info << "p " << hl::format_double(params.p);
      if (sample_model.lambda_opt->count() > 0) {
        info << " = " << hl::format_double(params.lambda) << "/" << hl::to_string(trials);
      }
      info << "\n";
    } else if (*linegraph) {
      const auto h = load_or_sample(lg_in, lg_model);
      const auto lg = hl::build_r_line_graph(h, lg_model.r);
      write_or_print(lg_out, hl::line_graph_to_json(lg).dump() + "\n");
    } else if (*explore) {
      const auto h = load_or_sample(ex_in, ex_model);
      std::vector<hl::Vertex> members;
      if (ex_root.empty()) {
        for (int i = 1; i <= ex_model.r; ++i) members.push_back(i);
      } else {
        members = parse_rset(ex_root);
      }
      const hl::RSet root(members);
      const auto trace = hl::explore(h, root);
      const std::size_t depth = ex_depth == 0 ? trace.steps.size() : static_cast<std::size_t>(ex_depth);
      const auto report = hl::detect_deviations(trace, static_cast<int>(root.size()), depth);
      write_or_print(ex_out, hl::trace_to_csv(trace));
      auto event = [](const hl::DeviationEvent& e) {
        return e.occurred ? "step " + std::to_string(*e.first_step) : std::string("none");
      };
      std::ostream& info = (ex_out.empty() || ex_out == "-") ? std::cerr : std::cout;
      info << "steps " << trace.steps.size() << "\n";
      info << "y_neq_z " << event(report.y_neq_z) << "\n";
      info << "edge_escapes " << event(report.edge_escapes) << "\n";
      info << "edge_overlap " << event(report.edge_overlap) << "\n";
    } else if (*gw) {
      const int d = hl::block_size_for(gw_k, gw_r);
      if (gw_trials > 0) {
        const auto m = hl::gw_root_moments(d, gw_lambda, gw_order, gw_trials, gw_seed,
                                           static_cast<std::size_t>(gw_threads));
        write_or_print(gw_out, hl::moments_json(m));
      } else {
        hl::GWParams params;
        params.d = d;
        params.lambda = gw_lambda;
        params.depth = gw_depth;
        const auto s = hl::sample_gw(params, gw_seed);
        write_or_print(gw_out, hl::block_tree_to_json(s).dump() + "\n");
        if (!gw_hypertree_out.empty()) {
          const auto t = hl::gw_to_hypertree(s, gw_k, gw_r);
          hl::Json j = hl::hypergraph_to_json(t.hypergraph);
          j["root"] = std::vector<hl::Vertex>(t.root.members().begin(), t.root.members().end());
          hl::write_file_atomic(gw_hypertree_out, j.dump() + "\n");
        }
      }
    } else if (*spectrum) {
      const auto h = load_or_sample(sp_in, sp_model);
      const auto lg = hl::build_r_line_graph(h, sp_model.r);
      const auto sample = hl::eigenvalues(hl::adjacency_matrix(lg.graph, lg.vertex_count()));
      write_or_print(sp_out, hl::eigenvalues_csv(sample));
      const auto moments = hl::esd_moments(sample, sp_order);
      if (!sp_moments_out.empty()) hl::write_file_atomic(sp_moments_out, hl::moments_json(moments));
      if (!sp_hist_out.empty()) {
        double lo = sample.eigenvalues.empty() ? -1.0 : sample.eigenvalues.front();
        double hi = sample.eigenvalues.empty() ? 1.0 : sample.eigenvalues.back();
        if (!(hi > lo)) {
          lo -= 0.5;
          hi += 0.5;
        }
        hl::write_file_atomic(sp_hist_out, hl::histogram_csv(hl::histogram(sample, sp_bins, lo, hi)));
      }
    } else if (*converge) {
      auto cfg = hl::load_config(cv_config);
      if (!cv_out.empty()) cfg.output_dir = cv_out;
      if (cv_seed) cfg.master_seed = *cv_seed;
      if (cv_trials) cfg.trials = *cv_trials;
      if (cv_gw_trials) cfg.gw_trials = *cv_gw_trials;
      if (cv_depth) cfg.depth = *cv_depth;
      if (cv_order) cfg.moment_order = *cv_order;
      cfg = hl::config_from_json(hl::config_to_json(cfg));
      const auto result = hl::run_and_write(cfg, static_cast<std::size_t>(cv_threads));
      std::cout << "report " << (std::filesystem::path(cfg.output_dir) / "report.json").string() << "\n";
      for (const auto& v : result.violations) std::cout << "violation: " << v << "\n";
      if (result.violation) return kExitViolation;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
