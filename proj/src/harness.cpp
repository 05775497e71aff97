#include "hyperlocal/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "hyperlocal/exploration.hpp"
#include "hyperlocal/gw_sampler.hpp"
#include "hyperlocal/hypergraph.hpp"
#include "hyperlocal/line_graph.hpp"
#include "hyperlocal/random.hpp"

namespace hyperlocal {

// ---- config ----------------------------------------------------------------

bool ExperimentConfig::runs(const std::string& experiment) const {
  return std::find(experiments.begin(), experiments.end(), experiment) != experiments.end();
}

std::vector<GridPoint> ExperimentConfig::grid() const {
  std::vector<GridPoint> out;
  for (int kk : k) {
    for (int rr : r) {
      for (double lam : lambda) {
        for (int nn : n) {
          if (rr < 1 || rr >= kk || kk > nn) continue;
          out.push_back(GridPoint{nn, kk, rr, lam});
        }
      }
    }
  }
  return out;
}

namespace {

const std::set<std::string> kKnownExperiments{"neighborhood", "degree", "tail", "deviation",
                                              "spectral"};

template <typename T>
std::vector<T> nonempty_list(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty()) {
    throw std::invalid_argument(std::string("grid.") + key + " must be a non-empty list");
  }
  return j.at(key).get<std::vector<T>>();
}

template <typename T>
void read_optional(const Json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  static const std::set<std::string> known{
      "grid",         "depth",          "trials",          "gw_trials",     "moment_order",
      "master_seed",  "output_dir",     "experiments",     "degree_samples", "tail_samples",
      "root_cap",     "min_class_count", "dense_cap",      "class_warning_cap", "gates"};
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("unknown config field: " + key);
  }
  if (!j.contains("grid") || !j.contains("master_seed")) {
    throw std::invalid_argument("config needs grid and master_seed");
  }
  ExperimentConfig cfg;
  try {
    const Json& grid = j.at("grid");
    cfg.n = nonempty_list<int>(grid, "n");
    cfg.k = nonempty_list<int>(grid, "k");
    cfg.r = nonempty_list<int>(grid, "r");
    cfg.lambda = nonempty_list<double>(grid, "lambda");
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    read_optional(j, "depth", cfg.depth);
    read_optional(j, "trials", cfg.trials);
    read_optional(j, "gw_trials", cfg.gw_trials);
    read_optional(j, "moment_order", cfg.moment_order);
    read_optional(j, "output_dir", cfg.output_dir);
    read_optional(j, "experiments", cfg.experiments);
    read_optional(j, "degree_samples", cfg.degree_samples);
    read_optional(j, "tail_samples", cfg.tail_samples);
    read_optional(j, "root_cap", cfg.root_cap);
    read_optional(j, "min_class_count", cfg.min_class_count);
    read_optional(j, "dense_cap", cfg.dense_cap);
    read_optional(j, "class_warning_cap", cfg.class_warning_cap);
    if (j.contains("gates")) {
      const Json& g = j.at("gates");
      static const std::set<std::string> gate_keys{"neighborhood_tv_max", "neighborhood_tv_decreasing",
                                                   "deviation_r2_min", "deviation_decreasing"};
      for (const auto& [key, value] : g.items()) {
        if (!gate_keys.count(key)) throw std::invalid_argument("unknown gate: " + key);
      }
      if (g.contains("neighborhood_tv_max")) cfg.gates.neighborhood_tv_max = g.at("neighborhood_tv_max").get<double>();
      if (g.contains("deviation_r2_min")) cfg.gates.deviation_r2_min = g.at("deviation_r2_min").get<double>();
      read_optional(g, "neighborhood_tv_decreasing", cfg.gates.neighborhood_tv_decreasing);
      read_optional(g, "deviation_decreasing", cfg.gates.deviation_decreasing);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  if (cfg.depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (cfg.trials < 1 || cfg.gw_trials < 1) throw std::invalid_argument("trial counts must be >= 1");
  if (cfg.moment_order < 1) throw std::invalid_argument("moment_order must be >= 1");
  if (cfg.root_cap < 1 || cfg.min_class_count < 1) throw std::invalid_argument("caps must be >= 1");
  if (cfg.experiments.empty()) throw std::invalid_argument("experiments must be non-empty");
  for (const auto& e : cfg.experiments) {
    if (!kKnownExperiments.count(e)) throw std::invalid_argument("unknown experiment: " + e);
  }
  if (cfg.runs("degree") && cfg.degree_samples < 10000) {
    throw std::invalid_argument("degree_samples must be >= 10000");
  }
  if (cfg.runs("tail") && cfg.tail_samples < 1000) {
    throw std::invalid_argument("tail_samples must be >= 1000");
  }
  for (double lam : cfg.lambda) {
    if (!(lam >= 0.0) || !std::isfinite(lam)) throw std::invalid_argument("lambda must be >= 0");
  }
  if (cfg.grid().empty()) throw std::invalid_argument("grid has no point with 1 <= r < k <= n");
  for (const auto& p : cfg.grid()) resolve_params(p.n, p.k, p.r, p.lambda);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["grid"] = {{"n", cfg.n}, {"k", cfg.k}, {"r", cfg.r}, {"lambda", cfg.lambda}};
  j["depth"] = cfg.depth;
  j["trials"] = cfg.trials;
  j["gw_trials"] = cfg.gw_trials;
  j["moment_order"] = cfg.moment_order;
  j["master_seed"] = cfg.master_seed;
  j["output_dir"] = cfg.output_dir;
  j["experiments"] = cfg.experiments;
  j["degree_samples"] = cfg.degree_samples;
  j["tail_samples"] = cfg.tail_samples;
  j["root_cap"] = cfg.root_cap;
  j["min_class_count"] = cfg.min_class_count;
  j["dense_cap"] = cfg.dense_cap;
  j["class_warning_cap"] = cfg.class_warning_cap;
  Json gates = Json::object();
  if (cfg.gates.neighborhood_tv_max) gates["neighborhood_tv_max"] = *cfg.gates.neighborhood_tv_max;
  gates["neighborhood_tv_decreasing"] = cfg.gates.neighborhood_tv_decreasing;
  if (cfg.gates.deviation_r2_min) gates["deviation_r2_min"] = *cfg.gates.deviation_r2_min;
  gates["deviation_decreasing"] = cfg.gates.deviation_decreasing;
  j["gates"] = gates;
  return j;
}

// ---- analytic pieces -------------------------------------------------------

double binomial_poisson_tv(std::uint64_t trials, double p, double lambda) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  const long double pl = p;
  const long double ratio = p < 1.0 ? pl / (1.0L - pl) : 0.0L;
  long double b = p < 1.0 ? std::exp(static_cast<long double>(trials) * std::log1p(-pl))
                          : (trials == 0 ? 1.0L : 0.0L);
  long double q = std::exp(-static_cast<long double>(lambda));
  long double diff = 0.0L;
  long double cb = 0.0L;
  long double cq = 0.0L;
  const double mean = std::max(lambda, static_cast<double>(trials) * p);
  const auto horizon = static_cast<std::uint64_t>(mean + 60.0 * std::sqrt(mean + 1.0) + 60.0);
  for (std::uint64_t j = 0;; ++j) {
    if (p == 1.0) b = (j == trials) ? 1.0L : 0.0L;
    diff += std::abs(b - q);
    cb += b;
    cq += q;
    if (j >= horizon) break;
    b = j < trials ? b * static_cast<long double>(trials - j) / static_cast<long double>(j + 1) * ratio
                   : 0.0L;
    q = q * static_cast<long double>(lambda) / static_cast<long double>(j + 1);
  }
  const long double tail = std::max(0.0L, 1.0L - cb) + std::max(0.0L, 1.0L - cq);
  return static_cast<double>(0.5L * (diff + tail));
}

double binomial_upper_tail(std::uint64_t trials, double p, double threshold) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (p == 0.0) return threshold < 0.0 ? 1.0 : 0.0;
  if (p == 1.0) return static_cast<double>(trials) > threshold ? 1.0 : 0.0;
  const long double pl = p;
  const long double ratio = pl / (1.0L - pl);
  long double b = std::exp(static_cast<long double>(trials) * std::log1p(-pl));
  long double below = 0.0L;
  long double above = 0.0L;
  const double mean = static_cast<double>(trials) * p;
  const auto horizon = static_cast<std::uint64_t>(
      std::max(mean, threshold) + 60.0 * std::sqrt(mean + 1.0) + 60.0);
  for (std::uint64_t j = 0; j <= std::min(trials, horizon); ++j) {
    if (static_cast<double>(j) > threshold) {
      above += b;
    } else {
      below += b;
    }
    b = b * static_cast<long double>(trials - j) / static_cast<long double>(j + 1) * ratio;
  }
  // Summing the side of the threshold that carries the smaller mass keeps
  // the relative accuracy of small tails.
  return static_cast<double>(above < 0.5L ? above : 1.0L - below);
}

DecayFit fit_inverse_decay(const std::vector<int>& n, int r, const std::vector<double>& rate) {
  if (n.size() != rate.size() || n.size() < 2) {
    throw std::invalid_argument("decay fit needs at least two matching points");
  }
  double sxy = 0.0;
  double sxx = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = 1.0 / static_cast<double>(n[i] - r);
    sxy += x * rate[i];
    sxx += x * x;
    mean += rate[i];
  }
  mean /= static_cast<double>(n.size());
  DecayFit fit;
  fit.coefficient = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = 1.0 / static_cast<double>(n[i] - r);
    ss_res += (rate[i] - fit.coefficient * x) * (rate[i] - fit.coefficient * x);
    ss_tot += (rate[i] - mean) * (rate[i] - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  fit.strictly_decreasing = true;
  std::vector<std::size_t> order(n.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return n[a] < n[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!(rate[order[i]] < rate[order[i - 1]])) fit.strictly_decreasing = false;
  }
  return fit;
}

// ---- helpers ---------------------------------------------------------------

void parallel_for(std::uint64_t count, std::size_t threads,
                  const std::function<void(std::uint64_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min<std::uint64_t>(threads, count));
  if (threads == 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::uint64_t i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::uint64_t binomial_variate(Engine& engine, std::uint64_t trials, double p) {
  if (p <= 0.0 || trials == 0) return 0;
  if (p >= 1.0) return trials;
  std::uint64_t successes = 0;
  if (p < 0.01) {
    std::uint64_t next = 0;
    while (true) {
      const std::uint64_t skip = geometric_failures(engine, p);
      if (skip >= trials - next) break;
      next += skip + 1;
      ++successes;
      if (next >= trials) break;
    }
    return successes;
  }
  for (std::uint64_t i = 0; i < trials; ++i) successes += bernoulli(engine, p) ? 1 : 0;
  return successes;
}

// Distinct uniform sample of `count` values from [0, universe), sorted
// (Floyd's algorithm).
std::vector<std::uint64_t> sample_without_replacement(Engine& engine, std::uint64_t universe,
                                                      std::uint64_t count) {
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = universe - count; j < universe; ++j) {
    const std::uint64_t t = uniform_below(engine, j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

std::uint64_t lambda_bits(double lambda) { return std::bit_cast<std::uint64_t>(lambda); }

std::string point_label(const GridPoint& p) {
  std::ostringstream out;
  out << "n=" << p.n << " k=" << p.k << " r=" << p.r << " lambda=" << format_double(p.lambda);
  return out.str();
}

double combined_se(double a, double b) { return std::sqrt(a * a + b * b); }

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::tuple<int, std::uint64_t, int, std::uint64_t, std::uint64_t>, NeighborhoodDistribution>&
memory_cache() {
  static std::map<std::tuple<int, std::uint64_t, int, std::uint64_t, std::uint64_t>,
                  NeighborhoodDistribution>
      cache;
  return cache;
}

}  // namespace

// ---- sub-experiments -------------------------------------------------------

NeighborhoodDistribution gw_reference(int d, double lambda, int depth, std::uint64_t samples,
                                      const RunContext& ctx) {
  const auto key = std::make_tuple(d, lambda_bits(lambda), depth, samples, ctx.seed);
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto it = memory_cache().find(key);
    if (it != memory_cache().end()) return it->second;
  }
  std::optional<std::filesystem::path> file;
  if (ctx.cache_dir) {
    std::ostringstream name;
    name << "gw_d" << d << "_l" << std::hex << lambda_bits(lambda) << std::dec << "_t" << depth
         << "_s" << samples << "_seed" << std::hex << ctx.seed << ".json";
    file = *ctx.cache_dir / name.str();
  }
  NeighborhoodDistribution dist;
  dist.depth = static_cast<std::size_t>(depth);
  bool loaded = false;
  if (file && std::filesystem::exists(*file)) {
    try {
      const Json j = Json::parse(read_file(*file));
      NeighborhoodDistribution tmp;
      tmp.depth = dist.depth;
      for (const auto& row : j.at("counts")) {
        const auto count = row.at(1).get<std::uint64_t>();
        tmp.counts[CanonicalForm{row.at(0).get<std::string>()}] += count;
        tmp.total += count;
      }
      if (tmp.total == samples) {
        dist = std::move(tmp);
        loaded = true;
      }
    } catch (const std::exception&) {
      loaded = false;
    }
  }
  if (!loaded) {
    GWParams params;
    params.d = d;
    params.lambda = lambda;
    params.depth = depth;
    std::vector<CanonicalForm> forms(samples);
    parallel_for(samples, ctx.threads, [&](std::uint64_t i) {
      const auto s = sample_gw(params, split_seed(ctx.seed, i));
      forms[i] = s.size() == 1 ? isolated_root_form() : canonicalize(s.tree);
    });
    for (auto& f : forms) ++dist.counts[f];
    dist.total = samples;
    if (file) {
      Json j;
      Json rows = Json::array();
      for (const auto& [form, count] : dist.counts) rows.push_back(Json::array({form.code, count}));
      j["counts"] = std::move(rows);
      try {
        write_file_atomic(*file, j.dump());
      } catch (const std::exception&) {
        // The cache is optional; an unwritable directory only costs time.
      }
    }
  }
  std::lock_guard<std::mutex> lock(cache_mutex());
  memory_cache().emplace(key, dist);
  return dist;
}

NeighborhoodResult neighborhood_tv(const GridPoint& point, const ExperimentConfig& cfg,
                                   const RunContext& ctx) {
  const ModelParams params = resolve_params(point.n, point.k, point.r, point.lambda);
  const std::uint64_t total_rsets =
      binomial_u64(static_cast<std::uint64_t>(point.n), static_cast<std::uint64_t>(point.r));
  NeighborhoodResult out;
  std::vector<std::optional<NeighborhoodDistribution>> per_trial(cfg.trials);
  const std::uint64_t hseed = split_seed(ctx.seed, 0);
  parallel_for(cfg.trials, ctx.threads, [&](std::uint64_t i) {
    try {
      const std::uint64_t seed = split_seed(hseed, i);
      const Hypergraph h = sample_hypergraph(params, seed);
      const LineGraph lg = build_r_line_graph(h, point.r);
      NeighborhoodDistribution dist;
      dist.depth = static_cast<std::size_t>(cfg.depth);
      if (total_rsets <= cfg.root_cap) {
        std::vector<VertexId> roots(lg.graph.materialized_count());
        for (VertexId v = 0; v < roots.size(); ++v) roots[v] = v;
        accumulate_measure(dist, lg.graph, roots, lg.graph.isolated_padding());
      } else {
        Engine engine(split_seed(seed, 1));
        const auto ranks = sample_without_replacement(engine, total_rsets, cfg.root_cap);
        std::vector<VertexId> roots;
        std::uint64_t isolated = 0;
        VertexId id = 0;
        for (std::uint64_t rank : ranks) {
          while (id < lg.labels.size() &&
                 rank_kset(lg.labels[id].members(), point.n) < rank) {
            ++id;
          }
          if (id < lg.labels.size() && rank_kset(lg.labels[id].members(), point.n) == rank) {
            roots.push_back(id);
          } else {
            ++isolated;
          }
        }
        accumulate_measure(dist, lg.graph, roots, isolated);
      }
      per_trial[i] = std::move(dist);
    } catch (const std::exception&) {
      per_trial[i].reset();
    }
  });
  out.hypergraph.depth = static_cast<std::size_t>(cfg.depth);
  for (auto& d : per_trial) {
    if (d) {
      merge_into(out.hypergraph, *d);
    } else {
      ++out.failed_trials;
    }
  }
  RunContext gw_ctx = ctx;
  gw_ctx.seed = ctx.reference_seed ? *ctx.reference_seed : split_seed(ctx.seed, 1);
  const int d = block_size_for(point.k, point.r);
  out.reference = gw_reference(d, point.lambda, cfg.depth, cfg.gw_trials, gw_ctx);
  out.roots = out.hypergraph.total;
  out.gw_samples = out.reference.total;
  out.classes_hypergraph = out.hypergraph.counts.size();
  out.classes_gw = out.reference.counts.size();
  out.diversity_warning =
      out.classes_hypergraph > cfg.class_warning_cap || out.classes_gw > cfg.class_warning_cap;
  if (out.hypergraph.total > 0) {
    out.tv = total_variation(out.hypergraph, out.reference, cfg.min_class_count);
    double var = 0.0;
    const double na = static_cast<double>(out.hypergraph.total);
    const double nb = static_cast<double>(out.reference.total);
    std::set<CanonicalForm> classes;
    for (const auto& [f, c] : out.hypergraph.counts) classes.insert(f);
    for (const auto& [f, c] : out.reference.counts) classes.insert(f);
    for (const auto& f : classes) {
      const double pa = out.hypergraph.frequency(f);
      const double pb = out.reference.frequency(f);
      var += 0.25 * (pa * (1.0 - pa) / na + pb * (1.0 - pb) / nb);
    }
    out.tv_se = std::sqrt(var);
  }
  return out;
}

DegreeResult degree_poisson_tv(const GridPoint& point, std::uint64_t samples, const RunContext& ctx) {
  const ModelParams params = resolve_params(point.n, point.k, point.r, point.lambda);
  const std::uint64_t trials = binomial_u64(static_cast<std::uint64_t>(point.n - point.r),
                                            static_cast<std::uint64_t>(point.k - point.r));
  DegreeResult out;
  out.samples = samples;
  out.exact_tv = binomial_poisson_tv(trials, params.p, point.lambda);
  out.bound = point.lambda / static_cast<double>(trials);
  out.violation = out.exact_tv > out.bound;

  std::vector<std::uint64_t> draws(samples);
  parallel_for(samples, ctx.threads, [&](std::uint64_t i) {
    Engine engine(split_seed(ctx.seed, i));
    draws[i] = binomial_variate(engine, trials, params.p);
  });
  std::map<std::uint64_t, std::uint64_t> hist;
  for (auto x : draws) ++hist[x];
  long double diff = 0.0L;
  long double covered = 0.0L;
  long double q = std::exp(-static_cast<long double>(point.lambda));
  const std::uint64_t top = hist.empty() ? 0 : hist.rbegin()->first;
  for (std::uint64_t j = 0; j <= top; ++j) {
    auto it = hist.find(j);
    const long double emp = it == hist.end() ? 0.0L : static_cast<long double>(it->second) / samples;
    diff += std::abs(emp - q);
    covered += q;
    q = q * static_cast<long double>(point.lambda) / static_cast<long double>(j + 1);
  }
  diff += std::max(0.0L, 1.0L - covered);
  out.empirical_tv = static_cast<double>(0.5L * diff);
  return out;
}

TailResult hyperedge_tail(const GridPoint& point, std::uint64_t samples, const RunContext& ctx) {
  const ModelParams params = resolve_params(point.n, point.k, point.r, point.lambda);
  const auto n = static_cast<std::uint64_t>(point.n);
  const auto k = static_cast<std::uint64_t>(point.k);
  // Vertex-level expected degree; equals lambda when r = 1.
  const double lambda1 = params.p * to_double(binomial(n - 1, k - 1));
  TailResult out;
  out.samples = samples;
  out.threshold = 3.0 * static_cast<double>(point.n) * lambda1 / (2.0 * static_cast<double>(point.k));
  out.bound = std::exp(-lambda1 * static_cast<double>(point.n) / (6.0 * static_cast<double>(point.k)));
  out.exact = binomial_upper_tail(binomial_u64(n, k), params.p, out.threshold);
  std::vector<int> hit(samples, -1);
  parallel_for(samples, ctx.threads, [&](std::uint64_t i) {
    try {
      const Hypergraph h = sample_hypergraph(params, split_seed(ctx.seed, i));
      hit[i] = static_cast<double>(h.edge_count()) > out.threshold ? 1 : 0;
    } catch (const std::exception&) {
      hit[i] = -1;
    }
  });
  std::uint64_t hits = 0;
  std::uint64_t ok = 0;
  for (int x : hit) {
    if (x < 0) {
      ++out.failed_trials;
    } else {
      ++ok;
      hits += static_cast<std::uint64_t>(x);
    }
  }
  if (ok > 0) {
    out.empirical = static_cast<double>(hits) / static_cast<double>(ok);
    out.standard_error = std::sqrt(out.empirical * (1.0 - out.empirical) / static_cast<double>(ok));
  }
  out.violation = out.empirical > out.bound + 3.0 * out.standard_error;
  return out;
}

DeviationResult deviation_rate(const GridPoint& point, int depth, std::uint64_t trials,
                               const RunContext& ctx) {
  const ModelParams params = resolve_params(point.n, point.k, point.r, point.lambda);
  std::vector<Vertex> members(static_cast<std::size_t>(point.r));
  for (int i = 0; i < point.r; ++i) members[static_cast<std::size_t>(i)] = i + 1;
  const RSet root(members);
  // -1 failed, else bit mask: 1 any, 2 Y != Z, 4 escape, 8 overlap.
  std::vector<int> flags(trials, -1);
  parallel_for(trials, ctx.threads, [&](std::uint64_t i) {
    try {
      const Hypergraph h = sample_hypergraph(params, split_seed(ctx.seed, i));
      ExploreOptions opts;
      opts.max_steps = static_cast<std::size_t>(depth);
      const auto trace = explore(h, root, opts);
      const auto report = detect_deviations(trace, point.r, static_cast<std::size_t>(depth));
      flags[i] = (report.any() ? 1 : 0) | (report.y_neq_z.occurred ? 2 : 0) |
                 (report.edge_escapes.occurred ? 4 : 0) | (report.edge_overlap.occurred ? 8 : 0);
    } catch (const std::exception&) {
      flags[i] = -1;
    }
  });
  DeviationResult out;
  std::uint64_t counts[4] = {0, 0, 0, 0};
  for (int f : flags) {
    if (f < 0) {
      ++out.failed_trials;
      continue;
    }
    ++out.trials;
    for (int b = 0; b < 4; ++b) counts[b] += (f >> b) & 1;
  }
  if (out.trials > 0) {
    const double t = static_cast<double>(out.trials);
    out.rate = static_cast<double>(counts[0]) / t;
    out.y_neq_z = static_cast<double>(counts[1]) / t;
    out.edge_escapes = static_cast<double>(counts[2]) / t;
    out.edge_overlap = static_cast<double>(counts[3]) / t;
    out.standard_error = std::sqrt(out.rate * (1.0 - out.rate) / t);
  }
  return out;
}

SpectralResult spectral_compare(const GridPoint& point, const ExperimentConfig& cfg,
                                const RunContext& ctx) {
  const ModelParams params = resolve_params(point.n, point.k, point.r, point.lambda);
  const std::uint64_t dim =
      binomial_u64(static_cast<std::uint64_t>(point.n), static_cast<std::uint64_t>(point.r));
  const auto K = static_cast<std::size_t>(cfg.moment_order);
  struct Trial {
    bool ok = false;
    bool dense = false;
    std::vector<double> moments;
    double frobenius_gap = 0.0;
  };
  std::vector<Trial> trials(cfg.trials);
  const std::uint64_t hseed = split_seed(ctx.seed, 0);
  parallel_for(cfg.trials, ctx.threads, [&](std::uint64_t i) {
    Trial t;
    try {
      const Hypergraph h = sample_hypergraph(params, split_seed(hseed, i));
      const LineGraph lg = build_r_line_graph(h, point.r);
      if (lg.graph.materialized_count() <= cfg.dense_cap) {
        const auto sample = eigenvalues(adjacency_matrix(lg.graph, dim, cfg.dense_cap));
        t.moments = esd_moments(sample, cfg.moment_order).moments;
        t.moments[0] = 0.0;  // tr(A) / N, exactly zero without self-loops
        t.dense = true;
        if (K >= 2) t.frobenius_gap = std::abs(t.moments[1] - frobenius_second_moment(lg.graph, dim));
      } else {
        t.moments = closed_walk_moments(lg.graph, dim, cfg.moment_order).moments;
      }
      t.ok = true;
    } catch (const std::exception&) {
      t.ok = false;
    }
    trials[i] = std::move(t);
  });
  SpectralResult out;
  bool any_dense = false;
  bool any_walks = false;
  std::vector<long double> sum(K, 0.0L), sq(K, 0.0L);
  for (const auto& t : trials) {
    if (!t.ok) {
      ++out.failed_trials;
      continue;
    }
    ++out.trials;
    (t.dense ? any_dense : any_walks) = true;
    out.frobenius_max_discrepancy = std::max(out.frobenius_max_discrepancy, t.frobenius_gap);
    for (std::size_t k = 0; k < K; ++k) {
      sum[k] += t.moments[k];
      sq[k] += static_cast<long double>(t.moments[k]) * t.moments[k];
    }
  }
  out.mode = any_dense && any_walks ? "mixed" : (any_walks ? "walks" : "dense");
  const int d = block_size_for(point.k, point.r);
  const MomentVector gw =
      gw_root_moments(d, point.lambda, cfg.moment_order, cfg.gw_trials, split_seed(ctx.seed, 1), ctx.threads);
  for (std::size_t k = 0; k < K; ++k) {
    MomentRow row;
    row.k = static_cast<int>(k + 1);
    if (out.trials > 0) {
      const long double m = sum[k] / out.trials;
      row.esd = static_cast<double>(m);
      if (out.trials > 1) {
        const long double var = std::max(0.0L, (sq[k] - out.trials * m * m) / (out.trials - 1));
        row.esd_se = static_cast<double>(std::sqrt(var / out.trials));
      }
    }
    row.gw = gw.moments[k];
    row.gw_se = gw.standard_errors[k];
    row.gap = row.esd - row.gw;
    row.relative_gap = row.gw != 0.0 ? row.gap / std::abs(row.gw) : 0.0;
    row.within_3se = std::abs(row.gap) <= 3.0 * combined_se(row.esd_se, row.gw_se);
    out.rows.push_back(row);
  }
  return out;
}

// ---- full run --------------------------------------------------------------

namespace {

// Experiment ids used in seed derivation.
enum : std::uint64_t { kSeedNeighborhood = 1, kSeedDegree, kSeedTail, kSeedDeviation, kSeedSpectral };

std::uint64_t experiment_seed(std::uint64_t master, std::uint64_t point_index, std::uint64_t id) {
  return split_seed(split_seed(master, point_index), id);
}

// Shared by every n of a (d, lambda, depth) family so that TV values along n
// are measured against the same reference sample.
std::uint64_t reference_seed(std::uint64_t master, int d, double lambda, int depth) {
  std::uint64_t s = split_seed(master, 0x5245464552454e43ULL);
  s = split_seed(s, static_cast<std::uint64_t>(d));
  s = split_seed(s, lambda_bits(lambda));
  return split_seed(s, static_cast<std::uint64_t>(depth));
}

struct GroupKey {
  int k;
  int r;
  std::uint64_t lambda;
  auto operator<=>(const GroupKey&) const = default;
};

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
  const auto start = std::chrono::steady_clock::now();
  RunContext base;
  base.threads = std::max<std::size_t>(1, threads);
  if (const char* dir = std::getenv("HYPERLOCAL_CACHE_DIR"); dir != nullptr && *dir != '\0') {
    base.cache_dir = std::filesystem::path(dir);
  }
  RunResult result;
  Json report;
  report["config"] = config_to_json(cfg);
  report["config"].erase("output_dir");
  Json points = Json::array();
  const auto grid = cfg.grid();
  std::map<GroupKey, std::vector<std::pair<int, double>>> tv_groups;
  std::map<GroupKey, std::vector<std::pair<int, double>>> deviation_groups;

  auto violate = [&](Json& where, const std::string& message) {
    where["violations"].push_back(message);
    result.violations.push_back(message);
  };

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const GridPoint& pt = grid[gi];
    const ModelParams params = resolve_params(pt.n, pt.k, pt.r, pt.lambda);
    const GroupKey group{pt.k, pt.r, lambda_bits(pt.lambda)};
    Json rec;
    rec["n"] = pt.n;
    rec["k"] = pt.k;
    rec["r"] = pt.r;
    rec["lambda"] = pt.lambda;
    rec["p"] = params.p;
    rec["d"] = block_size_for(pt.k, pt.r);
    rec["violations"] = Json::array();
    bool degraded = false;
    auto check_failures = [&](std::uint64_t failed, std::uint64_t total) {
      if (total > 0 && static_cast<double>(failed) > 0.01 * static_cast<double>(total)) degraded = true;
    };
    RunContext ctx = base;

    if (cfg.runs("neighborhood")) {
      ctx.seed = experiment_seed(cfg.master_seed, gi, kSeedNeighborhood);
      ctx.reference_seed =
          reference_seed(cfg.master_seed, block_size_for(pt.k, pt.r), pt.lambda, cfg.depth);
      const auto nb = neighborhood_tv(pt, cfg, ctx);
      ctx.reference_seed.reset();
      Json j;
      j["tv"] = nb.tv;
      j["tv_se"] = nb.tv_se;
      j["roots"] = nb.roots;
      j["gw_samples"] = nb.gw_samples;
      j["classes_hypergraph"] = nb.classes_hypergraph;
      j["classes_gw"] = nb.classes_gw;
      j["diversity_warning"] = nb.diversity_warning;
      j["failed_trials"] = nb.failed_trials;
      rec["neighborhood"] = j;
      check_failures(nb.failed_trials, cfg.trials);
      tv_groups[group].emplace_back(pt.n, nb.tv);
      if (cfg.gates.neighborhood_tv_max && !(nb.tv <= *cfg.gates.neighborhood_tv_max)) {
        violate(rec, point_label(pt) + ": neighborhood TV " + format_double(nb.tv) +
                         " exceeds gate " + format_double(*cfg.gates.neighborhood_tv_max));
      }
    }
    if (cfg.runs("degree")) {
      ctx.seed = experiment_seed(cfg.master_seed, gi, kSeedDegree);
      const auto dg = degree_poisson_tv(pt, cfg.degree_samples, ctx);
      Json j;
      j["exact_tv"] = dg.exact_tv;
      j["bound"] = dg.bound;
      j["empirical_tv"] = dg.empirical_tv;
      j["samples"] = dg.samples;
      j["violation"] = dg.violation;
      rec["degree"] = j;
      if (dg.violation) violate(rec, point_label(pt) + ": degree TV exceeds its bound");
    }
    if (cfg.runs("tail")) {
      ctx.seed = experiment_seed(cfg.master_seed, gi, kSeedTail);
      const auto tl = hyperedge_tail(pt, cfg.tail_samples, ctx);
      Json j;
      j["empirical"] = tl.empirical;
      j["standard_error"] = tl.standard_error;
      j["bound"] = tl.bound;
      j["threshold"] = tl.threshold;
      j["exact"] = tl.exact;
      j["samples"] = tl.samples;
      j["failed_trials"] = tl.failed_trials;
      j["violation"] = tl.violation;
      rec["tail"] = j;
      check_failures(tl.failed_trials, tl.samples);
      if (tl.violation) violate(rec, point_label(pt) + ": hyperedge tail exceeds bound + 3 SE");
    }
    if (cfg.runs("deviation")) {
      ctx.seed = experiment_seed(cfg.master_seed, gi, kSeedDeviation);
      const auto dv = deviation_rate(pt, cfg.depth, cfg.trials, ctx);
      Json j;
      j["rate"] = dv.rate;
      j["standard_error"] = dv.standard_error;
      j["y_neq_z"] = dv.y_neq_z;
      j["edge_escapes"] = dv.edge_escapes;
      j["edge_overlap"] = dv.edge_overlap;
      j["trials"] = dv.trials;
      j["failed_trials"] = dv.failed_trials;
      rec["deviation"] = j;
      check_failures(dv.failed_trials, cfg.trials);
      deviation_groups[group].emplace_back(pt.n, dv.rate);
    }
    if (cfg.runs("spectral")) {
      ctx.seed = experiment_seed(cfg.master_seed, gi, kSeedSpectral);
      const auto sp = spectral_compare(pt, cfg, ctx);
      Json j;
      j["mode"] = sp.mode;
      j["trials"] = sp.trials;
      j["failed_trials"] = sp.failed_trials;
      j["frobenius_max_discrepancy"] = sp.frobenius_max_discrepancy;
      Json rows = Json::array();
      for (const auto& row : sp.rows) {
        Json rj;
        rj["k"] = row.k;
        rj["esd"] = row.esd;
        rj["esd_se"] = row.esd_se;
        rj["gw"] = row.gw;
        rj["gw_se"] = row.gw_se;
        rj["gap"] = row.gap;
        rj["relative_gap"] = row.relative_gap;
        rj["within_3se"] = row.within_3se;
        rows.push_back(rj);
      }
      j["moments"] = rows;
      rec["spectral"] = j;
      check_failures(sp.failed_trials, cfg.trials);
    }
    rec["degraded"] = degraded;
    points.push_back(rec);
  }
  report["points"] = points;

  Json families = Json::array();
  std::set<GroupKey> keys;
  for (const auto& [key, v] : tv_groups) keys.insert(key);
  for (const auto& [key, v] : deviation_groups) keys.insert(key);
  for (const auto& key : keys) {
    Json fam;
    fam["k"] = key.k;
    fam["r"] = key.r;
    fam["lambda"] = std::bit_cast<double>(key.lambda);
    fam["violations"] = Json::array();
    const std::string label = "k=" + std::to_string(key.k) + " r=" + std::to_string(key.r) +
                              " lambda=" + format_double(std::bit_cast<double>(key.lambda));
    if (auto it = tv_groups.find(key); it != tv_groups.end() && it->second.size() >= 2) {
      auto series = it->second;
      std::sort(series.begin(), series.end());
      bool decreasing = true;
      for (std::size_t i = 1; i < series.size(); ++i) {
        if (!(series[i].second < series[i - 1].second)) decreasing = false;
      }
      fam["neighborhood_tv_decreasing"] = decreasing;
      if (cfg.gates.neighborhood_tv_decreasing && !decreasing) {
        violate(fam, label + ": neighborhood TV not strictly decreasing in n");
      }
    }
    if (auto it = deviation_groups.find(key); it != deviation_groups.end() && it->second.size() >= 2) {
      std::vector<int> ns;
      std::vector<double> rates;
      for (const auto& [n, rate] : it->second) {
        ns.push_back(n);
        rates.push_back(rate);
      }
      const auto fit = fit_inverse_decay(ns, key.r, rates);
      Json fj;
      fj["n"] = ns;
      fj["rate"] = rates;
      fj["coefficient"] = fit.coefficient;
      fj["r_squared"] = fit.r_squared;
      fj["strictly_decreasing"] = fit.strictly_decreasing;
      fam["deviation_decay"] = fj;
      if (cfg.gates.deviation_decreasing && !fit.strictly_decreasing) {
        violate(fam, label + ": deviation rate not strictly decreasing in n");
      }
      if (cfg.gates.deviation_r2_min && !(fit.r_squared >= *cfg.gates.deviation_r2_min)) {
        violate(fam, label + ": deviation decay fit R^2 " + format_double(fit.r_squared) +
                         " below gate " + format_double(*cfg.gates.deviation_r2_min));
      }
    }
    families.push_back(fam);
  }
  report["families"] = families;
  report["violations"] = result.violations;
  report["ok"] = result.violations.empty();
  result.violation = !result.violations.empty();
  result.report = std::move(report);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

std::string points_csv(const Json& report, const char* section, const std::vector<std::string>& fields) {
  std::ostringstream out;
  out << "n,k,r,lambda";
  for (const auto& f : fields) out << ',' << f;
  out << '\n';
  for (const auto& p : report.at("points")) {
    if (!p.contains(section)) continue;
    out << p.at("n").get<int>() << ',' << p.at("k").get<int>() << ',' << p.at("r").get<int>() << ','
        << format_double(p.at("lambda").get<double>());
    const Json& s = p.at(section);
    for (const auto& f : fields) {
      const Json& v = s.at(f);
      out << ',';
      if (v.is_boolean()) {
        out << (v.get<bool>() ? 1 : 0);
      } else if (v.is_number_float()) {
        out << format_double(v.get<double>());
      } else {
        out << v.dump();
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string spectral_csv(const Json& report) {
  std::ostringstream out;
  out << "n,k,r,lambda,moment,esd,esd_se,gw,gw_se,gap,relative_gap,within_3se\n";
  for (const auto& p : report.at("points")) {
    if (!p.contains("spectral")) continue;
    for (const auto& row : p.at("spectral").at("moments")) {
      out << p.at("n").get<int>() << ',' << p.at("k").get<int>() << ',' << p.at("r").get<int>()
          << ',' << format_double(p.at("lambda").get<double>()) << ',' << row.at("k").get<int>();
      for (const char* f : {"esd", "esd_se", "gw", "gw_se", "gap", "relative_gap"}) {
        out << ',' << format_double(row.at(f).get<double>());
      }
      out << ',' << (row.at("within_3se").get<bool>() ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

}  // namespace

RunResult run_and_write(const ExperimentConfig& cfg, std::size_t threads) {
  RunResult result = run_experiment(cfg, threads);
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.json", result.report.dump(2) + "\n");
  const Json& rep = result.report;
  if (cfg.runs("neighborhood")) {
    write_file_atomic(dir / "neighborhood.csv",
                      points_csv(rep, "neighborhood",
                                 {"tv", "tv_se", "roots", "gw_samples", "classes_hypergraph",
                                  "classes_gw", "failed_trials"}));
  }
  if (cfg.runs("degree")) {
    write_file_atomic(dir / "degree.csv",
                      points_csv(rep, "degree", {"exact_tv", "bound", "empirical_tv", "samples", "violation"}));
  }
  if (cfg.runs("tail")) {
    write_file_atomic(dir / "tail.csv",
                      points_csv(rep, "tail", {"empirical", "standard_error", "bound", "threshold",
                                               "exact", "samples", "violation"}));
  }
  if (cfg.runs("deviation")) {
    write_file_atomic(dir / "deviation.csv",
                      points_csv(rep, "deviation", {"rate", "standard_error", "y_neq_z",
                                                    "edge_escapes", "edge_overlap", "trials"}));
  }
  if (cfg.runs("spectral")) write_file_atomic(dir / "spectral.csv", spectral_csv(rep));
  Json timing;
  timing["wall_seconds"] = result.wall_seconds;
  timing["threads"] = threads;
  write_file_atomic(dir / "timing.json", timing.dump(2) + "\n");
  return result;
}

}  // namespace hyperlocal
