// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <sys/wait.h>

#include "hyperlocal/combinatorics.hpp"
#include "hyperlocal/exploration.hpp"
#include "hyperlocal/gw_sampler.hpp"
#include "hyperlocal/harness.hpp"
#include "hyperlocal/line_graph.hpp"
#include "hyperlocal/local_topology.hpp"
#include "hyperlocal/spectra.hpp"
#include "test_support.hpp"

using namespace hyperlocal;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20241018;

// Frozen from `pilot_neighborhood 20240611`: TV(n=400) + 4 SE, rounded up.
constexpr double kTvThresholdR1 = 0.109;
constexpr double kTvThresholdR2 = 0.035;

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, double limit_seconds, const std::function<Verdict()>& body) {
  const auto start = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_seconds > 0 && secs > limit_seconds) {
    v.pass = false;
    v.detail += "; over time limit";
  }
  if (!v.pass) ++failures;
  std::printf("criterion %d: %s  %s [%.1fs]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Verdict round_trip() {
  const std::array<std::pair<int, int>, 4> shapes{{{3, 1}, {3, 2}, {4, 2}, {5, 1}}};
  const std::array<double, 3> lambdas{0.5, 1.0, 2.0};
  Engine engine(split_seed(kSeed, 1));
  int ok = 0;
  const int total = 1000;
  for (int i = 0; i < total; ++i) {
    const auto [k, r] = shapes[uniform_below(engine, shapes.size())];
    const double lambda = lambdas[uniform_below(engine, lambdas.size())];
    const int depth = static_cast<int>(uniform_below(engine, 4));
    const int d = block_size_for(k, r);
    const auto tree = sample_gw({d, lambda, depth}, split_seed(kSeed, 1000 + static_cast<std::uint64_t>(i)));
    const auto rooted = gw_to_hypertree(tree, k, r);
    const auto lg = build_r_line_graph(rooted.hypergraph, r);
    const auto component = ball(rooted_line_graph(lg, rooted.root), static_cast<std::size_t>(depth));
    bool unit = true;
    for (const auto& e : lg.graph.edges()) unit = unit && e.weight == 1;
    if (unit && are_isomorphic(component, tree.tree)) ++ok;
  }
  return {ok == total, fmt("%d/%d round trips isomorphic", ok, total)};
}

Verdict exploration_identities() {
  std::uint64_t steps_r1 = 0;
  std::uint64_t steps_r2 = 0;
  std::uint64_t bad_r1 = 0;
  std::uint64_t bad_r2 = 0;
  Engine engine(split_seed(kSeed, 2));
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < 10000; ++i) {
      const int k = 3 + static_cast<int>(uniform_below(engine, 2));
      const int r = pass == 0 ? 1 : 2 + static_cast<int>(uniform_below(engine, static_cast<std::uint64_t>(k - 2)));
      const int n = k + 5 + static_cast<int>(uniform_below(engine, 50));
      const double lambda = 0.5 + 2.5 * uniform01(engine);
      const auto h = sample_hypergraph(resolve_params(n, k, r, lambda), split_seed(kSeed, 20000 + pass * 10000 + i));
      const auto root = unrank_kset(uniform_below(engine, binomial_u64(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r))), n, r);
      const auto trace = explore(h, RSet(root));
      for (const auto& s : trace.steps) {
        if (r == 1) {
          ++steps_r1;
          if (static_cast<std::size_t>(n) != s.active_rsets + s.t + s.unexplored_vertices) ++bad_r1;
        } else {
          ++steps_r2;
          const std::size_t seen = static_cast<std::size_t>(n) - s.unexplored_vertices;
          if (seen > static_cast<std::size_t>(r) * s.t + s.active_vertices) ++bad_r2;
          if (seen > static_cast<std::size_t>(r) * (s.t + s.active_rsets)) ++bad_r2;
        }
      }
    }
  }
  return {bad_r1 == 0 && bad_r2 == 0,
          fmt("r=1: %llu violations over %llu steps; r>=2: %llu violations over %llu steps",
              static_cast<unsigned long long>(bad_r1), static_cast<unsigned long long>(steps_r1),
              static_cast<unsigned long long>(bad_r2), static_cast<unsigned long long>(steps_r2))};
}

Verdict degree_law() {
  int points = 0;
  int violations = 0;
  double worst_ratio = 0.0;
  for (int n : {50, 100, 200}) {
    for (int k : {2, 3, 4}) {
      for (int r = 1; r < k; ++r) {
        for (double lambda : {0.5, 1.0, 2.0}) {
          const auto trials = binomial_u64(static_cast<std::uint64_t>(n - r), static_cast<std::uint64_t>(k - r));
          const double bound = lambda / static_cast<double>(trials);
          const double tv = binomial_poisson_tv(trials, lambda / static_cast<double>(trials), lambda);
          ++points;
          if (!(tv <= bound)) ++violations;
          worst_ratio = std::max(worst_ratio, tv / bound);
        }
      }
    }
  }
  return {violations == 0, fmt("%d grid points, %d violations, max TV/bound %.4f", points, violations, worst_ratio)};
}

Verdict chernoff_tail() {
  int violations = 0;
  std::string detail;
  for (int n : {60, 120, 240}) {
    const auto res = hyperedge_tail({n, 3, 1, 2.0}, 10000, {.seed = split_seed(kSeed, 40 + static_cast<std::uint64_t>(n))});
    if (res.violation || res.empirical > res.bound + 3 * res.standard_error) ++violations;
    detail += fmt("n=%d emp=%.5f exact=%.3g bound=%.3g; ", n, res.empirical, res.exact, res.bound);
  }
  return {violations == 0, detail + fmt("%d violations", violations)};
}

Verdict deviation_decay() {
  const std::vector<int> ns{50, 100, 200, 400, 800};
  std::vector<double> rates;
  std::string detail;
  for (int n : ns) {
    const auto res = deviation_rate({n, 3, 1, 2.0}, 3, 10000, {.seed = split_seed(kSeed, 50 + static_cast<std::uint64_t>(n))});
    rates.push_back(res.rate);
    detail += fmt("P(%d)=%.4f ", n, res.rate);
  }
  const auto fit = fit_inverse_decay(ns, 1, rates);
  return {fit.strictly_decreasing && fit.r_squared >= 0.8,
          detail + fmt("decreasing=%s R2=%.3f a=%.3f", fit.strictly_decreasing ? "yes" : "no", fit.r_squared,
                       fit.coefficient)};
}

Verdict neighborhood_convergence() {
  struct Plan {
    int r;
    std::uint64_t trials_100;
    std::uint64_t trials_400;
    double threshold;
  };
  bool pass = true;
  std::string detail;
  for (const Plan& plan : {Plan{1, 2000, 500, kTvThresholdR1}, Plan{2, 40, 3, kTvThresholdR2}}) {
    ExperimentConfig cfg;
    cfg.n = {100, 400};
    cfg.k = {3};
    cfg.r = {plan.r};
    cfg.lambda = {1.0};
    cfg.depth = 2;
    cfg.gw_trials = 100000;
    double tv[2] = {0, 0};
    for (int i = 0; i < 2; ++i) {
      const int n = i == 0 ? 100 : 400;
      cfg.trials = i == 0 ? plan.trials_100 : plan.trials_400;
      RunContext ctx;
      ctx.seed = split_seed(kSeed, static_cast<std::uint64_t>(n * 10 + plan.r));
      ctx.reference_seed = split_seed(kSeed, 999);
      tv[i] = neighborhood_tv({n, 3, plan.r, 1.0}, cfg, ctx).tv;
    }
    const bool ok = tv[1] < tv[0] && tv[1] <= plan.threshold;
    pass = pass && ok;
    detail += fmt("r=%d TV(100)=%.4f TV(400)=%.4f threshold=%.3f; ", plan.r, tv[0], tv[1], plan.threshold);
  }
  return {pass, detail};
}

Verdict spectral_moments() {
  ExperimentConfig cfg;
  cfg.n = {300};
  cfg.k = {3};
  cfg.r = {1};
  cfg.lambda = {1.5};
  cfg.trials = 50;
  cfg.gw_trials = 100000;
  cfg.moment_order = 4;
  const auto res = spectral_compare({300, 3, 1, 1.5}, cfg, {.seed = split_seed(kSeed, 7)});
  const double m2 = res.rows[1].esd;
  const double m3 = res.rows[2].esd;
  const double g2 = res.rows[1].gw;
  const double g3 = res.rows[2].gw;
  const bool esd_ok = std::abs(m2 - 3.0) <= 0.15 && std::abs(m3 - 3.0) <= 0.3;
  const bool gw_ok = std::abs(g2 - 3.0) <= 3 * res.rows[1].gw_se && std::abs(g3 - 3.0) <= 3 * res.rows[2].gw_se;

  // Matrix-power oracle on a few instances at the same size.
  bool oracle_ok = true;
  const auto params = resolve_params(300, 3, 1, 1.5);
  for (std::uint64_t i = 0; i < 3; ++i) {
    const auto h = sample_hypergraph(params, split_seed(kSeed, 700 + i));
    const auto lg = build_r_line_graph(h, 1);
    const auto traces = hltest::exact_trace_powers(hltest::integer_matrix(lg.graph), 4);
    const auto mom = esd_moments(eigenvalues(adjacency_matrix(lg.graph, lg.vertex_count())), 4);
    for (int j = 1; j <= 4; ++j) {
      const double exact = static_cast<double>(traces[static_cast<std::size_t>(j - 1)] / 300.0L);
      if (std::abs(mom[j] - exact) > 1e-9 * std::max(1.0, std::abs(exact))) oracle_ok = false;
    }
  }
  return {esd_ok && gw_ok && oracle_ok && res.failed_trials == 0,
          fmt("ESD m2=%.4f m3=%.4f; GW m2=%.4f+-%.4f m3=%.4f+-%.4f; matrix-power oracle %s", m2, m3, g2,
              res.rows[1].gw_se, g3, res.rows[2].gw_se, oracle_ok ? "agrees" : "DISAGREES")};
}

std::vector<double> cubic_roots(const std::array<double, 9>& a) {
  const double p1 = a[1] * a[1] + a[2] * a[2] + a[5] * a[5];
  const double q = (a[0] + a[4] + a[8]) / 3.0;
  const double p2 = (a[0] - q) * (a[0] - q) + (a[4] - q) * (a[4] - q) + (a[8] - q) * (a[8] - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return {q, q, q};
  std::array<double, 9> b{};
  for (int i = 0; i < 9; ++i) b[static_cast<std::size_t>(i)] = (a[static_cast<std::size_t>(i)] - (i % 4 == 0 ? q : 0.0)) / p;
  const double det = b[0] * (b[4] * b[8] - b[5] * b[7]) - b[1] * (b[3] * b[8] - b[5] * b[6]) +
                     b[2] * (b[3] * b[7] - b[4] * b[6]);
  const double phi = std::acos(std::clamp(det / 2.0, -1.0, 1.0)) / 3.0;
  const double e1 = q + 2 * p * std::cos(phi);
  const double e3 = q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
  std::vector<double> out{e1, 3 * q - e1 - e3, e3};
  std::sort(out.begin(), out.end());
  return out;
}

Verdict eigensolver() {
  Engine engine(split_seed(kSeed, 8));
  int bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_below(engine, 100);
    const auto range = 1 + uniform_below(engine, 50);
    std::vector<double> a(n * n, 0.0);
    long double trace = 0;
    long double frob = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double x = static_cast<double>(static_cast<std::int64_t>(uniform_below(engine, 2 * range + 1)) -
                                             static_cast<std::int64_t>(range));
        a[i * n + j] = a[j * n + i] = x;
        trace += i == j ? x : 0.0;
        frob += (i == j ? 1 : 2) * static_cast<long double>(x) * x;
      }
    }
    const auto ev = symmetric_eigenvalues(a, n);
    long double s1 = 0;
    long double s2 = 0;
    for (double x : ev) {
      s1 += x;
      s2 += static_cast<long double>(x) * x;
    }
    // Relative to the matrix scale: a zero trace has no scale of its own.
    const double e1 = static_cast<double>(std::abs(s1 - trace) / std::max<long double>(1.0L, std::sqrt(frob)));
    const double e2 = static_cast<double>(std::abs(s2 - frob) / std::max<long double>(1.0L, frob));
    worst = std::max({worst, e1, e2});
    if (e1 > 1e-9 || e2 > 1e-9) ++bad;
  }
  const std::vector<std::array<double, 9>> hand{
      {2, 1, 0, 1, 2, 1, 0, 1, 2}, {0, 1, 1, 1, 0, 1, 1, 1, 0}, {1, 2, 3, 2, 4, 5, 3, 5, 6},
      {0, 2, 0, 2, 0, 3, 0, 3, 0}, {5, 0, 0, 0, -1, 0, 0, 0, 2}, {4, -2, 1, -2, 4, -2, 1, -2, 4},
      {0, 1, 2, 1, 0, 3, 2, 3, 0}, {7, 7, 7, 7, 7, 7, 7, 7, 7}};
  int hand_bad = 0;
  for (const auto& m : hand) {
    const auto expected = cubic_roots(m);
    const auto got = symmetric_eigenvalues(std::vector<double>(m.begin(), m.end()), 3);
    for (std::size_t i = 0; i < 3; ++i) {
      if (std::abs(got[i] - expected[i]) > 1e-10 * std::max(1.0, std::abs(expected[i]))) ++hand_bad;
    }
  }
  return {bad == 0 && hand_bad == 0,
          fmt("%d/1000 random matrices off (worst rel %.2e); %d/%zu hand eigenvalues off", bad, worst, hand_bad,
              3 * hand.size())};
}

Verdict canonicalizer() {
  Engine engine(split_seed(kSeed, 9));
  int agree = 0;
  int positives = 0;
  const int total = 10000;
  auto random_rooted = [&](std::size_t n) {
    const double density = 0.15 + 0.8 * uniform01(engine);
    const int max_weight = 1 + static_cast<int>(uniform_below(engine, 3));
    return RootedWeightedGraph{hltest::random_graph(engine, n, density, max_weight),
                               static_cast<VertexId>(uniform_below(engine, n))};
  };
  for (int i = 0; i < total; ++i) {
    const std::size_t n = 1 + uniform_below(engine, 7);
    const auto a = random_rooted(n);
    RootedWeightedGraph b;
    switch (i % 3) {
      case 0:
        b = hltest::relabel(a, hltest::random_permutation(engine, n));
        break;
      case 1: {
        auto edges = a.graph.edges();
        if (!edges.empty()) {
          auto& e = edges[uniform_below(engine, edges.size())];
          e.weight = e.weight == 1 ? 2 : 1;
        }
        b = hltest::relabel({WeightedGraph(n, edges), a.root}, hltest::random_permutation(engine, n));
        break;
      }
      default:
        b = random_rooted(n);
        break;
    }
    const bool truth = hltest::brute_force_isomorphic(a, b);
    positives += truth ? 1 : 0;
    if ((canonicalize(a) == canonicalize(b)) == truth) ++agree;
  }
  return {agree == total, fmt("%d/%d pairs agree with brute force (%d isomorphic)", agree, total, positives)};
}

Verdict mass_transport() {
  Engine engine(split_seed(kSeed, 10));
  const std::vector<EdgeFunctional> functionals{
      [](const WeightedGraph& g, VertexId u, VertexId v) { return static_cast<double>(g.weight(u, v)); },
      [](const WeightedGraph& g, VertexId u, VertexId v) {
        return static_cast<double>(g.weight(u, v)) * static_cast<double>(g.degree(u));
      },
      [](const WeightedGraph& g, VertexId u, VertexId v) {
        const double w = static_cast<double>(g.weight(u, v));
        return w * w / static_cast<double>(1 + g.degree(v));
      },
      [](const WeightedGraph& g, VertexId u, VertexId v) { return g.degree(u) > g.degree(v) ? 1.0 : 0.0; },
      [](const WeightedGraph& g, VertexId u, VertexId v) {
        double strength = 0.0;
        for (const auto& nb : g.neighbors(u)) strength += static_cast<double>(nb.weight);
        return std::exp(-static_cast<double>(g.weight(u, v))) * std::sqrt(strength) + static_cast<double>(v % 3);
      },
  };
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + uniform_below(engine, 50);
    const auto g = hltest::random_graph(engine, n, 0.05 + 0.4 * uniform01(engine), 4);
    for (const auto& f : functionals) {
      if (!mass_transport_check(g, f, 1e-12).balanced) ++bad;
    }
  }
  return {bad == 0, fmt("%d/500 graph-functional pairs unbalanced", bad)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HYPERLOCAL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism() {
  const fs::path config = fs::path(HYPERLOCAL_SOURCE_DIR) / "configs" / "theorem2_small.json";
  const fs::path dir = fs::temp_directory_path() / "hyperlocal_acceptance_determinism";
  fs::remove_all(dir);
  const int a = run_cli("converge --config " + config.string() + " --threads 1 --out " + (dir / "t1").string());
  const int b = run_cli("converge --config " + config.string() + " --threads 8 --out " + (dir / "t8").string());
  const std::string ra = read_file(dir / "t1" / "report.json");
  const std::string rb = read_file(dir / "t8" / "report.json");
  const bool same = ra == rb;
  fs::remove_all(dir);
  return {same && a == 0 && b == 0,
          fmt("exit codes %d/%d, reports %s (%zu bytes)", a, b, same ? "byte-identical" : "DIFFER", ra.size())};
}

}  // namespace

int main() {
  report(1, 60, round_trip);
  report(2, 0, exploration_identities);
  report(3, 5, degree_law);
  report(4, 0, chernoff_tail);
  report(5, 600, deviation_decay);
  report(6, 900, neighborhood_convergence);
  report(7, 600, spectral_moments);
  report(8, 0, eigensolver);
  report(9, 0, canonicalizer);
  report(10, 0, mass_transport);
  report(11, 0, determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
