// Pilot run used to freeze the neighborhood TV thresholds checked by the
// acceptance binary. Not part of the test suite; rerun by hand with
//   pilot_neighborhood <seed>
// and copy the printed thresholds into acceptance.cpp.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "hyperlocal/harness.hpp"
#include "hyperlocal/random.hpp"

using namespace hyperlocal;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20240611;
  struct Plan {
    int r;
    std::uint64_t trials_100;
    std::uint64_t trials_400;
  };
  for (const Plan& plan : {Plan{1, 2000, 500}, Plan{2, 40, 3}}) {
    ExperimentConfig cfg;
    cfg.n = {100, 400};
    cfg.k = {3};
    cfg.r = {plan.r};
    cfg.lambda = {1.0};
    cfg.depth = 2;
    cfg.gw_trials = 100000;
    cfg.master_seed = seed;
    double tv[2] = {0, 0};
    double se[2] = {0, 0};
    for (int i = 0; i < 2; ++i) {
      const int n = i == 0 ? 100 : 400;
      cfg.trials = i == 0 ? plan.trials_100 : plan.trials_400;
      RunContext ctx;
      ctx.seed = split_seed(seed, static_cast<std::uint64_t>(n * 10 + plan.r));
      ctx.reference_seed = split_seed(seed, 999);
      const auto start = std::chrono::steady_clock::now();
      const auto res = neighborhood_tv({n, 3, plan.r, 1.0}, cfg, ctx);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      tv[i] = res.tv;
      se[i] = res.tv_se;
      std::printf("r=%d n=%d trials=%llu roots=%llu classes=%zu/%zu tv=%.5f se=%.5f (%.1fs)\n", plan.r, n,
                  static_cast<unsigned long long>(cfg.trials), static_cast<unsigned long long>(res.roots),
                  res.classes_hypergraph, res.classes_gw, res.tv, res.tv_se, secs);
    }
    std::printf("r=%d threshold (tv400 + 4 se, rounded up to 1e-3) = %.3f, decreasing=%s\n", plan.r,
                std::ceil((tv[1] + 4 * se[1]) * 1000) / 1000, tv[1] < tv[0] ? "yes" : "no");
  }
  return 0;
}
