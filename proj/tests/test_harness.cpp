#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "hyperlocal/combinatorics.hpp"
#include "hyperlocal/harness.hpp"
#include "hyperlocal/hypergraph.hpp"

using namespace hyperlocal;
namespace fs = std::filesystem;

namespace {

double log_binomial_pmf(double trials, double p, double j) {
  return std::lgamma(trials + 1) - std::lgamma(j + 1) - std::lgamma(trials - j + 1) + j * std::log(p) +
         (trials - j) * std::log1p(-p);
}

/// TV(Binomial, Poisson) by direct lgamma summation over a wide window.
double tv_oracle(std::uint64_t trials, double p, double lambda) {
  const auto horizon = static_cast<std::uint64_t>(lambda + 40 * std::sqrt(lambda + 1) + 40);
  double sum = 0.0;
  double pb = 0.0;
  double pp = 0.0;
  for (std::uint64_t j = 0; j <= horizon; ++j) {
    const double x = static_cast<double>(j);
    const double b = j <= trials ? std::exp(log_binomial_pmf(static_cast<double>(trials), p, x)) : 0.0;
    const double q = std::exp(x * std::log(lambda) - lambda - std::lgamma(x + 1));
    pb += b;
    pp += q;
    sum += std::abs(b - q);
  }
  return 0.5 * (sum + (1 - pb) + (1 - pp));
}

double upper_tail_oracle(std::uint64_t trials, double p, double threshold) {
  double tail = 0.0;
  const auto start = static_cast<std::uint64_t>(std::floor(threshold)) + 1;
  for (std::uint64_t j = start; j <= trials && j < start + 2000; ++j) {
    tail += std::exp(log_binomial_pmf(static_cast<double>(trials), p, static_cast<double>(j)));
  }
  return tail;
}

Json base_config() {
  return Json::parse(R"({
    "grid": {"n": [40], "k": [3], "r": [1], "lambda": [1.0]},
    "depth": 2,
    "trials": 4,
    "gw_trials": 2000,
    "moment_order": 4,
    "master_seed": 12345,
    "degree_samples": 10000,
    "tail_samples": 1000
  })");
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hyperlocal_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("Binomial-Poisson TV matches an lgamma oracle and the bound") {
  for (int n : {50, 100, 200}) {
    for (int k : {2, 3, 4}) {
      for (int r = 1; r < k; ++r) {
        for (double lambda : {0.5, 1.0, 2.0}) {
          const auto trials = binomial_u64(static_cast<std::uint64_t>(n - r), static_cast<std::uint64_t>(k - r));
          const double p = lambda / static_cast<double>(trials);
          const double tv = binomial_poisson_tv(trials, p, lambda);
          CAPTURE(n);
          CAPTURE(k);
          CAPTURE(r);
          CHECK(tv == doctest::Approx(tv_oracle(trials, p, lambda)).epsilon(1e-9));
          CHECK(tv <= lambda / static_cast<double>(trials));
        }
      }
    }
  }
}

TEST_CASE("single-trial degree law is Bernoulli against Poisson") {
  for (double lambda : {0.1, 0.5, 1.0}) {
    const double e = std::exp(-lambda);
    const double expected = 0.5 * (std::abs(1 - lambda - e) + std::abs(lambda - lambda * e) + (1 - e - lambda * e));
    CHECK(binomial_poisson_tv(1, lambda, lambda) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(binomial_poisson_tv(1, lambda, lambda) <= lambda);
  }
  // n = k leaves C(n-r, k-r) = 1 trial.
  const auto point = GridPoint{3, 3, 1, 0.7};
  const auto res = degree_poisson_tv(point, 10000, {.seed = 1});
  CHECK(res.bound == doctest::Approx(0.7));
  CHECK(res.exact_tv == doctest::Approx(binomial_poisson_tv(1, 0.7, 0.7)));
  CHECK_FALSE(res.violation);
}

TEST_CASE("lambda = 0 gives zero degree TV") {
  CHECK(binomial_poisson_tv(10, 0.0, 0.0) == 0.0);
  const auto res = degree_poisson_tv({50, 3, 1, 0.0}, 10000, {.seed = 1});
  CHECK(res.exact_tv == 0.0);
  CHECK(res.empirical_tv == 0.0);
}

TEST_CASE("empirical degree TV shrinks to the exact value's scale") {
  const auto res = degree_poisson_tv({100, 3, 1, 2.0}, 40000, {.seed = 9});
  CHECK(res.exact_tv <= res.bound);
  CHECK(res.empirical_tv < 0.03);
}

TEST_CASE("binomial upper tail matches the oracle") {
  const std::uint64_t trials = binomial_u64(60, 3);
  const double p = 2.0 / static_cast<double>(binomial_u64(59, 2));
  for (double threshold : {20.0, 40.0, 60.0, 75.5}) {
    CHECK(binomial_upper_tail(trials, p, threshold) ==
          doctest::Approx(upper_tail_oracle(trials, p, threshold)).epsilon(1e-9));
  }
}

TEST_CASE("hyperedge tail at n = 60 agrees with the exact tail") {
  const auto res = hyperedge_tail({60, 3, 1, 2.0}, 10000, {.seed = 77});
  CHECK(res.samples == 10000);
  CHECK(res.threshold == doctest::Approx(60.0));
  const double se = std::sqrt(res.exact * (1 - res.exact) / 10000.0);
  CHECK(std::abs(res.empirical - res.exact) <= 3 * se + 1e-12);
  CHECK(res.bound == doctest::Approx(std::exp(-2.0 * 60 / 18.0)));
  CHECK_FALSE(res.violation);

  const auto zero = hyperedge_tail({60, 3, 1, 0.0}, 1000, {.seed = 1});
  CHECK(zero.empirical == 0.0);
  CHECK_FALSE(zero.violation);
}

TEST_CASE("inverse decay fit") {
  const std::vector<int> n{50, 100, 200, 400, 800};
  std::vector<double> rate;
  for (int x : n) rate.push_back(3.0 / (x - 1));
  const auto exact = fit_inverse_decay(n, 1, rate);
  CHECK(exact.coefficient == doctest::Approx(3.0));
  CHECK(exact.r_squared == doctest::Approx(1.0));
  CHECK(exact.strictly_decreasing);

  const auto flat = fit_inverse_decay(n, 1, {0.1, 0.1, 0.1, 0.1, 0.1});
  CHECK_FALSE(flat.strictly_decreasing);
  CHECK(flat.r_squared < 0.8);
}

TEST_CASE("deviation rate is near zero for sparse large instances") {
  const auto res = deviation_rate({3000, 3, 1, 0.2}, 3, 2000, {.seed = 5});
  CHECK(res.trials == 2000);
  CHECK(res.rate < 0.01);
}

TEST_CASE("deviation rate decreases from n = 50 to n = 400") {
  const auto small = deviation_rate({50, 3, 1, 2.0}, 3, 3000, {.seed = 5});
  const auto large = deviation_rate({400, 3, 1, 2.0}, 3, 3000, {.seed = 6});
  CHECK(large.rate < small.rate);
  CHECK(small.rate >= small.y_neq_z);
}

TEST_CASE("GW reference is deterministic and written to the file cache") {
  const auto dir = scratch_dir("cache");
  RunContext ctx{.seed = 4, .cache_dir = dir};
  const auto first = gw_reference(2, 1.0, 2, 3000, ctx);
  const auto second = gw_reference(2, 1.0, 2, 3000, ctx);
  CHECK(first.counts == second.counts);
  CHECK(first.total == 3000);
  REQUIRE(fs::exists(dir));
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    ++files;
    const auto j = Json::parse(read_file(entry.path()));
    std::uint64_t total = 0;
    for (const auto& row : j.at("counts")) total += row.at(1).get<std::uint64_t>();
    CHECK(total == 3000);
  }
  CHECK(files == 1);
  fs::remove_all(dir);
}

TEST_CASE("neighborhood TV is zero when lambda = 0") {
  auto cfg = config_from_json(base_config());
  const auto res = neighborhood_tv({40, 3, 1, 0.0}, cfg, {.seed = 2});
  CHECK(res.tv == 0.0);
  CHECK(res.classes_hypergraph == 1);
  CHECK(res.classes_gw == 1);
}

TEST_CASE("neighborhood TV falls with n for the simple graph case") {
  auto j = base_config();
  j["trials"] = 20;
  j["gw_trials"] = 20000;
  const auto cfg = config_from_json(j);
  const auto ctx = RunContext{.seed = 3, .reference_seed = 99};
  const auto at100 = neighborhood_tv({100, 2, 1, 1.0}, cfg, ctx);
  j["trials"] = 5;
  const auto at400 = neighborhood_tv({400, 2, 1, 1.0}, config_from_json(j), ctx);
  CHECK(at400.tv < at100.tv);
  CHECK(at100.tv >= 0.0);
  CHECK(at100.tv <= 1.0);
}

TEST_CASE("different master seeds give TV estimates within mutual noise") {
  auto j = base_config();
  j["trials"] = 10;
  j["gw_trials"] = 10000;
  const auto cfg = config_from_json(j);
  const auto a = neighborhood_tv({200, 3, 1, 1.0}, cfg, {.seed = 1});
  const auto b = neighborhood_tv({200, 3, 1, 1.0}, cfg, {.seed = 2});
  CHECK(std::abs(a.tv - b.tv) <= 3 * std::hypot(a.tv_se, b.tv_se));
}

TEST_CASE("spectral comparison at small scale") {
  auto j = base_config();
  j["trials"] = 10;
  j["gw_trials"] = 20000;
  const auto cfg = config_from_json(j);
  const auto res = spectral_compare({60, 2, 1, 1.0}, cfg, {.seed = 8});
  CHECK(res.mode == "dense");
  REQUIRE(res.rows.size() == 4);
  CHECK(res.rows[0].gap == 0.0);
  CHECK(res.rows[0].gw == 0.0);
  CHECK(res.rows[2].gw == 0.0);
  CHECK(res.frobenius_max_discrepancy < 1e-9);
  CHECK(res.rows[1].gw == doctest::Approx(1.0).epsilon(0.05));

  j["dense_cap"] = 10;
  const auto walks = spectral_compare({60, 2, 1, 1.0}, config_from_json(j), {.seed = 8});
  CHECK(walks.mode == "walks");
  for (std::size_t i = 0; i < 4; ++i) CHECK(walks.rows[i].esd == doctest::Approx(res.rows[i].esd).epsilon(1e-9));
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(config_from_json(base_config()));
  auto j = base_config();
  j["bogus"] = 1;
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  j = base_config();
  j.erase("master_seed");
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  j = base_config();
  j["degree_samples"] = 100;
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  j["experiments"] = Json::array({"tail"});
  CHECK_NOTHROW(config_from_json(j));
  j = base_config();
  j["tail_samples"] = 10;
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  j = base_config();
  j["grid"]["lambda"] = Json::array({1e6});
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  j = base_config();
  j["grid"]["k"] = Json::array({50});
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  j = base_config();
  j["gates"] = {{"tv_min", 1}};
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  j = base_config();
  j["experiments"] = Json::array({"nonsense"});
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  j = base_config();
  j["depth"] = "two";
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);

  const auto cfg = config_from_json(base_config());
  CHECK(config_from_json(config_to_json(cfg)).grid().size() == cfg.grid().size());
  CHECK(config_to_json(config_from_json(config_to_json(cfg))).dump() == config_to_json(cfg).dump());
}

TEST_CASE("grid skips invalid combinations and keeps a fixed order") {
  auto j = base_config();
  j["grid"] = {{"n", {20, 10}}, {"k", {3, 2}}, {"r", {1, 2}}, {"lambda", {1.0}}};
  const auto grid = config_from_json(j).grid();
  REQUIRE(grid.size() == 6);
  CHECK(grid[0].k == 3);
  CHECK(grid[0].r == 1);
  CHECK(grid[0].n == 20);
  CHECK(grid[1].n == 10);
  CHECK(grid[2].r == 2);
  CHECK(grid[4].k == 2);
  CHECK(grid[5].r == 1);
}

TEST_CASE("lambda = 0 run reports all-zero distances") {
  auto j = base_config();
  j["grid"]["lambda"] = Json::array({0.0});
  const auto result = run_experiment(config_from_json(j));
  CHECK_FALSE(result.violation);
  const auto& pt = result.report["points"][0];
  CHECK(pt["neighborhood"]["tv"].get<double>() == 0.0);
  CHECK(pt["degree"]["exact_tv"].get<double>() == 0.0);
  CHECK(pt["degree"]["empirical_tv"].get<double>() == 0.0);
  CHECK(pt["tail"]["empirical"].get<double>() == 0.0);
  CHECK(pt["deviation"]["rate"].get<double>() == 0.0);
  for (const auto& row : pt["spectral"]["moments"]) {
    CHECK(row["esd"].get<double>() == 0.0);
    CHECK(row["gw"].get<double>() == 0.0);
  }
  CHECK(result.report["ok"].get<bool>());
}

TEST_CASE("reports are a pure function of the config") {
  auto j = base_config();
  j["grid"]["n"] = Json::array({30, 60});
  j["grid"]["r"] = Json::array({1, 2});
  const auto cfg = config_from_json(j);
  const auto a = run_experiment(cfg, 1);
  const auto b = run_experiment(cfg, 3);
  CHECK(a.report.dump() == b.report.dump());
  j["master_seed"] = 54321;
  const auto c = run_experiment(config_from_json(j), 1);
  CHECK(a.report.dump() != c.report.dump());
}

TEST_CASE("absurd gate forces a violation") {
  auto j = base_config();
  j["gates"] = {{"neighborhood_tv_max", 0.0}};
  j["experiments"] = Json::array({"neighborhood"});
  const auto result = run_experiment(config_from_json(j));
  CHECK(result.violation);
  CHECK_FALSE(result.report["ok"].get<bool>());
  CHECK(result.violations.size() == 1);
}

TEST_CASE("run_and_write produces the report and tables") {
  const auto dir = scratch_dir("run");
  auto j = base_config();
  j["output_dir"] = dir.string();
  const auto result = run_and_write(config_from_json(j));
  for (const char* name : {"report.json", "timing.json", "neighborhood.csv", "degree.csv", "tail.csv",
                           "deviation.csv", "spectral.csv"}) {
    CHECK(fs::exists(dir / name));
  }
  CHECK(Json::parse(read_file(dir / "report.json")).dump() == result.report.dump());
  for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().extension() != ".tmp");
  fs::remove_all(dir);
}

TEST_CASE("parallel_for visits every index exactly once") {
  for (std::size_t threads : {1u, 2u, 8u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), threads, [&](std::uint64_t i) { ++hits[i]; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
}
