#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hyperlocal/io.hpp"
#include "hyperlocal/local_topology.hpp"
#include "hyperlocal/spectra.hpp"

namespace hyperlocal {

struct GridPoint {
  int n = 0;
  int k = 0;
  int r = 1;
  double lambda = 0.0;
};

/// Optional pass/fail thresholds checked against the report. A failed gate
/// is a bound violation.
struct Gates {
  std::optional<double> neighborhood_tv_max;
  bool neighborhood_tv_decreasing = false;  ///< along n for fixed (k, r, lambda)
  std::optional<double> deviation_r2_min;
  bool deviation_decreasing = false;
};

struct ExperimentConfig {
  std::vector<int> n;
  std::vector<int> k;
  std::vector<int> r;
  std::vector<double> lambda;
  int depth = 2;
  std::uint64_t trials = 1;
  std::uint64_t gw_trials = 1000;
  int moment_order = 8;
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";
  /// Any of "neighborhood", "degree", "tail", "deviation", "spectral".
  std::vector<std::string> experiments{"neighborhood", "degree", "tail", "deviation", "spectral"};
  std::uint64_t degree_samples = 10000;
  std::uint64_t tail_samples = 1000;
  std::uint64_t root_cap = 100000;
  std::uint64_t min_class_count = 5;
  std::size_t dense_cap = kDefaultDenseCap;
  std::size_t class_warning_cap = 10000;
  Gates gates;

  bool runs(const std::string& experiment) const;
  /// Cartesian product of the grids, skipping combinations that violate
  /// 1 <= r < k <= n. Ordered by (k, r, lambda, n).
  std::vector<GridPoint> grid() const;
};

/// Throws std::invalid_argument on missing or malformed fields.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& cfg);

// ---- analytic pieces -------------------------------------------------------

/// TV between Binomial(trials, p) and Poisson(lambda), by pmf summation in
/// extended precision.
double binomial_poisson_tv(std::uint64_t trials, double p, double lambda);

/// P(Binomial(trials, p) > threshold), by pmf summation.
double binomial_upper_tail(std::uint64_t trials, double p, double threshold);

struct DecayFit {
  double coefficient = 0.0;  ///< a in P = a / (n - r)
  double r_squared = 0.0;    ///< centred coefficient of determination
  bool strictly_decreasing = false;
};

/// Least squares of rate against 1/(n - r) through the origin.
DecayFit fit_inverse_decay(const std::vector<int>& n, int r, const std::vector<double>& rate);

// ---- sub-experiments -------------------------------------------------------

/// Seeds, thread count and cache location shared by all sub-experiments.
struct RunContext {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::optional<std::filesystem::path> cache_dir;
  /// Seed of the GW reference sample; split_seed(seed, 1) when empty.
  std::optional<std::uint64_t> reference_seed;
};

struct NeighborhoodResult {
  double tv = 0.0;
  double tv_se = 0.0;  ///< plug-in multinomial approximation
  std::uint64_t roots = 0;
  std::uint64_t gw_samples = 0;
  std::size_t classes_hypergraph = 0;
  std::size_t classes_gw = 0;
  bool diversity_warning = false;
  std::uint64_t failed_trials = 0;
  NeighborhoodDistribution hypergraph;
  NeighborhoodDistribution reference;
};

/// Pooled depth-t U_r(H_n) classes vs the GW reference ball classes.
NeighborhoodResult neighborhood_tv(const GridPoint& point, const ExperimentConfig& cfg,
                                   const RunContext& ctx);

/// Depth-t ball classes at the root of `samples` GW graphs. Uses the cache
/// directory when present.
NeighborhoodDistribution gw_reference(int d, double lambda, int depth, std::uint64_t samples,
                                      const RunContext& ctx);

struct DegreeResult {
  double exact_tv = 0.0;
  double bound = 0.0;
  double empirical_tv = 0.0;
  std::uint64_t samples = 0;
  bool violation = false;
};

DegreeResult degree_poisson_tv(const GridPoint& point, std::uint64_t samples, const RunContext& ctx);

struct TailResult {
  double empirical = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  double threshold = 0.0;
  double exact = 0.0;
  std::uint64_t samples = 0;
  bool violation = false;
  std::uint64_t failed_trials = 0;
};

TailResult hyperedge_tail(const GridPoint& point, std::uint64_t samples, const RunContext& ctx);

struct DeviationResult {
  double rate = 0.0;
  double standard_error = 0.0;
  double y_neq_z = 0.0;
  double edge_escapes = 0.0;
  double edge_overlap = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t failed_trials = 0;
};

/// Rate of any deviation event within `depth` exploration steps from the
/// root r-set {1..r}.
DeviationResult deviation_rate(const GridPoint& point, int depth, std::uint64_t trials,
                               const RunContext& ctx);

struct MomentRow {
  int k = 0;
  double esd = 0.0;
  double esd_se = 0.0;
  double gw = 0.0;
  double gw_se = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  bool within_3se = false;
};

struct SpectralResult {
  std::vector<MomentRow> rows;
  std::string mode;  ///< "dense" or "walks"
  double frobenius_max_discrepancy = 0.0;  ///< max |m_2(esd) - m_2(frobenius)| over trials
  std::uint64_t trials = 0;
  std::uint64_t failed_trials = 0;
};

SpectralResult spectral_compare(const GridPoint& point, const ExperimentConfig& cfg,
                                const RunContext& ctx);

// ---- full run --------------------------------------------------------------

struct RunResult {
  Json report;
  bool violation = false;
  std::vector<std::string> violations;
  double wall_seconds = 0.0;
};

/// Runs every enabled sub-experiment over the grid. The report depends only
/// on the config (thread count and cache never change it).
RunResult run_experiment(const ExperimentConfig& cfg, std::size_t threads = 1);

/// run_experiment plus atomic writes of report.json, one CSV per
/// sub-experiment and timing.json into cfg.output_dir.
RunResult run_and_write(const ExperimentConfig& cfg, std::size_t threads = 1);

/// Calls fn(i) for i in [0, count) on up to `threads` threads.
void parallel_for(std::uint64_t count, std::size_t threads,
                  const std::function<void(std::uint64_t)>& fn);

}  // namespace hyperlocal
