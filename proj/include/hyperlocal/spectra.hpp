#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hyperlocal/weighted_graph.hpp"

namespace hyperlocal {

inline constexpr std::size_t kDefaultDenseCap = 4000;

/// Raised when the QL iteration does not converge within its budget.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric adjacency operator of dimension `dim`. Only the leading
/// `dense_dim` x `dense_dim` block (the materialized vertices) is stored;
/// the remaining rows and columns are identically zero.
struct AdjacencyMatrix {
  std::uint64_t dim = 0;
  std::size_t dense_dim = 0;
  std::vector<double> dense;  ///< row-major dense_dim x dense_dim

  double at(std::size_t i, std::size_t j) const {
    return (i < dense_dim && j < dense_dim) ? dense[i * dense_dim + j] : 0.0;
  }
};

/// Throws std::invalid_argument if full_dim < materialized vertex count and
/// std::length_error if the materialized block exceeds `dense_cap`.
AdjacencyMatrix adjacency_matrix(const WeightedGraph& g, std::uint64_t full_dim,
                                 std::size_t dense_cap = kDefaultDenseCap);

struct SpectralSample {
  std::vector<double> eigenvalues;  ///< ascending, length dim
  int n = 0;
  int k = 0;
  int r = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

/// All eigenvalues of a dense symmetric matrix (row-major, n x n), ascending.
/// Householder reduction to tridiagonal form, then implicit-shift QL.
/// Throws NumericFailure after 30 * n QL iterations.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n);

/// Eigenvalues of M including one zero per padding row.
SpectralSample eigenvalues(const AdjacencyMatrix& m);

/// Right-continuous empirical CDF on a sorted grid. An eigenvalue within
/// 1e-9 * max(1, |x|) above x counts as <= x, so that exact zeros computed
/// as tiny positives are not lost.
std::vector<std::pair<double, double>> esd(const SpectralSample& sample,
                                           const std::vector<double>& grid);

struct MomentVector {
  std::vector<double> moments;          ///< m_1..m_K
  std::vector<double> standard_errors;  ///< empty when not applicable
  std::string source;                   ///< "esd", "walks" or "gw-walks"
  std::uint64_t sample_count = 0;

  double operator[](std::size_t k) const { return moments.at(k - 1); }
};

/// m_k = (1/N) sum_i lambda_i^k, k = 1..K.
MomentVector esd_moments(const SpectralSample& sample, int K);

/// (1/N) sum_{u,v} w(u,v)^2 straight from the graph.
double frobenius_second_moment(const WeightedGraph& g, std::uint64_t full_dim);

/// m_k = (1/N) tr(A^k) as (1/N) sum_o (A^k)_{oo}, each term by repeated
/// sparse products restricted to the radius ceil(K/2) ball of o. Works for
/// any size; padding rows contribute nothing.
MomentVector closed_walk_moments(const WeightedGraph& g, std::uint64_t full_dim, int K);

/// Monte Carlo estimate of the root moments of the d-block GW measure:
/// mean over trials of the weighted closed-walk counts of length 1..K at the
/// root of a sample truncated at ceil(K/2) generations. Trial i uses
/// split_seed(seed, i).
MomentVector gw_root_moments(int d, double lambda, int K, std::uint64_t trials,
                             std::uint64_t seed, std::size_t threads = 1);

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 edges
  std::vector<std::uint64_t> counts;
};

/// Equal-width bins over [lo, hi]; the last bin is closed.
Histogram histogram(const SpectralSample& sample, std::size_t bins, double lo, double hi);

std::string eigenvalues_csv(const SpectralSample& sample);
std::string moments_json(const MomentVector& m);
std::string histogram_csv(const Histogram& h);

}  // namespace hyperlocal
