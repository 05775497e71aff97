#include "hyperlocal/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hyperlocal/gw_sampler.hpp"
#include "hyperlocal/local_topology.hpp"
#include "hyperlocal/random.hpp"

namespace hyperlocal {

namespace {

// Reduces the symmetric matrix to tridiagonal form in place; d receives the
// diagonal, e the subdiagonal (e[0] = 0).
void householder_tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                                std::vector<double>& e) {
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(A(i, k));
      if (scale == 0.0) {
        e[i] = A(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          A(i, k) /= scale;
          h += A(i, k) * A(i, k);
        }
        double f = A(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        A(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
          e[j] = g / h;
          f += e[j] * A(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = A(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) A(j, k) -= (f * e[k] + g * A(i, k));
        }
      }
    } else {
      e[i] = A(i, l);
    }
  }
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) d[i] = A(i, i);
}

// Implicit-shift QL on a tridiagonal matrix; eigenvalues replace d.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::size_t n) {
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  const std::size_t budget = 30 * n;
  std::size_t used = 0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++used > budget) throw NumericFailure("QL iteration did not converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t ii = m; ii-- > l;) {
        double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

}  // namespace

AdjacencyMatrix adjacency_matrix(const WeightedGraph& g, std::uint64_t full_dim,
                                 std::size_t dense_cap) {
  const std::size_t m = g.materialized_count();
  if (full_dim < m) throw std::invalid_argument("full dimension below the materialized vertex count");
  if (m > dense_cap) throw std::length_error("materialized block exceeds the dense cap");
  AdjacencyMatrix out;
  out.dim = full_dim;
  out.dense_dim = m;
  out.dense.assign(m * m, 0.0);
  for (const auto& e : g.edges()) {
    out.dense[e.u * m + e.v] = static_cast<double>(e.weight);
    out.dense[e.v * m + e.u] = static_cast<double>(e.weight);
  }
  return out;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("matrix storage does not match its dimension");
  if (n == 0) return {};
  std::vector<double> d(n), e(n);
  householder_tridiagonalize(a, n, d, e);
  tridiagonal_ql(d, e, n);
  std::sort(d.begin(), d.end());
  return d;
}

SpectralSample eigenvalues(const AdjacencyMatrix& m) {
  SpectralSample s;
  s.eigenvalues = symmetric_eigenvalues(m.dense, m.dense_dim);
  s.eigenvalues.resize(m.dim, 0.0);
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

std::vector<std::pair<double, double>> esd(const SpectralSample& sample,
                                           const std::vector<double>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("grid must be sorted");
  std::vector<std::pair<double, double>> out;
  const auto& ev = sample.eigenvalues;
  const double n = static_cast<double>(std::max<std::size_t>(1, ev.size()));
  for (double x : grid) {
    const double snapped = x + 1e-9 * std::max(1.0, std::abs(x));
    const auto count = std::upper_bound(ev.begin(), ev.end(), snapped) - ev.begin();
    out.emplace_back(x, ev.empty() ? 0.0 : static_cast<double>(count) / n);
  }
  return out;
}

MomentVector esd_moments(const SpectralSample& sample, int K) {
  if (K < 1) throw std::invalid_argument("moment order must be >= 1");
  MomentVector out;
  out.source = "esd";
  out.sample_count = 1;
  out.moments.assign(static_cast<std::size_t>(K), 0.0);
  for (double x : sample.eigenvalues) {
    double power = 1.0;
    for (int k = 0; k < K; ++k) {
      power *= x;
      out.moments[static_cast<std::size_t>(k)] += power;
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, sample.eigenvalues.size()));
  for (auto& m : out.moments) m /= n;
  return out;
}

double frobenius_second_moment(const WeightedGraph& g, std::uint64_t full_dim) {
  long double sum = 0.0L;
  for (const auto& e : g.edges()) sum += 2.0L * static_cast<long double>(e.weight) * e.weight;
  return static_cast<double>(sum / static_cast<long double>(std::max<std::uint64_t>(1, full_dim)));
}

namespace {

// Weighted closed walks of length 1..K at `root`.
std::vector<double> root_walk_counts(const WeightedGraph& g, VertexId root, int K) {
  const std::size_t n = g.materialized_count();
  std::vector<double> x(n, 0.0), y(n, 0.0);
  x[root] = 1.0;
  std::vector<double> out(static_cast<std::size_t>(K), 0.0);
  for (int k = 0; k < K; ++k) {
    std::fill(y.begin(), y.end(), 0.0);
    for (VertexId u = 0; u < n; ++u) {
      if (x[u] == 0.0) continue;
      for (const auto& nb : g.neighbors(u)) y[nb.to] += static_cast<double>(nb.weight) * x[u];
    }
    std::swap(x, y);
    out[static_cast<std::size_t>(k)] = x[root];
  }
  return out;
}

}  // namespace

MomentVector closed_walk_moments(const WeightedGraph& g, std::uint64_t full_dim, int K) {
  if (K < 1) throw std::invalid_argument("moment order must be >= 1");
  if (full_dim < g.materialized_count()) {
    throw std::invalid_argument("full dimension below the materialized vertex count");
  }
  MomentVector out;
  out.source = "walks";
  out.sample_count = 1;
  std::vector<long double> sums(static_cast<std::size_t>(K), 0.0L);
  const std::size_t radius = static_cast<std::size_t>((K + 1) / 2);
  for (VertexId o = 0; o < g.materialized_count(); ++o) {
    if (g.degree(o) == 0) continue;
    const auto b = ball(g, o, radius);
    const auto counts = root_walk_counts(b.graph, b.root, K);
    for (std::size_t k = 0; k < counts.size(); ++k) sums[k] += counts[k];
  }
  const long double n = static_cast<long double>(std::max<std::uint64_t>(1, full_dim));
  for (auto s : sums) out.moments.push_back(static_cast<double>(s / n));
  return out;
}

MomentVector gw_root_moments(int d, double lambda, int K, std::uint64_t trials,
                             std::uint64_t seed, std::size_t threads) {
  if (K < 1) throw std::invalid_argument("moment order must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  GWParams params;
  params.d = d;
  params.lambda = lambda;
  params.depth = (K + 1) / 2;
  const std::size_t kk = static_cast<std::size_t>(K);
  std::vector<double> per_trial(trials * kk, 0.0);
  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      const auto sample = sample_gw(params, split_seed(seed, i));
      const auto counts = root_walk_counts(sample.tree.graph, sample.tree.root, K);
      std::copy(counts.begin(), counts.end(), per_trial.begin() + static_cast<std::ptrdiff_t>(i * kk));
    }
  };
  threads = std::max<std::size_t>(1, std::min<std::uint64_t>(threads, trials));
  if (threads == 1) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::uint64_t lo = std::min<std::uint64_t>(trials, t * chunk);
      const std::uint64_t hi = std::min<std::uint64_t>(trials, lo + chunk);
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  MomentVector out;
  out.source = "gw-walks";
  out.sample_count = trials;
  for (std::size_t k = 0; k < kk; ++k) {
    long double sum = 0.0L;
    long double sq = 0.0L;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const long double v = per_trial[i * kk + k];
      sum += v;
      sq += v * v;
    }
    const long double mean = sum / trials;
    long double var = 0.0L;
    if (trials > 1) var = std::max(0.0L, (sq - trials * mean * mean) / (trials - 1));
    out.moments.push_back(static_cast<double>(mean));
    out.standard_errors.push_back(static_cast<double>(std::sqrt(var / trials)));
  }
  return out;
}

Histogram histogram(const SpectralSample& sample, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram needs bins >= 1 and hi > lo");
  Histogram h;
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins));
  }
  h.counts.assign(bins, 0);
  for (double x : sample.eigenvalues) {
    if (x < lo || x > hi) continue;
    auto idx = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(idx, bins - 1)]++;
  }
  return h;
}

std::string eigenvalues_csv(const SpectralSample& sample) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "index,eigenvalue\n";
  for (std::size_t i = 0; i < sample.eigenvalues.size(); ++i) {
    out << i << ',' << sample.eigenvalues[i] << '\n';
  }
  return out.str();
}

std::string moments_json(const MomentVector& m) {
  nlohmann::ordered_json j;
  j["source"] = m.source;
  j["sample_count"] = m.sample_count;
  nlohmann::ordered_json moments = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < m.moments.size(); ++k) moments[std::to_string(k + 1)] = m.moments[k];
  j["moments"] = moments;
  if (!m.standard_errors.empty()) {
    nlohmann::ordered_json se = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < m.standard_errors.size(); ++k) {
      se[std::to_string(k + 1)] = m.standard_errors[k];
    }
    j["standard_errors"] = se;
  }
  return j.dump(2) + "\n";
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "lo,hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << h.edges[i] << ',' << h.edges[i + 1] << ',' << h.counts[i] << '\n';
  }
  return out.str();
}

}  // namespace hyperlocal
