#include "hyperlocal/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hyperlocal/random.hpp"

namespace hyperlocal {

RSet::RSet(std::vector<Vertex> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw std::invalid_argument("r-set has repeated members");
  }
}

RSet::RSet(std::initializer_list<Vertex> members) : RSet(std::vector<Vertex>(members)) {}

bool RSet::contains(Vertex v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

std::string RSet::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out << ',';
    out << members_[i];
  }
  out << '}';
  return out.str();
}

Hypergraph::Hypergraph(int n, int k, std::vector<Hyperedge> edges)
    : n_(n), k_(k), edges_(std::move(edges)) {
  if (n < 1) throw std::invalid_argument("hypergraph needs n >= 1");
  if (k < 1) throw std::invalid_argument("hypergraph needs k >= 1");
  if (k > n) throw std::invalid_argument("k exceeds n");
  for (auto& e : edges_) {
    if (static_cast<int>(e.size()) != k) {
      throw std::invalid_argument("hyperedge does not have exactly k vertices");
    }
    std::sort(e.begin(), e.end());
    if (std::adjacent_find(e.begin(), e.end()) != e.end()) {
      throw std::invalid_argument("hyperedge has repeated vertices");
    }
    if (e.front() < 1 || e.back() > n) {
      throw std::invalid_argument("hyperedge vertex outside [1..n]");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("duplicate hyperedge");
  }
}

namespace {

void check_shape(int n, int k, int r) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (k > n) throw std::invalid_argument("k exceeds n");
  if (r < 1) throw std::invalid_argument("r must be at least 1");
  if (r >= k) throw std::invalid_argument("r must be smaller than k");
}

}  // namespace

ModelParams resolve_params(int n, int k, int r, double lambda) {
  check_shape(n, k, r);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }
  const double trials = to_double(binomial(static_cast<std::uint64_t>(n - r),
                                           static_cast<std::uint64_t>(k - r)));
  if (lambda > trials) {
    throw std::invalid_argument("lambda exceeds C(n-r,k-r); p would exceed 1");
  }
  ModelParams params{n, k, r, lambda, lambda / trials};
  if (params.p > 1.0) params.p = 1.0;
  return params;
}

ModelParams params_from_probability(int n, int k, double p, int r) {
  check_shape(n, k, r);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  const double trials = to_double(binomial(static_cast<std::uint64_t>(n - r),
                                           static_cast<std::uint64_t>(k - r)));
  return ModelParams{n, k, r, p * trials, p};
}

namespace {

// C(m, j) for 0 <= m <= n, 0 <= j <= k, as 64-bit values.
class BinomialTable {
 public:
  BinomialTable(int n, int k) : k_(k), table_(static_cast<std::size_t>(n + 1) * (k + 1), 0) {
    for (int m = 0; m <= n; ++m) {
      for (int j = 0; j <= k; ++j) {
        table_[static_cast<std::size_t>(m) * (k + 1) + j] =
            binomial_u64(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(j));
      }
    }
  }
  std::uint64_t operator()(int m, int j) const {
    return table_[static_cast<std::size_t>(m) * (k_ + 1) + j];
  }

 private:
  int k_;
  std::vector<std::uint64_t> table_;
};

Hyperedge unrank_with(const BinomialTable& choose, std::uint64_t rank, int n, int k) {
  Hyperedge out(static_cast<std::size_t>(k));
  Vertex candidate = 1;
  for (int pos = 0; pos < k; ++pos) {
    for (;; ++candidate) {
      const std::uint64_t block = choose(n - candidate, k - pos - 1);
      if (rank < block) break;
      rank -= block;
    }
    out[static_cast<std::size_t>(pos)] = candidate++;
  }
  return out;
}

}  // namespace

Hypergraph sample_hypergraph(const ModelParams& params, std::uint64_t seed) {
  check_shape(params.n, params.k, params.r);
  const double p = params.p;
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  const int n = params.n;
  const int k = params.k;
  std::vector<Hyperedge> edges;
  if (p == 0.0) return Hypergraph(n, k, std::move(edges));

  const std::uint64_t total = binomial_u64(static_cast<std::uint64_t>(n),
                                           static_cast<std::uint64_t>(k));
  Engine engine(seed);
  if (p < 0.01) {
    const BinomialTable choose(n, k);
    // `next` is the rank of the first k-set whose Bernoulli trial is pending.
    std::uint64_t next = 0;
    while (next < total) {
      const std::uint64_t skip = geometric_failures(engine, p);
      if (skip >= total - next) break;
      next += skip;
      edges.push_back(unrank_with(choose, next, n, k));
      ++next;
    }
  } else {
    Hyperedge combo(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) combo[static_cast<std::size_t>(i)] = i + 1;
    do {
      if (bernoulli(engine, p)) edges.push_back(combo);
    } while (next_combination(combo, n));
  }
  return Hypergraph(n, k, std::move(edges));
}

std::int64_t degree(const Hypergraph& h, const RSet& s) {
  std::int64_t count = 0;
  for (const auto& e : h.edges()) {
    if (std::includes(e.begin(), e.end(), s.members().begin(), s.members().end())) ++count;
  }
  return count;
}

std::vector<std::vector<std::uint32_t>> incidence_lists(const Hypergraph& h) {
  std::vector<std::vector<std::uint32_t>> lists(static_cast<std::size_t>(h.n()) + 1);
  for (std::uint32_t i = 0; i < h.edges().size(); ++i) {
    for (Vertex v : h.edges()[i]) lists[static_cast<std::size_t>(v)].push_back(i);
  }
  return lists;
}

}  // namespace hyperlocal
