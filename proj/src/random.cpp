#include "hyperlocal/random.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hyperlocal {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double uniform_open_closed(Engine& engine) {
  return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine();
  } while (x >= limit);
  return x % bound;
}

bool bernoulli(Engine& engine, double p) { return uniform01(engine) < p; }

std::uint64_t geometric_failures(Engine& engine, double p) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("geometric_failures: p must lie in (0,1]");
  if (p == 1.0) return 0;
  const double u = uniform_open_closed(engine);
  const double g = std::floor(std::log(u) / std::log1p(-p));
  if (g >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(g);
}

namespace {

std::uint64_t poisson_inversion(Engine& engine, double lambda) {
  const double u = uniform01(engine);
  double term = std::exp(-lambda);
  double cdf = term;
  std::uint64_t k = 0;
  while (u >= cdf) {
    ++k;
    term *= lambda / static_cast<double>(k);
    const double next = cdf + term;
    if (next == cdf) break;  // remaining mass below double resolution
    cdf = next;
  }
  return k;
}

std::uint64_t poisson_ptrs(Engine& engine, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = uniform01(engine) - 0.5;
    const double v = uniform01(engine);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t poisson(Engine& engine, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("poisson: lambda must be finite and nonnegative");
  }
  if (lambda == 0.0) return 0;
  if (lambda <= 30.0) return poisson_inversion(engine, lambda);
  return poisson_ptrs(engine, lambda);
}

}  // namespace hyperlocal
