#pragma once

// Seeded generators for property tests.

#include "sps/iso_engine.hpp"
#include "sps/subproduct.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace sps::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  Complex complex() { return {real(-1.0, 1.0), real(-1.0, 1.0)}; }

  /// Integer weights in 1..9 with holes, normalised by the row sum.
  StochasticMatrix stochastic(Index d, double zero_prob = 0.4) {
    RationalMatrix w = RationalMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j)
        if (!coin(zero_prob)) w(i, j) = integer(1, 9);
      bool empty = true;
      for (Index j = 0; j < d; ++j) empty = empty && w(i, j) == 0;
      if (empty) w(i, integer(0, static_cast<int>(d) - 1)) = integer(1, 9);
    }
    return normalise(w);
  }

  /// A random cycle through every state plus random extra edges.
  StochasticMatrix irreducible(Index d, double extra_prob = 0.3) {
    RationalMatrix w = weights_irreducible(d, extra_prob);
    return normalise(w);
  }

  /// Block-diagonal irreducible blocks of the given sizes, states shuffled.
  StochasticMatrix essential(const std::vector<Index>& sizes, double extra_prob = 0.3) {
    Index d = 0;
    for (Index s : sizes) d += s;
    RationalMatrix w = RationalMatrix::Zero(d, d);
    Index offset = 0;
    for (Index s : sizes) {
      w.block(offset, offset, s, s) = weights_irreducible(s, extra_prob);
      offset += s;
    }
    return normalise(w).permuted(permutation(d));
  }

  Permutation permutation(Index d) {
    Permutation s = identity_permutation(d);
    std::shuffle(s.begin(), s.end(), rng_);
    return s;
  }

  Fiber fiber(const SupportSet& support, double density = 0.7) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(support.size, support.size);
    for (const auto& [i, j] : support.pairs)
      if (coin(density)) m(i, j) = complex();
    return Fiber::from_dense(support, m);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  RationalMatrix weights_irreducible(Index d, double extra_prob) {
    RationalMatrix w = RationalMatrix::Zero(d, d);
    const Permutation order = permutation(d);
    for (Index a = 0; a < d; ++a) w(order[a], order[(a + 1) % d]) = integer(1, 9);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        if (w(i, j) == 0 && coin(extra_prob)) w(i, j) = integer(1, 9);
    return w;
  }

  static StochasticMatrix normalise(RationalMatrix w) {
    for (Index i = 0; i < w.rows(); ++i) {
      Rational sum = 0;
      for (Index j = 0; j < w.cols(); ++j) sum += w(i, j);
      for (Index j = 0; j < w.cols(); ++j) w(i, j) /= sum;
    }
    return StochasticMatrix::from_entries(w);
  }

  std::mt19937_64 rng_;
};

inline RationalMatrix rationals(std::initializer_list<std::initializer_list<const char*>> rows) {
  RationalMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (const char* cell : row) m(i, j++) = parse_rational(cell);
    ++i;
  }
  return m;
}

inline StochasticMatrix matrix(std::initializer_list<std::initializer_list<const char*>> rows) {
  return StochasticMatrix::from_entries(rationals(rows));
}

/// Naive exact product, independent of the library's multiplication.
inline RationalMatrix naive_product(const RationalMatrix& a, const RationalMatrix& b) {
  RationalMatrix out = RationalMatrix::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < b.cols(); ++k)
      for (Index j = 0; j < a.cols(); ++j) out(i, k) += a(i, j) * b(j, k);
  return out;
}

inline RationalMatrix naive_power(const RationalMatrix& a, int n) {
  RationalMatrix out = RationalMatrix::Identity(a.rows(), a.cols());
  for (int s = 0; s < n; ++s) out = naive_product(out, a);
  return out;
}

/// State 0 splits between two absorbing states with weights r and 1 - r.
inline StochasticMatrix splitting_chain(const Rational& r) {
  RationalMatrix m = RationalMatrix::Zero(3, 3);
  m(0, 1) = r;
  m(0, 2) = 1 - r;
  m(1, 1) = 1;
  m(2, 2) = 1;
  return StochasticMatrix({"1", "2", "3"}, m);
}

/// [[r, 1 - r], [r, 1 - r]].
inline StochasticMatrix repeated_row(const Rational& r) {
  RationalMatrix m(2, 2);
  m << r, 1 - r, r, 1 - r;
  return StochasticMatrix::from_entries(m);
}

}  // namespace sps::testing
