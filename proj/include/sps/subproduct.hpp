#pragma once

#include "sps/matrix_core.hpp"

#include <Eigen/SparseCore>

#include <optional>
#include <span>
#include <vector>

namespace sps {

using SparseComplex = Eigen::SparseMatrix<Complex>;

/// Precomputed degree data for the standard presentation of Arv(P):
/// exact powers, their supports and the numeric Schur factors, degrees 0..N.
class ArvSystem {
 public:
  ArvSystem(const StochasticMatrix& p, int max_degree);

  /// Builds the system from an arbitrary power table; lets tests feed a
  /// table that is not a power sequence.
  static ArvSystem from_powers(std::vector<StochasticMatrix> table);

  int max_degree() const { return static_cast<int>(powers_.size()) - 1; }
  Index size() const { return powers_.front().size(); }
  const StochasticMatrix& matrix() const { return powers_.at(1); }

  const StochasticMatrix& power(int n) const;
  const SupportSet& support(int n) const;
  const Eigen::MatrixXd& sqrt(int n) const;
  const Eigen::MatrixXd& flat_sqrt(int n) const;

 private:
  ArvSystem() = default;
  void check(int n) const;

  std::vector<StochasticMatrix> powers_;
  std::vector<SupportSet> supports_;
  std::vector<Eigen::MatrixXd> sqrt_;
  std::vector<Eigen::MatrixXd> flat_;
};

struct DiagonalElement {
  Eigen::VectorXcd values;

  static DiagonalElement projection(Index size, Index i);
};

/// An element of Arv(P)_n: a complex matrix vanishing off E(P^n).
class Fiber {
 public:
  /// Throws OffSupport if `entries` has a non-zero outside `support`.
  Fiber(const SupportSet& support, SparseComplex entries);

  static Fiber unit(const SupportSet& support, Index i, Index j);
  static Fiber zero(const SupportSet& support);
  static Fiber from_dense(const SupportSet& support, const Eigen::MatrixXcd& entries);

  int degree() const { return degree_; }
  Index size() const { return entries_.rows(); }
  const SparseComplex& entries() const { return entries_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(entries_); }
  Complex coeff(Index i, Index j) const { return entries_.coeff(i, j); }

  /// max over columns of the Euclidean column norm.
  double norm() const;

  Fiber operator+(const Fiber& other) const;
  Fiber operator-(const Fiber& other) const;
  Fiber operator*(Complex c) const;

  /// a . A and A . a for a diagonal element a.
  Fiber left(const DiagonalElement& a) const;
  Fiber right(const DiagonalElement& a) const;

 private:
  Fiber(int degree, SparseComplex entries) : degree_(degree), entries_(std::move(entries)) {}
  int degree_ = 0;
  SparseComplex entries_;
};

Fiber fiber_unit(const ArvSystem& arv, int n, Index i, Index j);

/// Diag(A^* B).
DiagonalElement inner(const Fiber& a, const Fiber& b);

/// The product map U_{n,m}; degree 0 factors act as the diagonal bimodule action.
Fiber umap(const ArvSystem& arv, const Fiber& a, const Fiber& b);
Fiber umap(const ArvSystem& arv, int n, int m, const Fiber& a, const Fiber& b);

/// max over (i,k) in E(P^{n+m}) of |1 - sum_j P^n_ij P^m_jk / P^{n+m}_ik|.
Rational coisometry_defect(const ArvSystem& arv, int n, int m);
Rational coisometry_defect(const StochasticMatrix& p, int n, int m);

struct RatioViolation {
  int n = 0;
  int m = 0;
  Index i = 0;
  Index j = 0;
  Index k = 0;
};

struct RatioCheck {
  bool holds = true;
  int cutoff = 0;
  std::optional<RatioViolation> first_violation;
};

/// Compares P^n_ij P^m_jk / P^{n+m}_ik with the same ratio for Q at the
/// sigma-images, exactly, for all n, m >= 1 with n + m <= cutoff. The first
/// violation is reported in order of total degree, then n, then (i, j, k).
/// Throws GraphMismatch if sigma does not carry Gr(P) onto Gr(Q).
class RatioChecker {
 public:
  RatioChecker(const StochasticMatrix& p, const StochasticMatrix& q, int cutoff);

  RatioCheck check(std::span<const Index> sigma) const;
  bool graph_iso(std::span<const Index> sigma) const;
  int cutoff() const { return cutoff_; }

  /// Checks only the triples whose three states are assigned and include
  /// `newest`; used to prune a permutation search.
  bool consistent_partial(std::span<const Index> sigma, std::span<const char> assigned, Index newest) const;

 private:
  struct Block {
    int n;
    int m;
    std::vector<Triple> triples;
  };
  bool holds_at(const Block& b, const Triple& t, std::span<const Index> sigma) const;

  int cutoff_;
  std::vector<StochasticMatrix> p_;
  std::vector<StochasticMatrix> q_;
  std::vector<Block> blocks_;
};

RatioCheck ratio_check(const StochasticMatrix& p, const StochasticMatrix& q, std::span<const Index> sigma,
                      int cutoff = 12);

}  // namespace sps
