#pragma once

#include "sps/rational.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

namespace sps {

/// Row-stochastic matrix with exact rational entries and named states.
///
/// Entries are kept dense below kSparseThreshold states and in a row-major
/// sparse matrix from there on. Both layouts answer the same queries; callers
/// never need to know which one is active. Instances are immutable.
class StochasticMatrix {
 public:
  using Dense = RationalMatrix;
  using Sparse = Eigen::SparseMatrix<Rational, Eigen::RowMajor>;
  static constexpr Index kSparseThreshold = 64;

  /// Validates: square, labels unique and matching, entries >= 0, rows sum to 1.
  StochasticMatrix(std::vector<std::string> states, const RationalMatrix& entries);

  /// Skips validation. Used for products of already-validated matrices and for
  /// deliberately broken fixtures in tests.
  static StochasticMatrix unvalidated(std::vector<std::string> states, const RationalMatrix& entries);

  static StochasticMatrix identity(Index d);

  /// Labels default to "0", "1", ...
  static StochasticMatrix from_entries(const RationalMatrix& entries);

  Index size() const { return static_cast<Index>(states_.size()); }
  const std::vector<std::string>& states() const { return states_; }
  std::optional<Index> index_of(std::string_view label) const;

  Rational coeff(Index i, Index j) const;
  bool positive(Index i, Index j) const { return coeff(i, j) > 0; }
  bool is_sparse() const { return std::holds_alternative<Sparse>(entries_); }

  RationalMatrix dense() const;
  Eigen::MatrixXd to_double() const;

  /// Calls f(column, value) for every stored non-zero entry of a row, in
  /// increasing column order.
  template <typename F>
  void for_each_nonzero(Index row, F&& f) const {
    if (const auto* d = std::get_if<Dense>(&entries_)) {
      for (Index j = 0; j < d->cols(); ++j)
        if ((*d)(row, j) != 0) f(j, (*d)(row, j));
    } else {
      const auto& s = std::get<Sparse>(entries_);
      for (Sparse::InnerIterator it(s, row); it; ++it)
        if (it.value() != 0) f(it.col(), it.value());
    }
  }

  /// R_sigma P R_sigma^{-1}: the matrix Q with Q(sigma i, sigma j) = P(i, j),
  /// carrying labels along.
  StochasticMatrix permuted(std::span<const Index> sigma) const;

  /// Principal submatrix on the given states (in the given order), unvalidated.
  StochasticMatrix restricted(std::span<const Index> states) const;

  friend StochasticMatrix operator*(const StochasticMatrix& a, const StochasticMatrix& b);
  bool same_entries(const StochasticMatrix& other) const;

 private:
  StochasticMatrix(std::vector<std::string> states, std::variant<Dense, Sparse> entries)
      : states_(std::move(states)), entries_(std::move(entries)) {}
  static std::variant<Dense, Sparse> store(const RationalMatrix& entries);

  std::vector<std::string> states_;
  std::variant<Dense, Sparse> entries_;
};

/// E(P^n): the (i, j) pairs where P^(n)_ij > 0, sorted lexicographically.
struct SupportSet {
  int degree = 0;
  Index size = 0;
  std::vector<std::pair<Index, Index>> pairs;

  bool contains(Index i, Index j) const;
};

/// E(P^n, P^m): triples (i, j, k) with P^(n)_ij > 0 and P^(m)_jk > 0.
using Triple = std::tuple<Index, Index, Index>;

enum class SchurRole { Sqrt, Flat, Plain };

template <typename Scalar>
struct SchurMatrix {
  Matrix<Scalar> entries;
  SchurRole role = SchurRole::Plain;
};

// --- Schur calculus on plain Eigen matrices --------------------------------

/// Entrywise square root, (sqrt P)_ik = sqrt(P_ik).
template <typename Derived>
Matrix<typename Derived::Scalar> schur_sqrt(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseSqrt();
}

/// Entrywise reciprocal on the support and zero off it.
template <typename Derived>
Matrix<typename Derived::Scalar> flat(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return m.unaryExpr([](const Scalar& x) { return x != Scalar(0) ? Scalar(Scalar(1) / x) : Scalar(0); });
}

/// 0/1 indicator of the support, Gr(P).
template <typename Derived>
Matrix<typename Derived::Scalar> graph_of(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return m.unaryExpr([](const Scalar& x) { return x != Scalar(0) ? Scalar(1) : Scalar(0); });
}

/// The Schur (entrywise) product A * B.
template <typename DerivedA, typename DerivedB>
auto schur(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return a.cwiseProduct(b);
}

// --- operations ------------------------------------------------------------

StochasticMatrix load(const std::filesystem::path& path);
StochasticMatrix load_text(std::string_view json_text);

/// Exact P^n; n = 0 gives the identity.
StochasticMatrix power(const StochasticMatrix& p, int n);

/// P^0, P^1, ..., P^max_degree computed incrementally.
std::vector<StochasticMatrix> powers(const StochasticMatrix& p, int max_degree);

SupportSet support_of(const StochasticMatrix& pn, int degree);
SupportSet support(const StochasticMatrix& p, int n);

std::vector<Triple> triple_support(const StochasticMatrix& pn, const StochasticMatrix& pm);

/// sqrt(P^n) and (sqrt(P^n))^flat in double precision with the exact support of P^n.
std::pair<SchurMatrix<double>, SchurMatrix<double>> schur_ops(const StochasticMatrix& pn);
std::pair<SchurMatrix<double>, SchurMatrix<double>> schur_ops(const StochasticMatrix& p, int n);

}  // namespace sps
