#pragma once

#include "sps/subproduct.hpp"

#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace sps {

/// X_0 ⊕ X_1 ⊕ ... ⊕ X_N for the standard presentation of Arv(P). Coordinates
/// of X_n are the matrix units E_ij, (i, j) in E(P^n), in support order.
class TruncatedFock {
 public:
  TruncatedFock(const StochasticMatrix& p, int cap);
  explicit TruncatedFock(ArvSystem arv);

  int cap() const { return data_->arv.max_degree(); }
  Index size() const { return data_->arv.size(); }
  const ArvSystem& arv() const { return data_->arv; }
  const SupportSet& support(int n) const { return data_->arv.support(n); }
  Index dim(int n) const { return static_cast<Index>(support(n).pairs.size()); }

  /// Position of E_ij in the coordinates of X_n, or -1.
  Index coordinate(int n, Index i, Index j) const;

  Eigen::VectorXcd coordinates(const Fiber& a) const;
  Fiber fiber(int n, const Eigen::VectorXcd& coords) const;

  struct Data {
    ArvSystem arv;
    std::vector<std::map<std::pair<Index, Index>, Index>> index;
  };
  const std::shared_ptr<const Data>& data() const { return data_; }

 private:
  std::shared_ptr<const Data> data_;
};

/// A block operator on the truncated Fock module. Block (t, s) maps X_s to X_t
/// in matrix-unit coordinates; blocks with t > N are dropped.
class FockOperator {
 public:
  using Key = std::pair<int, int>;  // (target degree, source degree)

  explicit FockOperator(const TruncatedFock& fock);

  const std::map<Key, Eigen::MatrixXcd>& blocks() const { return blocks_; }
  const TruncatedFock& fock() const { return fock_; }

  /// Adds `m` to block (target, source); ignored when target exceeds the cap.
  void add_block(int target, int source, const Eigen::MatrixXcd& m);

  /// Common value of target - source over all blocks; 0 for the zero operator.
  std::optional<int> degree() const;
  bool homogeneous() const { return degree().has_value(); }

  /// The symbol A when this operator is shift(A).
  const std::optional<Fiber>& shift_symbol() const { return symbol_; }

  FockOperator operator+(const FockOperator& other) const;
  FockOperator operator-(const FockOperator& other) const;
  FockOperator operator*(const FockOperator& other) const;
  FockOperator operator*(Complex c) const;

  FockOperator conjugate_transpose() const;

  /// Image of a homogeneous vector; throws NotHomogeneous for mixed operators
  /// and DegreeOverflow when the image degree is outside 0..N.
  Fiber apply(const Fiber& x) const;

 private:
  friend FockOperator shift(const TruncatedFock&, const Fiber&);
  TruncatedFock fock_;
  std::map<Key, Eigen::MatrixXcd> blocks_;
  std::optional<Fiber> symbol_;
};

inline FockOperator operator*(Complex c, const FockOperator& t) { return t * c; }

FockOperator shift(const TruncatedFock& fock, const Fiber& a);
FockOperator adjoint(const FockOperator& s);

/// T_A = S applied to (sqrt P^n)^flat * A, and W_A(B) = A B.
FockOperator t_operator(const TruncatedFock& fock, const Fiber& a);
FockOperator w_operator(const TruncatedFock& fock, const Fiber& a);

/// Q_n and Q_{[n, N]}.
FockOperator degree_projection(const TruncatedFock& fock, int n);
FockOperator tail_projection(const TruncatedFock& fock, int n);
FockOperator identity_operator(const TruncatedFock& fock);

/// Exact max deviation of sum_{E(P^n)} S S^* from Q_{[n,N]}, via the squared
/// ratio identity; degrees below n are checked structurally.
Rational q_projection_identity(const TruncatedFock& fock, int n);

/// The same assembled in floating point, as an operator norm.
double q_projection_numeric(const TruncatedFock& fock, int n);

FockOperator fourier(const FockOperator& t, int k);
FockOperator cesaro(const FockOperator& t, int m);

/// Largest over columns j of the spectral norm of the column-j restriction.
double op_norm(const FockOperator& t);

struct NormSequence {
  std::vector<int> degrees;
  std::vector<double> values;
  double estimate = 0.0;
  bool converged = false;
  int cap = 0;
};

/// ‖T Q_n‖ for n in [first, last] with a tail-max estimate of the limsup.
NormSequence quotient_norm_estimate(const FockOperator& t, int first, int last);

struct CmTable {
  int n = 0;
  std::vector<int> degrees;           // m = 1..window
  std::vector<double> max_value;      // max over triples of c_m(i,j,k)
  std::vector<Triple> argmax;
  std::optional<int> first_below;     // first m with max < threshold
  bool converged = false;
  double threshold = 1e-6;
};

CmTable cm_convergence(const StochasticMatrix& p, int n, int window, double threshold = 1e-6);

/// c_m(i, j, k) for a single triple; 0 off E(P^n, P^m).
double cm_value(const ArvSystem& arv, int n, int m, Index i, Index j, Index k);

/// ‖(T_A - W_A) Q_m‖ for m = 1..window.
NormSequence tw_gap(const StochasticMatrix& p, const Fiber& a, int window, double threshold = 1e-6);

}  // namespace sps
