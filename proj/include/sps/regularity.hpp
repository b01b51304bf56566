#pragma once

#include "sps/subproduct.hpp"

#include <complex>
#include <optional>
#include <set>
#include <vector>

namespace sps {

/// A walk with no immediate repetition; length = number of steps.
struct StreamlinedPath {
  std::vector<Index> vertices;
  int length() const { return static_cast<int>(vertices.size()) - 1; }
};

struct ReducingCheck {
  bool reducing = true;
  std::optional<StreamlinedPath> witness;  // s -> ... -> t leaving S, when not reducing
};

/// Whether every path between members of S stays in S.
ReducingCheck is_reducing(const StochasticMatrix& p, const std::vector<Index>& states);

/// A shortest streamlined cycle through i, if any.
std::optional<StreamlinedPath> streamlined_cycle_through(const StochasticMatrix& p, Index i);

struct SingularityReport {
  int cap = 0;                                  // longest streamlined witness searched
  std::vector<Index> reducing_states;           // {i} reducing
  std::vector<Index> candidate_singular;        // reducing and P_ii > 0
  std::vector<std::vector<Index>> classes;      // partition of candidate_singular
  std::vector<Index> representatives;           // lowest index per class
  std::vector<Index> class_of;                  // state -> class position, -1 if not a candidate
  /// through[c][i][k]: lengths <= cap of streamlined paths i -> k visiting candidate c.
  std::vector<std::vector<std::vector<std::set<int>>>> through;
};

SingularityReport singularity_report(const StochasticMatrix& p);

struct ProperTriple {
  bool proper = false;
  std::optional<Index> class_index;           // position in report.classes
  std::optional<Index> representative;
  std::optional<int> length;                  // smallest witnessing length
  std::set<int> lengths;                      // every witnessing length < n
  bool consistent = true;                     // one length and one class among witnesses
};

/// Throws OffSupport when (i, k) is not in E(P^n).
ProperTriple proper_triple(const StochasticMatrix& p, const SingularityReport& report, Index i, Index k, int n);
ProperTriple proper_triple(const ArvSystem& arv, const SingularityReport& report, Index i, Index k, int n);

struct GaugeFamily {
  int max_degree = 0;
  /// scale[n](i, k): the factor multiplying E_ik in degree n; zero off E(P^n).
  std::vector<Eigen::MatrixXcd> scale;
  /// max |U(V_n A ⊗ V_m B) - V_{n+m} U(A ⊗ B)| over matrix units, n + m <= max_degree.
  double multiplicativity_defect = 0.0;
  bool consistent = true;  // every proper triple had a unique witness length
};

/// lambda[c] is the unit scalar for class c of the report.
GaugeFamily gauge_family(const StochasticMatrix& p, const SingularityReport& report,
                         const std::vector<Complex>& lambda, int max_degree);

/// z -> e^{i theta} (z - w) / (1 - conj(w) z), |w| < 1.
struct MoebiusMap {
  double theta = 0.0;
  Complex w{0.0, 0.0};

  Complex operator()(Complex z) const;
  Complex inverse(Complex z) const;
};

struct Regularization {
  Complex lambda{1.0, 0.0};
  Complex mu{1.0, 0.0};
  double residual = 0.0;
};

/// Unit scalars with T(mu * T^{-1}(lambda * T(0))) = 0 to within 1e-12.
Regularization moebius_regularize(const MoebiusMap& t);

}  // namespace sps
