#pragma once

#include "sps/chain_structure.hpp"
#include "sps/subproduct.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sps {

enum class Answer { Yes, No, Unknown };
enum class CertificateMode { Graph, Weighted, RatioUpToN, BlockSizes };

const char* to_string(Answer a);
const char* to_string(CertificateMode m);

using Permutation = std::vector<Index>;

Permutation identity_permutation(Index d);
Permutation inverse(const Permutation& sigma);

/// sigma carries state i of P to state sigma[i] of Q.
struct SimilarityCertificate {
  Permutation sigma;
  CertificateMode mode = CertificateMode::Graph;
  int cutoff = 0;
  std::optional<double> family_bound;
};

struct Verdict {
  Answer answer = Answer::Unknown;
  std::optional<SimilarityCertificate> certificate;
  std::string reason;
  std::optional<RatioViolation> violation;
};

Verdict find_graph_iso(const StochasticMatrix& p, const StochasticMatrix& q);
Verdict find_weighted_iso(const StochasticMatrix& p, const StochasticMatrix& q);
Verdict find_ratio_iso(const StochasticMatrix& p, const StochasticMatrix& q, int cutoff = 12);

Verdict decide_isometric(const StochasticMatrix& p, const StochasticMatrix& q, int cutoff = 12);
Verdict decide_algebraic(const StochasticMatrix& p, const StochasticMatrix& q);

/// Re-checks a certificate directly: graph equality, matrix equality, or a
/// ratio-check rerun at the recorded cutoff.
bool certificate_valid(const StochasticMatrix& p, const StochasticMatrix& q, const SimilarityCertificate& c);

struct SimilarityReport {
  int max_degree = 0;
  std::vector<double> forward;   // per n: max P^n_ij / Q^n_{si sj} over E(P^n)
  std::vector<double> backward;  // per n: max Q^n_{si sj} / P^n_ij
  /// ratio(i, j) in the limit: pi^P_j / pi^Q_{sigma j}, zero off the
  /// eventual support.
  Eigen::MatrixXd limit_ratio;
  double limit_forward = 0.0;
  double limit_backward = 0.0;
  double family_bound = 0.0;  // sqrt of the largest ratio seen
};

/// V_n(A) = (sqrt Q^n)^flat * [R_sigma (sqrt P^n * A) R_sigma^{-1}] for n <= N.
class SimilarityFamily {
 public:
  SimilarityFamily(const StochasticMatrix& p, const StochasticMatrix& q, Permutation sigma, int max_degree);

  const Permutation& sigma() const { return sigma_; }
  const ArvSystem& source() const { return p_; }
  const ArvSystem& target() const { return q_; }
  const SimilarityReport& report() const { return report_; }

  Fiber apply(const Fiber& a) const;
  Fiber apply_inverse(const Fiber& b) const;

  /// Exact P^n_ij / Q^n_{si sj}.
  Rational ratio(int n, Index i, Index j) const;

 private:
  Permutation sigma_;
  ArvSystem p_;
  ArvSystem q_;
  SimilarityReport report_;
};

SimilarityFamily build_similarity(const StochasticMatrix& p, const StochasticMatrix& q, const Permutation& sigma,
                                  int max_degree);

}  // namespace sps
