#include "sps/iso_engine.hpp"

#include "sps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <tuple>

namespace sps {
namespace {

// Everything a permutation must preserve state by state.
struct StateProfile {
  std::size_t out_degree = 0;
  std::size_t in_degree = 0;
  bool loop = false;
  std::size_t class_size = 0;
  int class_period = 0;
  bool essential = false;
  std::vector<Rational> row;  // sorted, weighted search only
  std::vector<Rational> col;

  bool operator==(const StateProfile&) const = default;
};

std::vector<StateProfile> profiles(const StochasticMatrix& p, bool weighted) {
  const Index d = p.size();
  const auto dec = communicating_classes(p);
  const auto succ = successors(p);
  std::vector<int> periods;
  for (const auto& c : dec.classes) periods.push_back(class_period(succ, c).value_or(0));

  std::vector<StateProfile> out(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    auto& s = out[i];
    s.class_size = dec.classes[dec.class_of[i]].size();
    s.class_period = periods[dec.class_of[i]];
    s.essential = dec.essential[dec.class_of[i]];
    s.loop = p.positive(i, i);
    p.for_each_nonzero(i, [&](Index j, const Rational& v) {
      ++s.out_degree;
      ++out[j].in_degree;
      if (weighted) {
        s.row.push_back(v);
        out[j].col.push_back(v);
      }
    });
  }
  for (auto& s : out) {
    std::sort(s.row.begin(), s.row.end());
    std::sort(s.col.begin(), s.col.end());
  }
  return out;
}

using Pruner = std::function<bool(const Permutation&, const std::vector<char>&, Index)>;
using Visitor = std::function<bool(const Permutation&)>;  // true stops the search

// Backtracking over states of P in index order; candidates for each state are
// the unused states of Q with an equal profile, taken in index order.
class Search {
 public:
  Search(const StochasticMatrix& p, const StochasticMatrix& q, bool weighted)
      : p_(p), q_(q), weighted_(weighted), pp_(profiles(p, weighted)), qp_(profiles(q, weighted)) {}

  // Returns true if the visitor asked to stop.
  bool run(const Visitor& visit, const Pruner& prune = nullptr) {
    const Index d = p_.size();
    if (!profile_multisets_match()) return false;
    sigma_.assign(static_cast<std::size_t>(d), -1);
    assigned_.assign(static_cast<std::size_t>(d), 0);
    used_.assign(static_cast<std::size_t>(d), 0);
    return step(0, visit, prune);
  }

 private:
  bool profile_multisets_match() const {
    auto a = pp_;
    auto b = qp_;
    auto key = [](const StateProfile& s) {
      return std::tie(s.out_degree, s.in_degree, s.loop, s.class_size, s.class_period, s.essential, s.row, s.col);
    };
    auto less = [&](const StateProfile& x, const StateProfile& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    return a == b;
  }

  bool edge_matches(Index a, Index b) const {
    if (weighted_) return p_.coeff(a, b) == q_.coeff(sigma_[a], sigma_[b]);
    return p_.positive(a, b) == q_.positive(sigma_[a], sigma_[b]);
  }

  bool consistent(Index i) const {
    for (Index a = 0; a <= i; ++a)
      if (!edge_matches(i, a) || !edge_matches(a, i)) return false;
    return true;
  }

  bool step(Index i, const Visitor& visit, const Pruner& prune) {
    const Index d = p_.size();
    if (i == d) return visit(sigma_);
    for (Index t = 0; t < d; ++t) {
      if (used_[t] || !(pp_[i] == qp_[t])) continue;
      sigma_[i] = t;
      used_[t] = 1;
      assigned_[i] = 1;
      if (consistent(i) && (!prune || prune(sigma_, assigned_, i)) && step(i + 1, visit, prune)) return true;
      assigned_[i] = 0;
      used_[t] = 0;
      sigma_[i] = -1;
    }
    return false;
  }

  const StochasticMatrix& p_;
  const StochasticMatrix& q_;
  bool weighted_;
  std::vector<StateProfile> pp_;
  std::vector<StateProfile> qp_;
  Permutation sigma_;
  std::vector<char> assigned_;
  std::vector<char> used_;
};

void require_same_size(const StochasticMatrix& p, const StochasticMatrix& q) {
  if (p.size() != q.size())
    throw SizeMismatch("state counts differ: " + std::to_string(p.size()) + " vs " + std::to_string(q.size()));
}

std::optional<Permutation> first_iso(const StochasticMatrix& p, const StochasticMatrix& q, bool weighted) {
  std::optional<Permutation> found;
  Search(p, q, weighted).run([&](const Permutation& s) {
    found = s;
    return true;
  });
  return found;
}

Verdict size_mismatch_no(const StochasticMatrix& p, const StochasticMatrix& q) {
  return {Answer::No, std::nullopt,
          "state counts differ (" + std::to_string(p.size()) + " vs " + std::to_string(q.size()) + ")",
          std::nullopt};
}

}  // namespace

const char* to_string(Answer a) {
  switch (a) {
    case Answer::Yes: return "YES";
    case Answer::No: return "NO";
    case Answer::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

const char* to_string(CertificateMode m) {
  switch (m) {
    case CertificateMode::Graph: return "graph";
    case CertificateMode::Weighted: return "weighted";
    case CertificateMode::RatioUpToN: return "eq31_up_to_N";
    case CertificateMode::BlockSizes: return "block_sizes";
  }
  return "graph";
}

Permutation identity_permutation(Index d) {
  Permutation out(static_cast<std::size_t>(d));
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

Permutation inverse(const Permutation& sigma) {
  Permutation out(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) out[sigma[i]] = static_cast<Index>(i);
  return out;
}

Verdict find_graph_iso(const StochasticMatrix& p, const StochasticMatrix& q) {
  require_same_size(p, q);
  if (auto s = first_iso(p, q, false))
    return {Answer::Yes, SimilarityCertificate{*s, CertificateMode::Graph, 0, std::nullopt}, "graph isomorphism found",
            std::nullopt};
  return {Answer::No, std::nullopt, "no permutation carries Gr(P) onto Gr(Q) (search exhausted)", std::nullopt};
}

Verdict find_weighted_iso(const StochasticMatrix& p, const StochasticMatrix& q) {
  require_same_size(p, q);
  if (auto s = first_iso(p, q, true))
    return {Answer::Yes, SimilarityCertificate{*s, CertificateMode::Weighted, 0, std::nullopt},
            "permutation carries P onto Q entry by entry", std::nullopt};
  return {Answer::No, std::nullopt, "no permutation carries P onto Q exactly (search exhausted)", std::nullopt};
}

Verdict find_ratio_iso(const StochasticMatrix& p, const StochasticMatrix& q, int cutoff) {
  require_same_size(p, q);
  const auto graph = first_iso(p, q, false);
  if (!graph) return {Answer::No, std::nullopt, "no graph isomorphism, so the ratio identity cannot hold", std::nullopt};

  const RatioChecker checker(p, q, cutoff);
  std::optional<Permutation> found;
  Search(p, q, false)
      .run(
          [&](const Permutation& s) {
            if (!checker.check(s).holds) return false;
            found = s;
            return true;
          },
          [&](const Permutation& s, const std::vector<char>& assigned, Index newest) {
            return checker.consistent_partial(s, assigned, newest);
          });
  if (found)
    return {Answer::Yes, SimilarityCertificate{*found, CertificateMode::RatioUpToN, cutoff, std::nullopt},
            "ratio identity holds for all n + m <= " + std::to_string(cutoff), std::nullopt};

  Verdict out{Answer::No, std::nullopt,
              "every graph isomorphism violates the ratio identity at some total degree <= " + std::to_string(cutoff),
              checker.check(*graph).first_violation};
  return out;
}

Verdict decide_isometric(const StochasticMatrix& p, const StochasticMatrix& q, int cutoff) {
  if (p.size() != q.size()) return size_mismatch_no(p, q);
  if (is_essential(p) && is_essential(q)) {
    Verdict v = find_weighted_iso(p, q);
    v.reason = std::string(v.answer == Answer::Yes ? "both essential; weighted isomorphism found"
                                                   : "both essential; no weighted isomorphism exists");
    return v;
  }
  if (Verdict w = find_weighted_iso(p, q); w.answer == Answer::Yes) {
    w.reason = "weighted isomorphism found";
    return w;
  }
  Verdict v = find_ratio_iso(p, q, cutoff);
  if (v.answer == Answer::No) return v;
  v.answer = Answer::Unknown;
  v.reason = "not both essential; ratio identity holds up to total degree " + std::to_string(cutoff) +
             " but no finite check settles all degrees";
  return v;
}

Verdict decide_algebraic(const StochasticMatrix& p, const StochasticMatrix& q) {
  if (p.size() != q.size()) return size_mismatch_no(p, q);
  Verdict v = find_graph_iso(p, q);
  if (is_essential(p) && is_essential(q)) {
    v.reason = std::string(v.answer == Answer::Yes ? "both essential; graph isomorphism found"
                                                   : "both essential; no graph isomorphism exists");
    return v;
  }
  if (v.answer == Answer::No) {
    v.reason = "no graph isomorphism, so no bounded similarity exists";
    return v;
  }
  if (Verdict w = find_weighted_iso(p, q); w.answer == Answer::Yes) {
    w.reason = "weighted isomorphism found";
    return w;
  }
  v.answer = Answer::Unknown;
  v.reason = "not both essential; graph isomorphism exists but is not known to suffice";
  return v;
}

bool certificate_valid(const StochasticMatrix& p, const StochasticMatrix& q, const SimilarityCertificate& c) {
  if (p.size() != q.size() || static_cast<Index>(c.sigma.size()) != p.size()) return false;
  switch (c.mode) {
    case CertificateMode::Graph:
      for (Index i = 0; i < p.size(); ++i)
        for (Index j = 0; j < p.size(); ++j)
          if (p.positive(i, j) != q.positive(c.sigma[i], c.sigma[j])) return false;
      return true;
    case CertificateMode::Weighted:
      return p.permuted(c.sigma).same_entries(q);
    case CertificateMode::RatioUpToN: {
      const RatioChecker checker(p, q, c.cutoff);
      return checker.graph_iso(c.sigma) && checker.check(c.sigma).holds;
    }
    case CertificateMode::BlockSizes: {
      const auto dp = communicating_classes(p);
      const auto dq = communicating_classes(q);
      for (const auto& cls : dp.classes) {
        std::vector<Index> image;
        for (Index s : cls) image.push_back(c.sigma[s]);
        std::sort(image.begin(), image.end());
        if (image != dq.classes[dq.class_of[image.front()]]) return false;
      }
      return true;
    }
  }
  return false;
}

SimilarityFamily::SimilarityFamily(const StochasticMatrix& p, const StochasticMatrix& q, Permutation sigma,
                                   int max_degree)
    : sigma_(std::move(sigma)), p_(p, max_degree), q_(q, max_degree) {
  require_same_size(p, q);
  if (!certificate_valid(p, q, {sigma_, CertificateMode::Graph, 0, std::nullopt}))
    throw NotGraphIso("permutation is not a graph isomorphism");
  const auto dp = communicating_classes(p);
  if (!dp.all_essential() || !is_essential(q)) throw NotEssential("similarity family needs essential matrices");

  const Index d = p.size();
  report_.max_degree = max_degree;
  report_.forward.push_back(1.0);
  report_.backward.push_back(1.0);
  double worst = 1.0;
  for (int n = 1; n <= max_degree; ++n) {
    double fwd = 0.0, bwd = 0.0;
    for (const auto& [i, j] : p_.support(n).pairs) {
      const double r = to_double(ratio(n, i, j));
      fwd = std::max(fwd, r);
      bwd = std::max(bwd, 1.0 / r);
    }
    report_.forward.push_back(fwd);
    report_.backward.push_back(bwd);
    worst = std::max({worst, fwd, bwd});
  }

  // Within an essential class both chains settle to pi_j r in the admissible
  // residue, and sigma preserves periods, so the ratio tends to pi^P_j / pi^Q_{sj}.
  report_.limit_ratio = Eigen::MatrixXd::Zero(d, d);
  for (const auto& cls : dp.classes) {
    std::vector<Index> image;
    for (Index s : cls) image.push_back(sigma_[s]);
    const auto pi_p = stationary(p.restricted(cls)).weights;
    const auto pi_q = stationary(q.restricted(image)).weights;
    for (std::size_t a = 0; a < cls.size(); ++a)
      for (std::size_t b = 0; b < cls.size(); ++b) {
        const double r = to_double(Rational(pi_p(static_cast<Index>(b)) / pi_q(static_cast<Index>(b))));
        report_.limit_ratio(cls[a], cls[b]) = r;
        report_.limit_forward = std::max(report_.limit_forward, r);
        report_.limit_backward = std::max(report_.limit_backward, 1.0 / r);
      }
  }
  worst = std::max({worst, report_.limit_forward, report_.limit_backward});
  report_.family_bound = std::sqrt(worst);
}

Rational SimilarityFamily::ratio(int n, Index i, Index j) const {
  return p_.power(n).coeff(i, j) / q_.power(n).coeff(sigma_[i], sigma_[j]);
}

Fiber SimilarityFamily::apply(const Fiber& a) const {
  const int n = a.degree();
  const auto& root = p_.sqrt(n);
  const auto& inv = q_.flat_sqrt(n);
  std::vector<Eigen::Triplet<Complex>> out;
  for (Index c = 0; c < a.entries().outerSize(); ++c)
    for (SparseComplex::InnerIterator it(a.entries(), c); it; ++it) {
      const Index si = sigma_[it.row()], sj = sigma_[it.col()];
      out.emplace_back(si, sj, it.value() * root(it.row(), it.col()) * inv(si, sj));
    }
  SparseComplex m(a.size(), a.size());
  m.setFromTriplets(out.begin(), out.end());
  return Fiber(q_.support(n), std::move(m));
}

Fiber SimilarityFamily::apply_inverse(const Fiber& b) const {
  const int n = b.degree();
  const auto& root = q_.sqrt(n);
  const auto& inv = p_.flat_sqrt(n);
  const Permutation back = inverse(sigma_);
  std::vector<Eigen::Triplet<Complex>> out;
  for (Index c = 0; c < b.entries().outerSize(); ++c)
    for (SparseComplex::InnerIterator it(b.entries(), c); it; ++it) {
      const Index i = back[it.row()], j = back[it.col()];
      out.emplace_back(i, j, it.value() * root(it.row(), it.col()) * inv(i, j));
    }
  SparseComplex m(b.size(), b.size());
  m.setFromTriplets(out.begin(), out.end());
  return Fiber(p_.support(n), std::move(m));
}

SimilarityFamily build_similarity(const StochasticMatrix& p, const StochasticMatrix& q, const Permutation& sigma,
                                  int max_degree) {
  return SimilarityFamily(p, q, sigma, max_degree);
}

}  // namespace sps
