#include "sps/subproduct.hpp"

#include "sps/errors.hpp"

#include <cmath>

namespace sps {
namespace {

// Multiplies every stored entry (i, j) by w(i, j).
SparseComplex weighted(const SparseComplex& a, const Eigen::MatrixXd& w) {
  SparseComplex out = a;
  for (Index c = 0; c < out.outerSize(); ++c)
    for (SparseComplex::InnerIterator it(out, c); it; ++it) it.valueRef() *= w(it.row(), it.col());
  out.prune(Complex(0.0));
  return out;
}

Rational ratio_defect(const StochasticMatrix& pn, const StochasticMatrix& pm, const StochasticMatrix& pnm) {
  const Index d = pn.size();
  Rational worst = 0;
  for (Index i = 0; i < d; ++i) {
    RationalVector sum = RationalVector::Zero(d);
    pn.for_each_nonzero(i, [&](Index j, const Rational& x) {
      pm.for_each_nonzero(j, [&](Index k, const Rational& y) { sum(k) += x * y; });
    });
    pnm.for_each_nonzero(i, [&](Index k, const Rational& z) {
      Rational gap = abs(Rational(1 - sum(k) / z));
      if (gap > worst) worst = gap;
    });
    // Mass of the product landing off the stored support.
    for (Index k = 0; k < d; ++k)
      if (sum(k) != 0 && pnm.coeff(i, k) == 0) worst = std::max(worst, Rational(1));
  }
  return worst;
}

}  // namespace

ArvSystem::ArvSystem(const StochasticMatrix& p, int max_degree) {
  if (max_degree < 1) throw DegreeOverflow("maximum degree must be at least 1");
  *this = from_powers(powers(p, max_degree));
}

ArvSystem ArvSystem::from_powers(std::vector<StochasticMatrix> table) {
  ArvSystem out;
  out.powers_ = std::move(table);
  for (std::size_t n = 0; n < out.powers_.size(); ++n) {
    out.supports_.push_back(support_of(out.powers_[n], static_cast<int>(n)));
    auto [root, inv] = schur_ops(out.powers_[n]);
    out.sqrt_.push_back(std::move(root.entries));
    out.flat_.push_back(std::move(inv.entries));
  }
  return out;
}

void ArvSystem::check(int n) const {
  if (n < 0) throw DegreeMismatch("negative degree");
  if (n > max_degree())
    throw DegreeOverflow("degree " + std::to_string(n) + " exceeds cap " + std::to_string(max_degree()));
}

const StochasticMatrix& ArvSystem::power(int n) const {
  check(n);
  return powers_[n];
}

const SupportSet& ArvSystem::support(int n) const {
  check(n);
  return supports_[n];
}

const Eigen::MatrixXd& ArvSystem::sqrt(int n) const {
  check(n);
  return sqrt_[n];
}

const Eigen::MatrixXd& ArvSystem::flat_sqrt(int n) const {
  check(n);
  return flat_[n];
}

DiagonalElement DiagonalElement::projection(Index size, Index i) {
  DiagonalElement out{Eigen::VectorXcd::Zero(size)};
  out.values(i) = 1.0;
  return out;
}

Fiber::Fiber(const SupportSet& support, SparseComplex entries) : degree_(support.degree) {
  if (entries.rows() != support.size || entries.cols() != support.size)
    throw SizeMismatch("fiber entries have the wrong shape");
  entries.prune(Complex(0.0));
  for (Index c = 0; c < entries.outerSize(); ++c)
    for (SparseComplex::InnerIterator it(entries, c); it; ++it)
      if (!support.contains(it.row(), it.col()))
        throw OffSupport("entry (" + std::to_string(it.row()) + ", " + std::to_string(it.col()) +
                         ") is outside the support of degree " + std::to_string(degree_));
  entries.makeCompressed();
  entries_ = std::move(entries);
}

Fiber Fiber::unit(const SupportSet& support, Index i, Index j) {
  if (!support.contains(i, j))
    throw OffSupport("(" + std::to_string(i) + ", " + std::to_string(j) + ") is not in the support of degree " +
                     std::to_string(support.degree));
  SparseComplex e(support.size, support.size);
  e.insert(i, j) = 1.0;
  return Fiber(support.degree, std::move(e));
}

Fiber Fiber::zero(const SupportSet& support) {
  return Fiber(support.degree, SparseComplex(support.size, support.size));
}

Fiber Fiber::from_dense(const SupportSet& support, const Eigen::MatrixXcd& entries) {
  return Fiber(support, entries.sparseView());
}

double Fiber::norm() const {
  double best = 0.0;
  for (Index c = 0; c < entries_.outerSize(); ++c) {
    double sq = 0.0;
    for (SparseComplex::InnerIterator it(entries_, c); it; ++it) sq += std::norm(it.value());
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

Fiber Fiber::operator+(const Fiber& other) const {
  if (other.degree_ != degree_) throw DegreeMismatch("adding fibers of different degrees");
  return Fiber(degree_, SparseComplex(entries_ + other.entries_));
}

Fiber Fiber::operator-(const Fiber& other) const {
  if (other.degree_ != degree_) throw DegreeMismatch("subtracting fibers of different degrees");
  return Fiber(degree_, SparseComplex(entries_ - other.entries_));
}

Fiber Fiber::operator*(Complex c) const {
  return Fiber(degree_, SparseComplex(entries_ * c));
}

Fiber Fiber::left(const DiagonalElement& a) const {
  return Fiber(degree_, SparseComplex(a.values.asDiagonal() * entries_));
}

Fiber Fiber::right(const DiagonalElement& a) const {
  return Fiber(degree_, SparseComplex(entries_ * a.values.asDiagonal()));
}

Fiber fiber_unit(const ArvSystem& arv, int n, Index i, Index j) {
  return Fiber::unit(arv.support(n), i, j);
}

DiagonalElement inner(const Fiber& a, const Fiber& b) {
  if (a.degree() != b.degree()) throw DegreeMismatch("inner product of fibers of different degrees");
  DiagonalElement out{Eigen::VectorXcd::Zero(a.size())};
  SparseComplex prod = SparseComplex(a.entries().adjoint()) * b.entries();
  for (Index j = 0; j < a.size(); ++j) out.values(j) = prod.coeff(j, j);
  return out;
}

Fiber umap(const ArvSystem& arv, const Fiber& a, const Fiber& b) {
  const int n = a.degree();
  const int m = b.degree();
  const auto& target = arv.support(n + m);
  SparseComplex prod = weighted(a.entries(), arv.sqrt(n)) * weighted(b.entries(), arv.sqrt(m));
  return Fiber(target, weighted(prod, arv.flat_sqrt(n + m)));
}

Fiber umap(const ArvSystem& arv, int n, int m, const Fiber& a, const Fiber& b) {
  if (a.degree() != n || b.degree() != m)
    throw DegreeMismatch("expected degrees (" + std::to_string(n) + ", " + std::to_string(m) + "), got (" +
                         std::to_string(a.degree()) + ", " + std::to_string(b.degree()) + ")");
  return umap(arv, a, b);
}

Rational coisometry_defect(const ArvSystem& arv, int n, int m) {
  return ratio_defect(arv.power(n), arv.power(m), arv.power(n + m));
}

Rational coisometry_defect(const StochasticMatrix& p, int n, int m) {
  return ratio_defect(power(p, n), power(p, m), power(p, n + m));
}

RatioChecker::RatioChecker(const StochasticMatrix& p, const StochasticMatrix& q, int cutoff) : cutoff_(cutoff) {
  if (p.size() != q.size()) throw SizeMismatch("matrices have different state counts");
  if (cutoff < 2) throw DegreeMismatch("cutoff must be at least 2");
  p_ = powers(p, cutoff);
  q_ = powers(q, cutoff);
  for (int total = 2; total <= cutoff; ++total)
    for (int n = 1; n < total; ++n) blocks_.push_back({n, total - n, triple_support(p_[n], p_[total - n])});
}

bool RatioChecker::graph_iso(std::span<const Index> sigma) const {
  const Index d = p_[1].size();
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (p_[1].positive(i, j) != q_[1].positive(sigma[i], sigma[j])) return false;
  return true;
}

bool RatioChecker::holds_at(const Block& b, const Triple& t, std::span<const Index> sigma) const {
  const auto [i, j, k] = t;
  const Index si = sigma[i], sj = sigma[j], sk = sigma[k];
  const Rational lhs = p_[b.n].coeff(i, j) * p_[b.m].coeff(j, k) * q_[b.n + b.m].coeff(si, sk);
  const Rational rhs = q_[b.n].coeff(si, sj) * q_[b.m].coeff(sj, sk) * p_[b.n + b.m].coeff(i, k);
  return lhs == rhs;
}

RatioCheck RatioChecker::check(std::span<const Index> sigma) const {
  if (!graph_iso(sigma)) throw GraphMismatch("permutation is not a graph isomorphism");
  RatioCheck out;
  out.cutoff = cutoff_;
  for (const auto& b : blocks_)
    for (const auto& t : b.triples)
      if (!holds_at(b, t, sigma)) {
        out.holds = false;
        out.first_violation = RatioViolation{b.n, b.m, std::get<0>(t), std::get<1>(t), std::get<2>(t)};
        return out;
      }
  return out;
}

bool RatioChecker::consistent_partial(std::span<const Index> sigma, std::span<const char> assigned,
                                      Index newest) const {
  for (const auto& b : blocks_)
    for (const auto& t : b.triples) {
      const auto [i, j, k] = t;
      if (!assigned[i] || !assigned[j] || !assigned[k]) continue;
      if (i != newest && j != newest && k != newest) continue;
      // Support equality of the powers is implied only once sigma is a full
      // graph isomorphism, so guard the image entries here.
      if (q_[b.n].coeff(sigma[i], sigma[j]) == 0 || q_[b.m].coeff(sigma[j], sigma[k]) == 0 ||
          q_[b.n + b.m].coeff(sigma[i], sigma[k]) == 0)
        return false;
      if (!holds_at(b, t, sigma)) return false;
    }
  return true;
}

RatioCheck ratio_check(const StochasticMatrix& p, const StochasticMatrix& q, std::span<const Index> sigma,
                       int cutoff) {
  return RatioChecker(p, q, cutoff).check(sigma);
}

}  // namespace sps
