#include "sps/fock.hpp"

#include "sps/chain_structure.hpp"
#include "sps/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace sps {
namespace {

// T Q_m: the blocks of T with source degree m.
FockOperator from_source(const FockOperator& t, int m) {
  FockOperator out(t.fock());
  for (const auto& [key, block] : t.blocks())
    if (key.second == m) out.add_block(key.first, key.second, block);
  return out;
}

double tail_max(const std::vector<double>& v, std::size_t from) {
  double best = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) best = std::max(best, v[i]);
  return best;
}

std::size_t last_quarter_start(std::size_t n) {
  return n - std::max<std::size_t>(1, n / 4);
}

void require_irreducible(const StochasticMatrix& p) {
  if (!is_irreducible(p)) throw NotIrreducible("matrix has more than one communicating class");
}

}  // namespace

TruncatedFock::TruncatedFock(const StochasticMatrix& p, int cap) : TruncatedFock(ArvSystem(p, cap)) {}

TruncatedFock::TruncatedFock(ArvSystem arv) {
  auto data = std::make_shared<Data>(Data{std::move(arv), {}});
  for (int n = 0; n <= data->arv.max_degree(); ++n) {
    std::map<std::pair<Index, Index>, Index> index;
    const auto& pairs = data->arv.support(n).pairs;
    for (std::size_t c = 0; c < pairs.size(); ++c) index.emplace(pairs[c], static_cast<Index>(c));
    data->index.push_back(std::move(index));
  }
  data_ = std::move(data);
}

Index TruncatedFock::coordinate(int n, Index i, Index j) const {
  const auto& index = data_->index.at(static_cast<std::size_t>(n));
  auto it = index.find({i, j});
  return it == index.end() ? -1 : it->second;
}

Eigen::VectorXcd TruncatedFock::coordinates(const Fiber& a) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim(a.degree()));
  for (Index c = 0; c < a.entries().outerSize(); ++c)
    for (SparseComplex::InnerIterator it(a.entries(), c); it; ++it) {
      const Index pos = coordinate(a.degree(), it.row(), it.col());
      if (pos < 0) throw OffSupport("fiber entry outside the support of its degree");
      out(pos) = it.value();
    }
  return out;
}

Fiber TruncatedFock::fiber(int n, const Eigen::VectorXcd& coords) const {
  const auto& pairs = support(n).pairs;
  std::vector<Eigen::Triplet<Complex>> t;
  for (std::size_t c = 0; c < pairs.size(); ++c)
    if (coords(static_cast<Index>(c)) != Complex(0.0)) t.emplace_back(pairs[c].first, pairs[c].second, coords(c));
  SparseComplex m(size(), size());
  m.setFromTriplets(t.begin(), t.end());
  return Fiber(support(n), std::move(m));
}

FockOperator::FockOperator(const TruncatedFock& fock) : fock_(fock) {}

void FockOperator::add_block(int target, int source, const Eigen::MatrixXcd& m) {
  if (target < 0 || source < 0 || target > fock_.cap() || source > fock_.cap()) return;
  auto [it, fresh] = blocks_.try_emplace({target, source}, m);
  if (!fresh) it->second += m;
  symbol_.reset();
}

std::optional<int> FockOperator::degree() const {
  std::optional<int> k;
  for (const auto& [key, block] : blocks_) {
    const int d = key.first - key.second;
    if (k && *k != d) return std::nullopt;
    k = d;
  }
  return k.value_or(0);
}

FockOperator FockOperator::operator+(const FockOperator& other) const {
  FockOperator out = *this;
  for (const auto& [key, block] : other.blocks_) out.add_block(key.first, key.second, block);
  out.symbol_.reset();
  return out;
}

FockOperator FockOperator::operator-(const FockOperator& other) const {
  return *this + other * Complex(-1.0);
}

FockOperator FockOperator::operator*(const FockOperator& other) const {
  FockOperator out(fock_);
  for (const auto& [inner_key, right] : other.blocks_)
    for (const auto& [outer_key, left] : blocks_)
      if (outer_key.second == inner_key.first) out.add_block(outer_key.first, inner_key.second, left * right);
  return out;
}

FockOperator FockOperator::operator*(Complex c) const {
  FockOperator out(fock_);
  for (const auto& [key, block] : blocks_) out.blocks_.emplace(key, block * c);
  return out;
}

FockOperator FockOperator::conjugate_transpose() const {
  FockOperator out(fock_);
  for (const auto& [key, block] : blocks_) out.blocks_.emplace(Key{key.second, key.first}, block.adjoint());
  return out;
}

Fiber FockOperator::apply(const Fiber& x) const {
  const auto k = degree();
  if (!k) throw NotHomogeneous("apply needs a homogeneous operator");
  const int target = x.degree() + *k;
  if (target < 0 || target > fock_.cap())
    throw DegreeOverflow("image degree " + std::to_string(target) + " is outside the truncation");
  auto it = blocks_.find({target, x.degree()});
  if (it == blocks_.end()) return Fiber::zero(fock_.support(target));
  return fock_.fiber(target, it->second * fock_.coordinates(x));
}

FockOperator shift(const TruncatedFock& fock, const Fiber& a) {
  const int n = a.degree();
  if (n > fock.cap()) throw DegreeOverflow("symbol degree " + std::to_string(n) + " exceeds the cap");
  const auto& arv = fock.arv();
  FockOperator out(fock);
  for (int m = 0; m + n <= fock.cap(); ++m) {
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(fock.dim(n + m), fock.dim(m));
    const auto& src = fock.support(m).pairs;
    const auto& root_n = arv.sqrt(n);
    const auto& root_m = arv.sqrt(m);
    const auto& inv = arv.flat_sqrt(n + m);
    for (std::size_t c = 0; c < src.size(); ++c) {
      const auto [l, k] = src[c];
      for (SparseComplex::InnerIterator it(a.entries(), l); it; ++it) {
        const Index i = it.row();
        block(fock.coordinate(n + m, i, k), static_cast<Index>(c)) +=
            it.value() * root_n(i, l) * root_m(l, k) * inv(i, k);
      }
    }
    out.add_block(n + m, m, block);
  }
  out.symbol_ = a;
  return out;
}

FockOperator adjoint(const FockOperator& s) {
  if (!s.shift_symbol()) throw NotAShift("closed-form adjoint needs a shift operator");
  const Fiber& a = *s.shift_symbol();
  const auto& fock = s.fock();
  const auto& arv = fock.arv();
  const int n = a.degree();

  // Row-wise view of the symbol: by_row[l] = {(j, a_lj)}.
  std::vector<std::vector<std::pair<Index, Complex>>> by_row(static_cast<std::size_t>(a.size()));
  for (Index c = 0; c < a.entries().outerSize(); ++c)
    for (SparseComplex::InnerIterator it(a.entries(), c); it; ++it) by_row[it.row()].emplace_back(it.col(), it.value());

  FockOperator out(fock);
  for (int m = 0; m + n <= fock.cap(); ++m) {
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(fock.dim(m), fock.dim(n + m));
    const auto& src = fock.support(n + m).pairs;
    const auto& root_n = arv.sqrt(n);
    const auto& root_m = arv.sqrt(m);
    const auto& inv = arv.flat_sqrt(n + m);
    for (std::size_t c = 0; c < src.size(); ++c) {
      const auto [l, k] = src[c];
      for (const auto& [j, alj] : by_row[l]) {
        const Index pos = fock.coordinate(m, j, k);
        if (pos < 0) continue;
        block(pos, static_cast<Index>(c)) += root_m(j, k) * std::conj(alj) * root_n(l, j) * inv(l, k);
      }
    }
    out.add_block(m, n + m, block);
  }
  return out;
}

FockOperator t_operator(const TruncatedFock& fock, const Fiber& a) {
  const auto& inv = fock.arv().flat_sqrt(a.degree());
  SparseComplex scaled = a.entries();
  for (Index c = 0; c < scaled.outerSize(); ++c)
    for (SparseComplex::InnerIterator it(scaled, c); it; ++it) it.valueRef() *= inv(it.row(), it.col());
  return shift(fock, Fiber(fock.support(a.degree()), std::move(scaled)));
}

FockOperator w_operator(const TruncatedFock& fock, const Fiber& a) {
  const int n = a.degree();
  if (n > fock.cap()) throw DegreeOverflow("symbol degree " + std::to_string(n) + " exceeds the cap");
  FockOperator out(fock);
  for (int m = 0; m + n <= fock.cap(); ++m) {
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(fock.dim(n + m), fock.dim(m));
    const auto& src = fock.support(m).pairs;
    for (std::size_t c = 0; c < src.size(); ++c) {
      const auto [l, k] = src[c];
      for (SparseComplex::InnerIterator it(a.entries(), l); it; ++it)
        block(fock.coordinate(n + m, it.row(), k), static_cast<Index>(c)) += it.value();
    }
    out.add_block(n + m, m, block);
  }
  return out;
}

FockOperator degree_projection(const TruncatedFock& fock, int n) {
  FockOperator out(fock);
  out.add_block(n, n, Eigen::MatrixXcd::Identity(fock.dim(n), fock.dim(n)));
  return out;
}

FockOperator tail_projection(const TruncatedFock& fock, int n) {
  FockOperator out(fock);
  for (int m = std::max(n, 0); m <= fock.cap(); ++m)
    out.add_block(m, m, Eigen::MatrixXcd::Identity(fock.dim(m), fock.dim(m)));
  return out;
}

FockOperator identity_operator(const TruncatedFock& fock) {
  return tail_projection(fock, 0);
}

Rational q_projection_identity(const TruncatedFock& fock, int n) {
  const auto& arv = fock.arv();
  if (n < 0 || n > fock.cap()) throw DegreeOverflow("projection degree outside the truncation");
  Rational worst = 0;
  // Below degree n every S^* vanishes, since no adjoint block has source < n.
  for (int m = n; m <= fock.cap(); ++m) {
    const auto& pn = arv.power(n);
    const auto& rest = arv.power(m - n);
    const auto& pm = arv.power(m);
    for (const auto& [l, k] : fock.support(m).pairs) {
      Rational sum = 0;
      pn.for_each_nonzero(l, [&](Index j, const Rational& x) { sum += x * rest.coeff(j, k); });
      worst = std::max(worst, abs(Rational(1 - sum / pm.coeff(l, k))));
    }
  }
  return worst;
}

double q_projection_numeric(const TruncatedFock& fock, int n) {
  FockOperator sum(fock);
  for (const auto& [i, j] : fock.support(n).pairs) {
    const FockOperator s = shift(fock, Fiber::unit(fock.support(n), i, j));
    sum = sum + s * adjoint(s);
  }
  return op_norm(sum - tail_projection(fock, n));
}

FockOperator fourier(const FockOperator& t, int k) {
  FockOperator out(t.fock());
  for (const auto& [key, block] : t.blocks())
    if (key.first - key.second == k) out.add_block(key.first, key.second, block);
  return out;
}

FockOperator cesaro(const FockOperator& t, int m) {
  FockOperator out(t.fock());
  for (const auto& [key, block] : t.blocks()) {
    const int k = std::abs(key.first - key.second);
    if (k > m) continue;
    out.add_block(key.first, key.second, block * Complex(1.0 - static_cast<double>(k) / (m + 1)));
  }
  return out;
}

double op_norm(const FockOperator& t) {
  const auto& fock = t.fock();
  const int cap = fock.cap();
  const Index d = fock.size();

  // Coordinates of column j in each degree, and their offsets in the column space.
  std::vector<std::vector<std::vector<Index>>> rows(static_cast<std::size_t>(d),
                                                    std::vector<std::vector<Index>>(cap + 1));
  for (int n = 0; n <= cap; ++n) {
    const auto& pairs = fock.support(n).pairs;
    for (std::size_t c = 0; c < pairs.size(); ++c) rows[pairs[c].second][n].push_back(static_cast<Index>(c));
  }

  double best = 0.0;
  for (Index j = 0; j < d; ++j) {
    std::vector<Index> offset(static_cast<std::size_t>(cap) + 2, 0);
    for (int n = 0; n <= cap; ++n) offset[n + 1] = offset[n] + static_cast<Index>(rows[j][n].size());
    const Index total = offset[cap + 1];
    if (total == 0) continue;
    Eigen::MatrixXcd column = Eigen::MatrixXcd::Zero(total, total);
    bool any = false;
    for (const auto& [key, block] : t.blocks()) {
      const auto& r = rows[j][key.first];
      const auto& c = rows[j][key.second];
      for (std::size_t a = 0; a < r.size(); ++a)
        for (std::size_t b = 0; b < c.size(); ++b) {
          column(offset[key.first] + static_cast<Index>(a), offset[key.second] + static_cast<Index>(b)) =
              block(r[a], c[b]);
          any = true;
        }
    }
    if (!any) continue;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(column);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

NormSequence quotient_norm_estimate(const FockOperator& t, int first, int last) {
  const auto k = t.degree();
  if (!k) throw NotHomogeneous("quotient norm estimate needs a homogeneous operator");
  const int cap = t.fock().cap();
  if (first < 0 || last < first) throw DegreeMismatch("empty window");
  if (last + *k > cap || first + *k < 0)
    throw DegreeOverflow("window end " + std::to_string(last) + " exceeds cap " + std::to_string(cap) +
                         " minus operator degree");
  NormSequence out;
  out.cap = cap;
  for (int n = first; n <= last; ++n) {
    out.degrees.push_back(n);
    out.values.push_back(op_norm(from_source(t, n)));
  }
  const std::size_t size = out.values.size();
  out.estimate = tail_max(out.values, size / 2);
  out.converged = std::abs(out.estimate - tail_max(out.values, last_quarter_start(size))) < 1e-6;
  return out;
}

double cm_value(const ArvSystem& arv, int n, int m, Index i, Index j, Index k) {
  const Rational& pij = arv.power(n).coeff(i, j);
  const Rational& pjk = arv.power(m).coeff(j, k);
  if (pij == 0 || pjk == 0) return 0.0;
  const double root = std::sqrt(to_double(Rational(pjk / arv.power(n + m).coeff(i, k))));
  return (root - 1.0) * (root - 1.0);
}

CmTable cm_convergence(const StochasticMatrix& p, int n, int window, double threshold) {
  require_irreducible(p);
  if (n < 1 || window < 1) throw DegreeMismatch("degree and window must be positive");
  const ArvSystem arv(p, n + window);
  CmTable out;
  out.n = n;
  out.threshold = threshold;
  for (int m = 1; m <= window; ++m) {
    double best = 0.0;
    Triple arg{0, 0, 0};
    for (const auto& t : triple_support(arv.power(n), arv.power(m))) {
      const double c = cm_value(arv, n, m, std::get<0>(t), std::get<1>(t), std::get<2>(t));
      if (c > best) {
        best = c;
        arg = t;
      }
    }
    out.degrees.push_back(m);
    out.max_value.push_back(best);
    out.argmax.push_back(arg);
    if (!out.first_below && best < threshold) out.first_below = m;
  }
  out.converged = tail_max(out.max_value, last_quarter_start(out.max_value.size())) < threshold;
  return out;
}

NormSequence tw_gap(const StochasticMatrix& p, const Fiber& a, int window, double threshold) {
  require_irreducible(p);
  if (window < 1) throw DegreeMismatch("window must be positive");
  const TruncatedFock fock(p, a.degree() + window);
  const Fiber symbol(fock.support(a.degree()), a.entries());
  const FockOperator gap = t_operator(fock, symbol) - w_operator(fock, symbol);
  NormSequence out;
  out.cap = fock.cap();
  for (int m = 1; m <= window; ++m) {
    out.degrees.push_back(m);
    out.values.push_back(op_norm(from_source(gap, m)));
  }
  out.estimate = out.values.back();
  out.converged = tail_max(out.values, last_quarter_start(out.values.size())) < threshold;
  return out;
}

}  // namespace sps
