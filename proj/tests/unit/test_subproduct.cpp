#include "doctest.h"

#include "generators.hpp"
#include "sps/errors.hpp"
#include "sps/subproduct.hpp"

#include <cmath>

using namespace sps;
using namespace sps::testing;

namespace {

// sqrt(P^n_ij P^m_jk / P^{n+m}_ik) from naive exact powers.
double unit_weight(const RationalMatrix& p, int n, int m, Index i, Index j, Index k) {
  const auto pn = naive_power(p, n), pm = naive_power(p, m), pnm = naive_power(p, n + m);
  if (pnm(i, k) == 0) return 0.0;
  return std::sqrt(to_double(pn(i, j) * pm(j, k) / pnm(i, k)));
}

// First violation of the ratio identity in (total, n, i, j, k) order, by brute force.
std::optional<RatioViolation> brute_ratio(const StochasticMatrix& p, const StochasticMatrix& q, const Permutation& s,
                                          int cutoff) {
  const auto pd = p.dense(), qd = q.dense();
  const Index d = p.size();
  for (int total = 2; total <= cutoff; ++total)
    for (int n = 1; n < total; ++n) {
      const int m = total - n;
      const auto pn = naive_power(pd, n), pm = naive_power(pd, m), pt = naive_power(pd, total);
      const auto qn = naive_power(qd, n), qm = naive_power(qd, m), qt = naive_power(qd, total);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
          for (Index k = 0; k < d; ++k) {
            if (pn(i, j) * pm(j, k) == 0) continue;
            const Rational lhs = pn(i, j) * pm(j, k) / pt(i, k);
            const Rational rhs = qn(s[i], s[j]) * qm(s[j], s[k]) / qt(s[i], s[k]);
            if (lhs != rhs) return RatioViolation{n, m, i, j, k};
          }
    }
  return std::nullopt;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("degree data") {
  const ArvSystem arv(matrix({{"1/2", "1/2"}, {"1/4", "3/4"}}), 4);
  CHECK(arv.max_degree() == 4);
  CHECK(arv.power(0).same_entries(StochasticMatrix::identity(2)));
  CHECK(arv.power(2).coeff(1, 0) == Rational(5, 16));
  CHECK(arv.sqrt(1)(0, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(arv.flat_sqrt(1)(1, 1) == doctest::Approx(1.0 / std::sqrt(0.75)));
  CHECK_THROWS_AS(arv.power(5), DegreeOverflow);
  CHECK_THROWS_AS(arv.power(-1), DegreeMismatch);
}

TEST_CASE("fibers respect their support") {
  const auto split = splitting_chain(Rational(1, 3));
  const auto s = support(split, 1);
  CHECK_THROWS_AS(Fiber::unit(s, 2, 0), OffSupport);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(1, 0) = 1.0;
  CHECK_THROWS_AS(Fiber::from_dense(s, m), OffSupport);

  const auto a = Fiber::unit(s, 0, 1) * Complex(3.0, 4.0);
  CHECK(a.norm() == doctest::Approx(5.0));
  const auto b = Fiber::unit(s, 0, 2) + Fiber::unit(s, 1, 1);
  CHECK(b.degree() == 1);
  CHECK(b.coeff(1, 1) == Complex(1.0));
  CHECK_THROWS_AS(a + Fiber::unit(support(split, 2), 0, 1), DegreeMismatch);
}

TEST_CASE("inner products") {
  const auto p = matrix({{"1/2", "1/2"}, {"1/4", "3/4"}});
  const auto s = support(p, 1);
  const auto e01 = Fiber::unit(s, 0, 1), e11 = Fiber::unit(s, 1, 1), e00 = Fiber::unit(s, 0, 0);
  CHECK(inner(e01, e01).values(1) == Complex(1.0));
  CHECK(inner(e01, e01).values(0) == Complex(0.0));
  CHECK(inner(e01, e11).values.isZero());
  CHECK(inner(e00, e00).values(0) == Complex(1.0));
  CHECK_THROWS_AS(inner(e01, Fiber::unit(support(p, 2), 0, 1)), DegreeMismatch);

  Gen gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = gen.fiber(s), b = gen.fiber(s);
    const Eigen::VectorXcd expected = (a.dense().adjoint() * b.dense()).diagonal();
    CHECK((inner(a, b).values - expected).norm() < 1e-12);
  }
}

TEST_CASE("product map on matrix units") {
  const auto p = matrix({{"1/2", "1/2"}, {"1/4", "3/4"}});
  const ArvSystem arv(p, 6);
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m)
      for (const auto& [i, j] : arv.support(n).pairs)
        for (const auto& [l, k] : arv.support(m).pairs) {
          const auto out = umap(arv, fiber_unit(arv, n, i, j), fiber_unit(arv, m, l, k));
          CHECK(out.degree() == n + m);
          if (j != l) {
            CHECK(out.entries().nonZeros() == 0);
            continue;
          }
          Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 2);
          expected(i, k) = unit_weight(p.dense(), n, m, i, j, k);
          CHECK(max_abs(out.dense() - expected) < 1e-12);
        }

  // Degree 0 acts as the diagonal action.
  const auto a = fiber_unit(arv, 2, 1, 0);
  const auto left = umap(arv, fiber_unit(arv, 0, 1, 1), a);
  CHECK(max_abs(left.dense() - a.dense()) < 1e-12);
  CHECK(umap(arv, fiber_unit(arv, 0, 0, 0), a).entries().nonZeros() == 0);
  CHECK_THROWS_AS(umap(arv, 4, 3, fiber_unit(arv, 4, 0, 0), fiber_unit(arv, 3, 0, 0)), DegreeOverflow);
}

TEST_CASE("permutation matrices have unit product weights") {
  const auto perm = matrix({{"0", "1", "0"}, {"0", "0", "1"}, {"1", "0", "0"}});
  const ArvSystem arv(perm, 4);
  for (const auto& [i, j] : arv.support(2).pairs)
    for (const auto& [l, k] : arv.support(1).pairs) {
      if (j != l) continue;
      const auto out = umap(arv, fiber_unit(arv, 2, i, j), fiber_unit(arv, 1, j, k));
      CHECK(std::abs(out.coeff(i, k) - Complex(1.0)) < 1e-12);
    }
}

TEST_CASE("property: associativity and bimodule laws") {
  Gen gen(7);
  for (int trial = 0; trial < 15; ++trial) {
    const auto p = gen.stochastic(gen.integer(1, 5));
    const ArvSystem arv(p, 6);
    const int n = gen.integer(0, 2), m = gen.integer(0, 2), l = gen.integer(0, 2);
    const auto a = gen.fiber(arv.support(n)), b = gen.fiber(arv.support(m)), c = gen.fiber(arv.support(l));
    const auto lhs = umap(arv, umap(arv, a, b), c);
    const auto rhs = umap(arv, a, umap(arv, b, c));
    CHECK(max_abs(lhs.dense() - rhs.dense()) < 1e-9);

    DiagonalElement x{Eigen::VectorXcd(p.size())};
    for (Index i = 0; i < p.size(); ++i) x.values(i) = gen.complex();
    CHECK(max_abs(umap(arv, a.left(x), b).dense() - umap(arv, a, b).left(x).dense()) < 1e-9);
    CHECK(max_abs(umap(arv, a, b.right(x)).dense() - umap(arv, a, b).right(x).dense()) < 1e-9);
    CHECK(max_abs(umap(arv, a.right(x), b).dense() - umap(arv, a, b.left(x)).dense()) < 1e-9);
  }
}

TEST_CASE("property: the product map is a coisometry") {
  Gen gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = gen.stochastic(gen.integer(1, 6));
    const ArvSystem arv(p, 6);
    for (int n = 0; n <= 3; ++n)
      for (int m = 0; n + m <= 6 && m <= 3; ++m) CHECK(coisometry_defect(arv, n, m) == 0);
  }
  CHECK(coisometry_defect(matrix({{"1/3", "2/3"}, {"1", "0"}}), 2, 3) == 0);
}

TEST_CASE("a table that is not a power sequence is detected") {
  const auto p = matrix({{"1/2", "1/2"}, {"1/4", "3/4"}});
  std::vector<StochasticMatrix> table{StochasticMatrix::identity(2), p, p};
  const auto arv = ArvSystem::from_powers(table);
  CHECK(coisometry_defect(arv, 1, 1) > 0);
  CHECK(coisometry_defect(arv, 0, 1) == 0);
}

TEST_CASE("ratio identity on fixed pairs") {
  const auto p = matrix({{"1/2", "1/2"}, {"1/4", "3/4"}});
  const auto id = identity_permutation(2);
  CHECK(ratio_check(p, p, id).holds);

  const auto q = matrix({{"3/4", "1/4"}, {"1/4", "3/4"}});
  const auto r = ratio_check(p, q, id);
  CHECK_FALSE(r.holds);
  REQUIRE(r.first_violation);
  const auto expected = brute_ratio(p, q, id, 12);
  REQUIRE(expected);
  CHECK(r.first_violation->n == expected->n);
  CHECK(r.first_violation->m == expected->m);
  CHECK(r.first_violation->i == expected->i);
  CHECK(r.first_violation->j == expected->j);
  CHECK(r.first_violation->k == expected->k);
  CHECK(expected->n == 1);
  CHECK(expected->i == 0);

  const Rational third(1, 3), fifth(1, 5), two_fifths(2, 5);
  for (const auto& a : {third, fifth, two_fifths})
    for (const auto& b : {third, fifth, two_fifths})
      CHECK(ratio_check(splitting_chain(a), splitting_chain(b), identity_permutation(3)).holds);

  CHECK_THROWS_AS(ratio_check(p, matrix({{"1", "0"}, {"1/2", "1/2"}}), id), GraphMismatch);
  CHECK_THROWS_AS(RatioChecker(p, StochasticMatrix::identity(3), 4), SizeMismatch);
  CHECK_THROWS_AS(RatioChecker(p, p, 1), DegreeMismatch);
}

TEST_CASE("property: ratio check agrees with brute force") {
  Gen gen(13);
  for (int trial = 0; trial < 15; ++trial) {
    const Index d = gen.integer(1, 4);
    const auto p = gen.stochastic(d, 0.5);
    const auto sigma = gen.permutation(d);
    CHECK(ratio_check(p, p.permuted(sigma), sigma, 6).holds);

    // Same graph, fresh weights.
    RationalMatrix w = RationalMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
      Rational sum = 0;
      for (Index j = 0; j < d; ++j)
        if (p.positive(i, j)) sum += (w(i, j) = gen.integer(1, 4));
      for (Index j = 0; j < d; ++j) w(i, j) /= sum;
    }
    const auto q = StochasticMatrix::from_entries(w).permuted(sigma);
    const auto r = ratio_check(p, q, sigma, 6);
    const auto oracle = brute_ratio(p, q, sigma, 6);
    CHECK(r.holds == !oracle.has_value());
    if (oracle && r.first_violation) {
      CHECK(r.first_violation->n == oracle->n);
      CHECK(r.first_violation->m == oracle->m);
      CHECK(r.first_violation->i == oracle->i);
      CHECK(r.first_violation->j == oracle->j);
      CHECK(r.first_violation->k == oracle->k);
    }
  }
}
