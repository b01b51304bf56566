#include "doctest.h"

#include "generators.hpp"
#include "sps/errors.hpp"
#include "sps/fock.hpp"

#include <cmath>

using namespace sps;
using namespace sps::testing;

namespace {

double block_gap(const FockOperator& a, const FockOperator& b) {
  double worst = 0.0;
  for (const auto& [key, block] : a.blocks()) {
    const auto it = b.blocks().find(key);
    const double g = it == b.blocks().end() ? block.cwiseAbs().maxCoeff() : (block - it->second).cwiseAbs().maxCoeff();
    worst = std::max(worst, g);
  }
  for (const auto& [key, block] : b.blocks())
    if (!a.blocks().count(key)) worst = std::max(worst, block.cwiseAbs().maxCoeff());
  return worst;
}

// Shift polynomial with random coefficients on units of degrees 1..top.
FockOperator shift_polynomial(Gen& gen, const TruncatedFock& fock, int top) {
  FockOperator t(fock);
  for (int n = 1; n <= top; ++n) t = t + shift(fock, gen.fiber(fock.support(n), 0.5));
  return t;
}

}  // namespace

TEST_CASE("coordinates round trip") {
  const TruncatedFock fock(matrix({{"1/2", "1/2"}, {"1", "0"}}), 4);
  CHECK(fock.dim(0) == 2);
  CHECK(fock.dim(1) == 3);
  CHECK(fock.coordinate(1, 1, 1) == -1);
  Gen gen(1);
  const auto a = gen.fiber(fock.support(3));
  CHECK((fock.fiber(3, fock.coordinates(a)).dense() - a.dense()).norm() == 0.0);
}

TEST_CASE("shift on the vacuum and on matrix units") {
  const auto p = matrix({{"1/2", "1/2"}, {"1/4", "3/4"}});
  const TruncatedFock fock(p, 5);
  const auto a = Fiber::unit(fock.support(2), 1, 0);
  const auto s = shift(fock, a);
  CHECK(s.degree() == 2);
  // S_A(E_00) = A for the degree-0 unit at column 0.
  const auto out = s.apply(Fiber::unit(fock.support(0), 0, 0));
  CHECK((out.dense() - a.dense()).norm() < 1e-12);
  CHECK(s.apply(Fiber::unit(fock.support(0), 1, 1)).entries().nonZeros() == 0);

  // S_{E_10}(E_01) at degree 1: sqrt(P^2_10 P^1_01 / P^3_11) E_11.
  const auto pd = p.dense();
  const double expected =
      std::sqrt(to_double(naive_power(pd, 2)(1, 0) * pd(0, 1) / naive_power(pd, 3)(1, 1)));
  const auto b = s.apply(Fiber::unit(fock.support(1), 0, 1));
  CHECK(std::abs(b.coeff(1, 1) - Complex(expected)) < 1e-12);
  CHECK_THROWS_AS(s.apply(Fiber::unit(fock.support(4), 0, 1)), DegreeOverflow);
  CHECK_THROWS_AS(shift(TruncatedFock(p, 1), a), DegreeOverflow);
}

TEST_CASE("operator algebra") {
  const TruncatedFock fock(matrix({{"1/2", "1/2"}, {"1/4", "3/4"}}), 4);
  const auto s = shift(fock, Fiber::unit(fock.support(1), 0, 1));
  const auto t = s + s.conjugate_transpose();
  CHECK_FALSE(t.homogeneous());
  CHECK_THROWS_AS(t.apply(Fiber::unit(fock.support(1), 0, 1)), NotHomogeneous);
  CHECK(FockOperator(fock).degree() == 0);
  CHECK((s * s).degree() == 2);
  CHECK_THROWS_AS(adjoint(s * s), NotAShift);
  CHECK(op_norm(degree_projection(fock, 2)) == doctest::Approx(1.0));
  CHECK(degree_projection(fock, 2).homogeneous());
  CHECK(op_norm(identity_operator(fock) - tail_projection(fock, 0)) == 0.0);
}

TEST_CASE("property: shifts have the norm of their symbol") {
  Gen gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = gen.stochastic(gen.integer(1, 4));
    const TruncatedFock fock(p, 5);
    const auto a = gen.fiber(fock.support(gen.integer(0, 3)));
    CHECK(op_norm(shift(fock, a)) == doctest::Approx(a.norm()).epsilon(1e-9));
  }
}

TEST_CASE("property: closed-form adjoint pairs with the shift") {
  Gen gen(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = gen.stochastic(gen.integer(1, 4));
    const TruncatedFock fock(p, 5);
    const int n = gen.integer(0, 2), m = gen.integer(0, 3);
    const auto s = shift(fock, gen.fiber(fock.support(n)));
    const auto sa = adjoint(s);
    CHECK(block_gap(sa, s.conjugate_transpose()) < 1e-12);

    const auto x = gen.fiber(fock.support(m)), y = gen.fiber(fock.support(n + m));
    const Complex lhs = fock.coordinates(y).dot(fock.coordinates(s.apply(x)));
    const Complex rhs = fock.coordinates(sa.apply(y)).dot(fock.coordinates(x));
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("property: Q-projection identity") {
  Gen gen(41);
  for (int trial = 0; trial < 8; ++trial) {
    const auto p = gen.stochastic(gen.integer(1, 4));
    const TruncatedFock fock(p, 5);
    for (int n = 0; n <= 5; ++n) CHECK(q_projection_identity(fock, n) == 0);
    CHECK(q_projection_numeric(fock, gen.integer(0, 3)) < 1e-9);
  }
  CHECK_THROWS_AS(q_projection_identity(TruncatedFock(StochasticMatrix::identity(2), 2), 3), DegreeOverflow);
}

TEST_CASE("property: Fourier grading of products") {
  Gen gen(43);
  for (int trial = 0; trial < 8; ++trial) {
    const TruncatedFock fock(gen.stochastic(gen.integer(1, 3)), 6);
    const auto a = shift_polynomial(gen, fock, 2) + shift_polynomial(gen, fock, 1).conjugate_transpose();
    const auto b = shift_polynomial(gen, fock, 2) + degree_projection(fock, 1);
    const auto ab = a * b;
    for (int k = -3; k <= 4; ++k) {
      FockOperator expected(fock);
      for (int i = -3; i <= 4; ++i) expected = expected + fourier(a, i) * fourier(b, k - i);
      CHECK(block_gap(fourier(ab, k), expected) < 1e-12);
      const auto f = fourier(ab, k);
      if (!f.blocks().empty()) CHECK(f.degree() == k);
    }
  }
}

TEST_CASE("property: Cesaro means approach the operator") {
  Gen gen(47);
  for (int trial = 0; trial < 6; ++trial) {
    const TruncatedFock fock(gen.stochastic(gen.integer(1, 3)), 6);
    const auto t = shift_polynomial(gen, fock, 3);
    double previous = op_norm(cesaro(t, 0) - t);
    for (int m = 1; m <= 40; ++m) {
      const double d = op_norm(cesaro(t, m) - t);
      CHECK(d <= previous + 1e-12);
      previous = d;
    }
    // Past the top degree the defect is exactly sum_k k F_k(T) / (M + 1).
    double bound = 0.0;
    for (int k = 1; k <= 3; ++k) bound += k * op_norm(fourier(t, k));
    CHECK(previous <= bound / 41 + 1e-12);
  }
  const TruncatedFock fock(matrix({{"1"}}), 3);
  const auto s = shift(fock, Fiber::unit(fock.support(1), 0, 0));
  CHECK(block_gap(cesaro(s, 1), s * Complex(0.5)) == 0.0);
  CHECK(cesaro(s, 0).blocks().empty());
}

TEST_CASE("quotient norm estimates") {
  const TruncatedFock one(matrix({{"1"}}), 12);
  const auto s = shift(one, Fiber::unit(one.support(1), 0, 0));
  const auto q = quotient_norm_estimate(s, 1, 10);
  CHECK(q.estimate == doctest::Approx(1.0));
  CHECK(q.converged);
  CHECK(quotient_norm_estimate(degree_projection(one, 0), 1, 10).estimate == 0.0);
  CHECK_THROWS_AS(quotient_norm_estimate(s, 1, 12), DegreeOverflow);
  CHECK_THROWS_AS(quotient_norm_estimate(s + s.conjugate_transpose(), 1, 4), NotHomogeneous);

  const auto perm = matrix({{"0", "1", "0"}, {"0", "0", "1"}, {"1", "0", "0"}});
  const TruncatedFock fock(perm, 8);
  const auto a = Fiber::unit(fock.support(1), 0, 1);
  const auto gap = t_operator(fock, a) - w_operator(fock, a);
  CHECK(quotient_norm_estimate(gap, 0, 6).estimate == 0.0);
}

TEST_CASE("c_m values against an independent computation") {
  const auto p = matrix({{"1/2", "1/2"}, {"1/4", "3/4"}});
  const ArvSystem arv(p, 8);
  const auto pd = p.dense();
  for (int m = 1; m <= 5; ++m)
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j)
        for (Index k = 0; k < 2; ++k) {
          const double root = std::sqrt(to_double(naive_power(pd, m)(j, k) / naive_power(pd, m + 1)(i, k)));
          CHECK(cm_value(arv, 1, m, i, j, k) == doctest::Approx((root - 1) * (root - 1)).epsilon(1e-12));
        }

  const auto table = cm_convergence(p, 1, 40);
  CHECK(table.converged);
  REQUIRE(table.first_below);
  CHECK(*table.first_below <= 40);
  for (std::size_t a = 1; a < table.max_value.size(); ++a) CHECK(table.max_value[a] <= table.max_value[a - 1] + 1e-15);
  CHECK_THROWS_AS(cm_convergence(splitting_chain(Rational(1, 2)), 1, 4), NotIrreducible);
}

TEST_CASE("T-W gap equals the square root of the worst c_m on units") {
  const auto p = matrix({{"1/2", "1/2"}, {"1/4", "3/4"}});
  const ArvSystem arv(p, 20);
  for (const auto& [i, j] : arv.support(1).pairs) {
    const auto gap = tw_gap(p, Fiber::unit(arv.support(1), i, j), 16);
    for (std::size_t a = 0; a < gap.values.size(); ++a) {
      const int m = gap.degrees[a];
      double worst = 0.0;
      for (Index k = 0; k < 2; ++k)
        if (arv.power(m).coeff(j, k) > 0) worst = std::max(worst, std::sqrt(cm_value(arv, 1, m, i, j, k)));
      CHECK(gap.values[a] == doctest::Approx(worst).epsilon(1e-9));
    }
    CHECK(gap.converged);
  }

  const auto perm = matrix({{"0", "1", "0"}, {"0", "0", "1"}, {"1", "0", "0"}});
  const auto g = tw_gap(perm, Fiber::unit(support(perm, 1), 2, 0), 8);
  for (double v : g.values) CHECK(v == 0.0);
}
