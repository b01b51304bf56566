#include "doctest.h"

#include "generators.hpp"
#include "sps/cuntz.hpp"
#include "sps/errors.hpp"

using namespace sps;
using namespace sps::testing;

TEST_CASE("presentations") {
  const auto cycle3 = matrix({{"0", "1", "0"}, {"0", "0", "1"}, {"1", "0", "0"}});
  CHECK(presentation(cycle3) == "C(T; M_3)");
  CHECK(presentation_note(cuntz_invariant(cycle3)) == "r=3, q=1");
  CHECK(presentation(StochasticMatrix::identity(2)) == "C(T; C ⊕ C)");

  const auto flip4 = matrix({{"0", "0", "1/2", "1/2"}, {"0", "0", "1/3", "2/3"}, {"1", "0", "0", "0"}, {"1/4", "3/4", "0", "0"}});
  CHECK(presentation_note(cuntz_invariant(flip4)) == "r=2, q=2");

  const auto uneven = matrix({{"0", "1/2", "1/2"}, {"1", "0", "0"}, {"1", "0", "0"}});
  const auto inv = cuntz_invariant(uneven);
  CHECK_FALSE(inv.blocks[0].balanced);
  CHECK(presentation_note(inv) == "r=2, residue sizes 1/2");

  CHECK_THROWS_AS(cuntz_invariant(splitting_chain(Rational(1, 3))), NotEssential);
}

TEST_CASE("block sizes decide the Cuntz comparison") {
  Gen gen(53);
  const auto a = gen.essential({2, 3}), b = gen.essential({3, 2}), c = gen.essential({5});
  CHECK(cuntz_invariant(a).block_sizes == std::vector<Index>{2, 3});
  CHECK(presentation(a) == "C(T; M_2 ⊕ M_3)");
  const auto yes = decide_cuntz_iso(a, b);
  CHECK(yes.answer == Answer::Yes);
  REQUIRE(yes.certificate);
  CHECK(yes.certificate->mode == CertificateMode::BlockSizes);
  CHECK(certificate_valid(a, b, *yes.certificate));
  CHECK(decide_cuntz_iso(a, c).answer == Answer::No);
  CHECK(decide_cuntz_iso(a, StochasticMatrix::identity(5)).answer == Answer::No);
}

TEST_CASE("property: invariant is stable under relabelling") {
  Gen gen(59);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Index> sizes(static_cast<std::size_t>(gen.integer(1, 3)));
    for (auto& s : sizes) s = gen.integer(1, 4);
    const auto p = gen.essential(sizes);
    const auto q = p.permuted(gen.permutation(p.size()));
    CHECK(cuntz_invariant(p) == cuntz_invariant(q));
    CHECK(presentation_note(cuntz_invariant(p)) == presentation_note(cuntz_invariant(q)));
    std::sort(sizes.begin(), sizes.end());
    CHECK(cuntz_invariant(p).block_sizes == sizes);
    // A weighted isomorphism implies equal invariants.
    if (decide_isometric(p, q, 4).answer == Answer::Yes) CHECK(decide_cuntz_iso(p, q).answer == Answer::Yes);
  }
}
