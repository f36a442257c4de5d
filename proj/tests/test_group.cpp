#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <numeric>
#include <vector>

#include "solspec/group.hpp"

using namespace solspec;

namespace {

// Independent lcm(2..k) oracle: product over primes p <= k of the largest
// power of p not exceeding k.
std::uint64_t lcm_prime_power_oracle(std::uint64_t k) {
  std::uint64_t out = 1;
  for (std::uint64_t p = 2; p <= k; ++p) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= p; ++d)
      if (p % d == 0) prime = false;
    if (!prime) continue;
    std::uint64_t power = p;
    while (power * p <= k) power *= p;
    out *= power;
  }
  return out;
}

// |SL(2, Z/mZ)| = m^3 * prod_{p | m} (1 - 1/p^2).
std::uint64_t sl2_order_formula(std::uint64_t m) {
  std::uint64_t out = m * m * m;
  std::uint64_t rest = m;
  for (std::uint64_t p = 2; p <= rest; ++p) {
    if (rest % p != 0) continue;
    while (rest % p == 0) rest /= p;
    out = out / (p * p) * (p * p - 1);
  }
  return out;
}

}  // namespace

TEST_CASE("lcm ladder matches the prime-power oracle") {
  for (std::uint64_t k = 2; k <= 12; ++k)
    CHECK(lcm_ladder(k) == lcm_prime_power_oracle(k));
  CHECK(lcm_ladder(2) == 2);
  CHECK(lcm_ladder(3) == 6);
  CHECK(lcm_ladder(4) == 12);
  CHECK(lcm_ladder(5) == 60);
  CHECK(lcm_ladder(6) == 60);
  CHECK(lcm_ladder(7) == 420);
  CHECK(lcm_ladder(8) == 840);
}

TEST_CASE("cyclic group arithmetic") {
  FiniteGroup g = FiniteGroup::cyclic(12);
  REQUIRE(g.order() == 12);
  for (std::uint32_t a = 0; a < 12; ++a) {
    CHECK(g.index_of(g.element(a)) == a);
    CHECK(g.mul(a, g.inv(a)) == 0);
    for (std::uint32_t b = 0; b < 12; ++b) {
      GroupElem prod = g.element(g.mul(a, b));
      CHECK(prod.residue == (g.element(a).residue + g.element(b).residue) % 12);
    }
  }
}

TEST_CASE("special linear group orders match the index formula") {
  CHECK(sl2_order_formula(2) == 6);
  CHECK(sl2_order_formula(6) == 144);
  CHECK(sl2_order_formula(12) == 1152);
  CHECK(sl2_order_formula(60) == 138240);
  for (std::uint64_t m : {2ull, 3ull, 4ull, 6ull, 12ull})
    CHECK(FiniteGroup::sl2_mod(m).order() == sl2_order_formula(m));
}

TEST_CASE("matrix entries outside the determinant-one locus are rejected") {
  CHECK_THROWS_AS(sl2_elem(1, 1, 1, 1, 5), Error);
  CHECK_NOTHROW(sl2_elem(0, 4, 1, 0, 5));  // det = -4 = 1 mod 5
}

TEST_CASE("cyclic tower chain passes full verification") {
  DeckChain chain = cyclic_chain(4);
  REQUIRE(chain.depth() == 4);
  CHECK(chain.group(1).order() == 2);
  CHECK(chain.group(2).order() == 6);
  CHECK(chain.group(3).order() == 12);
  CHECK(chain.group(4).order() == 60);
  CHECK(chain.kernel_sizes == std::vector<std::uint64_t>{3, 2, 5});
  VerifyReport rep = verify_chain(chain);
  INFO(rep.to_text());
  CHECK(rep.all_pass());
}

TEST_CASE("projection composes as residue reduction") {
  DeckChain chain = cyclic_chain(4);
  const FiniteGroup& top = chain.group(4);
  for (std::uint32_t idx = 0; idx < top.order(); ++idx) {
    std::uint64_t r = top.element(idx).residue;
    std::uint32_t below = chain.project_to(4, 1, idx);
    CHECK(chain.group(1).element(below).residue == r % 2);
  }
}

TEST_CASE("congruence chain passes verification at depth 2") {
  DeckChain chain = sl2_chain(2);
  REQUIRE(chain.group(1).order() == 6);
  REQUIRE(chain.group(2).order() == 144);
  CHECK(chain.kernel_sizes == std::vector<std::uint64_t>{24});
  VerifyReport rep = verify_chain(chain);
  INFO(rep.to_text());
  CHECK(rep.all_pass());
}

TEST_CASE("prefix-restriction chain projects by restriction") {
  // Generators of S_3 x S_3 on 6 points, each preserving {0,1,2}.  The
  // block-local moves are needed: a 3-cycle pair plus a twisted
  // transposition pair alone only generate the graph of an automorphism.
  std::vector<GroupElem> gens{perm_elem({1, 2, 0, 4, 5, 3}),
                              perm_elem({1, 0, 2, 3, 4, 5}),
                              perm_elem({0, 1, 2, 3, 5, 4})};
  DeckChain chain = permutation_chain({3, 6}, gens);
  REQUIRE(chain.depth() == 2);
  CHECK(chain.group(1).order() == 6);   // restrictions generate S_3
  CHECK(chain.group(2).order() == 36);  // block pairs generate S_3 x S_3
  VerifyReport rep = verify_chain(chain);
  INFO(rep.to_text());
  CHECK(rep.all_pass());
  const FiniteGroup& top = chain.group(2);
  for (std::uint32_t idx = 0; idx < top.order(); ++idx) {
    GroupElem e = top.element(idx);
    GroupElem low = chain.group(1).element(chain.project_down(2, idx));
    for (std::uint32_t x = 0; x < 3; ++x) CHECK(low.perm[x] == e.perm[x]);
  }
}

TEST_CASE("generators that break the prefix are rejected") {
  CHECK_THROWS_AS(permutation_chain({3, 6}, {perm_elem({3, 1, 2, 0, 4, 5})}),
                  Error);
}

TEST_CASE("a corrupted projection table fails verification") {
  DeckChain chain = cyclic_chain(3);
  REQUIRE(verify_chain(chain).all_pass());
  chain.projections[0][1] = (chain.projections[0][1] + 1) %
                            static_cast<std::uint32_t>(chain.group(1).order());
  CHECK_FALSE(verify_chain(chain).all_pass());
}

TEST_CASE("ladder moduli must divide upward") {
  CHECK_THROWS_AS(cyclic_ladder({3, 4}), Error);
  CHECK_NOTHROW(cyclic_ladder({2, 4, 12}));
  CHECK_NOTHROW(cyclic_ladder({2, 2, 4}));  // flat step: trivial kernel
}
