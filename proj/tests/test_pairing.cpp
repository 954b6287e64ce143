#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "m3link/pairing.hpp"

using namespace m3link;

namespace {

FiniteAbelianGroup grp(std::initializer_list<long> fs) {
  std::vector<Int> v;
  for (long f : fs) v.emplace_back(f);
  return FiniteAbelianGroup(v);
}

IntMatrix make(int rows, int cols, std::initializer_list<long> vals) {
  IntMatrix m(rows, cols);
  auto it = vals.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.set(i, j, Int(*it++));
  return m;
}

TorsionPairing z2_pairing() {
  return TorsionPairing::from_gram(grp({2}), {{QmodZ(1, 2)}});
}

// Plumbing matrix of the star graph with one center and three -2 leaves.
IntMatrix d4_matrix() {
  return make(4, 4,
              {-2, 1, 1, 1,
               1, -2, 0, 0,
               1, 0, -2, 0,
               1, 0, 0, -2});
}

IntMatrix random_symmetric_nonsingular(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> d(-3, 3);
  for (;;) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Int v(d(rng));
        m.set(i, j, v);
        m.set(j, i, v);
      }
    if (det(m) != 0) return m;
  }
}

IntMatrix random_unimodular(std::mt19937_64& rng, int n) {
  IntMatrix m = IntMatrix::identity(n);
  std::uniform_int_distribution<int> pick(0, n - 1), coef(-2, 2);
  for (int k = 0; k < 10; ++k) {
    int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    Int c(coef(rng));
    for (int t = 0; t < n; ++t) m.set(i, t, m.at(i, t) + c * m.at(j, t));
  }
  return m;
}

}  // namespace

TEST_CASE("from_gram on the stated instances") {
  SECTION("trivial") {
    TorsionPairing p = TorsionPairing::from_gram(grp({}), {});
    REQUIRE(p.group().is_trivial());
    REQUIRE(is_nondegenerate(p));
  }
  SECTION("unique non-degenerate pairing on Z/2") {
    TorsionPairing p = z2_pairing();
    AbElement g = AbElement::generator(p.group(), 0);
    REQUIRE(p.value(g, g) == QmodZ(1, 2));
  }
  SECTION("well-definedness violation identifies the cell") {
    REQUIRE_THROWS_MATCHES(
        TorsionPairing::from_gram(grp({2}), {{QmodZ(1, 3)}}), MalformedGramError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("(0,0)")));
  }
  SECTION("asymmetry rejected") {
    REQUIRE_THROWS_AS(
        TorsionPairing::from_gram(grp({2, 2}), {{QmodZ(), QmodZ(1, 2)}, {QmodZ(), QmodZ()}}),
        MalformedGramError);
  }
}

TEST_CASE("from_linking_matrix on the stated instances") {
  SECTION("framing 2 unknot") {
    TorsionPairing p = TorsionPairing::from_linking_matrix(make(1, 1, {2}));
    REQUIRE(p.group() == grp({2}));
    AbElement g = AbElement::generator(p.group(), 0);
    REQUIRE(p.value(g, g) == QmodZ(1, 2));  // -1/2 mod 1
  }
  SECTION("unimodular matrix gives the trivial pairing") {
    TorsionPairing p = TorsionPairing::from_linking_matrix(IntMatrix::identity(2));
    REQUIRE(p.group().is_trivial());
  }
  SECTION("D4 plumbing matrix") {
    // Hand-derived inverse of the positive-definite counterpart: solving
    // A x = e_j for A = 2I - star adjacency gives
    //   A^{-1} = [[2,1,1,1],[1,1,1/2,1/2],[1,1/2,1,1/2],[1,1/2,1/2,1]]
    // so -L^{-1} = A^{-1} has zero diagonal mod 1 and 1/2 off the center.
    RatMatrix inv = rational_inverse(d4_matrix());
    REQUIRE(inv.at(0, 0) == Rat(-2));
    REQUIRE(inv.at(1, 1) == Rat(-1));
    REQUIRE(inv.at(1, 2) == Rat(-1, 2));

    TorsionPairing p = TorsionPairing::from_linking_matrix(d4_matrix());
    REQUIRE(p.group() == grp({2, 2}));
    AbElement a = AbElement::generator(p.group(), 0);
    AbElement b = AbElement::generator(p.group(), 1);
    REQUIRE(p.value(a, a).is_zero());
    REQUIRE(p.value(b, b).is_zero());
    REQUIRE(p.value(a + b, a + b).is_zero());
    REQUIRE(p.value(a, b) == QmodZ(1, 2));
    REQUIRE(is_nondegenerate(p));
  }
  SECTION("singular matrix rejected") {
    REQUIRE_THROWS_AS(TorsionPairing::from_linking_matrix(IntMatrix(2, 2)), SingularMatrixError);
  }
  SECTION("asymmetric matrix rejected") {
    REQUIRE_THROWS_AS(TorsionPairing::from_linking_matrix(make(2, 2, {1, 2, 3, 4})),
                      MalformedGramError);
  }
}

TEST_CASE("value is bilinear") {
  TorsionPairing p = TorsionPairing::from_linking_matrix(d4_matrix());
  AbElement z = AbElement::zero(p.group());
  for (const auto& e : all_elements(p.group())) REQUIRE(p.value(z, e).is_zero());
  AbElement a = AbElement::generator(p.group(), 0);
  AbElement b = AbElement::generator(p.group(), 1);
  REQUIRE(p.value(a + b, a) == p.value(a, a) + p.value(b, a));
  REQUIRE_THROWS_AS(p.value(AbElement::generator(grp({2}), 0), a), GroupMismatchError);
}

TEST_CASE("orthogonal_sum on the stated instances") {
  SECTION("sum with the trivial pairing") {
    TorsionPairing p = z2_pairing();
    TorsionPairing t = TorsionPairing::from_gram(grp({}), {});
    REQUIRE(are_isomorphic(orthogonal_sum(p, t), p).isomorphic);
  }
  SECTION("two copies of the Z/2 pairing") {
    TorsionPairing s = orthogonal_sum(z2_pairing(), z2_pairing());
    REQUIRE(s.group() == grp({2, 2}));
    AbElement a = AbElement::generator(s.group(), 0);
    AbElement b = AbElement::generator(s.group(), 1);
    REQUIRE(s.value(a, a) == QmodZ(1, 2));
    REQUIRE(s.value(b, b) == QmodZ(1, 2));
    REQUIRE(s.value(a, b).is_zero());
  }
  SECTION("coprime orders merge by CRT") {
    TorsionPairing p3 = TorsionPairing::from_gram(grp({3}), {{QmodZ(1, 3)}});
    TorsionPairing s = orthogonal_sum(z2_pairing(), p3);
    REQUIRE(s.group() == grp({6}));
    AbElement g = AbElement::generator(s.group(), 0);
    REQUIRE(s.value(g, g) == QmodZ(5, 6));  // 1/2 + 1/3
  }
}

TEST_CASE("is_nondegenerate on the stated instances") {
  REQUIRE(is_nondegenerate(TorsionPairing::from_gram(grp({}), {})));
  REQUIRE_FALSE(is_nondegenerate(TorsionPairing::from_gram(grp({2}), {{QmodZ()}})));
  REQUIRE(is_nondegenerate(TorsionPairing::from_linking_matrix(d4_matrix())));
  // degenerate in one factor only
  TorsionPairing mixed = TorsionPairing::from_gram(
      grp({2, 2}), {{QmodZ(1, 2), QmodZ()}, {QmodZ(), QmodZ()}});
  REQUIRE_FALSE(is_nondegenerate(mixed));
}

TEST_CASE("are_isomorphic on the stated instances") {
  SECTION("identity witness on equal pairings") {
    TorsionPairing p = TorsionPairing::from_linking_matrix(d4_matrix());
    PairingIsoReport r = are_isomorphic(p, p);
    REQUIRE(r.isomorphic);
    REQUIRE(r.witness.has_value());
    REQUIRE(r.witness->matrix() == IntMatrix::identity(2));
  }
  SECTION("diagonal vs hyperbolic on (Z/2)^2") {
    TorsionPairing diag = orthogonal_sum(z2_pairing(), z2_pairing());
    TorsionPairing hyp = TorsionPairing::from_linking_matrix(d4_matrix());
    PairingIsoReport r = are_isomorphic(diag, hyp);
    REQUIRE_FALSE(r.isomorphic);
    REQUIRE_FALSE(r.witness.has_value());
  }
  SECTION("Z/4 self-pairing 1/4 vs 3/4") {
    TorsionPairing p1 = TorsionPairing::from_gram(grp({4}), {{QmodZ(1, 4)}});
    TorsionPairing p2 = TorsionPairing::from_gram(grp({4}), {{QmodZ(3, 4)}});
    PairingIsoReport r = are_isomorphic(p1, p2);
    REQUIRE_FALSE(r.isomorphic);
    // the multiset prefilter alone separates them
    REQUIRE(r.invariants_compared.size() == 2);
    REQUIRE(std::get<1>(r.invariants_compared[1]) != std::get<2>(r.invariants_compared[1]));
  }
  SECTION("group mismatch reported via invariants") {
    PairingIsoReport r = are_isomorphic(z2_pairing(), TorsionPairing::from_gram(grp({}), {}));
    REQUIRE_FALSE(r.isomorphic);
    REQUIRE(r.invariants_compared.size() == 1);
  }
}

TEST_CASE("order_realization_witness on the stated instances") {
  SECTION("Z/2") {
    TorsionPairing p = z2_pairing();
    AbElement g = AbElement::generator(p.group(), 0);
    AbElement b = order_realization_witness(p, g);
    REQUIRE(p.value(g, b).order() == 2);
  }
  SECTION("hyperbolic (Z/2)^2") {
    TorsionPairing p = TorsionPairing::from_linking_matrix(d4_matrix());
    AbElement a = AbElement::generator(p.group(), 0);
    AbElement b = order_realization_witness(p, a);
    REQUIRE(p.value(a, b).order() == 2);
  }
  SECTION("Z/6 with self-pairing 5/6") {
    TorsionPairing p = TorsionPairing::from_gram(grp({6}), {{QmodZ(5, 6)}});
    AbElement g = AbElement::generator(p.group(), 0);
    AbElement b = order_realization_witness(p, g);
    REQUIRE(p.value(g, b).order() == 6);
  }
  SECTION("rejects degenerate pairings and zero elements") {
    TorsionPairing zp = TorsionPairing::from_gram(grp({2}), {{QmodZ()}});
    REQUIRE_THROWS_AS(order_realization_witness(zp, AbElement::generator(grp({2}), 0)),
                      DegeneratePairingError);
    REQUIRE_THROWS_AS(order_realization_witness(z2_pairing(), AbElement::zero(grp({2}))), Error);
  }
}

TEST_CASE("random_nondegenerate") {
  SECTION("trivial group") {
    REQUIRE(random_nondegenerate(grp({}), 1).group().is_trivial());
  }
  SECTION("Z/2 has a unique choice") {
    for (std::uint64_t s : {1ull, 2ull, 99ull})
      REQUIRE(random_nondegenerate(grp({2}), s).gram()[0][0] == QmodZ(1, 2));
  }
  SECTION("deterministic in the seed and non-degenerate") {
    TorsionPairing a = random_nondegenerate(grp({3, 3}), 12345);
    TorsionPairing b = random_nondegenerate(grp({3, 3}), 12345);
    REQUIRE(a == b);
    REQUIRE(is_nondegenerate(a));
    TorsionPairing c = random_nondegenerate(grp({3, 3}), 54321);
    REQUIRE(is_nondegenerate(c));
  }
}

TEST_CASE("linking pairing is invariant under unimodular congruence") {
  std::mt19937_64 rng(600);
  for (int trial = 0; trial < 15; ++trial) {
    int n = 2 + static_cast<int>(rng() % 2);
    IntMatrix l = random_symmetric_nonsingular(rng, n);
    IntMatrix u = random_unimodular(rng, n);
    TorsionPairing p1 = TorsionPairing::from_linking_matrix(l);
    TorsionPairing p2 = TorsionPairing::from_linking_matrix(u.transpose() * l * u);
    REQUIRE(are_isomorphic(p1, p2).isomorphic);
  }
}

TEST_CASE("order realization holds for every nonzero element of random pairings") {
  std::mt19937_64 rng(77);
  std::vector<FiniteAbelianGroup> gs = {grp({4}), grp({2, 4}), grp({3, 3}), grp({2, 2, 2}), grp({12})};
  for (const auto& g : gs) {
    TorsionPairing p = random_nondegenerate(g, rng());
    for (const auto& a : all_elements(g)) {
      if (a.is_zero()) continue;
      AbElement b = order_realization_witness(p, a);
      REQUIRE(p.value(a, b).order() == a.order());
    }
  }
}

TEST_CASE("orthogonal_sum is commutative and associative up to isomorphism") {
  TorsionPairing p = z2_pairing();
  TorsionPairing q = TorsionPairing::from_gram(grp({3}), {{QmodZ(1, 3)}});
  TorsionPairing r = TorsionPairing::from_gram(grp({4}), {{QmodZ(1, 4)}});
  REQUIRE(are_isomorphic(orthogonal_sum(p, q), orthogonal_sum(q, p)).isomorphic);
  REQUIRE(are_isomorphic(orthogonal_sum(orthogonal_sum(p, q), r),
                         orthogonal_sum(p, orthogonal_sum(q, r)))
              .isomorphic);
}

TEST_CASE("are_isomorphic behaves like an equivalence relation") {
  std::mt19937_64 rng(4096);
  TorsionPairing a = random_nondegenerate(grp({2, 4}), 11);
  TorsionPairing b = random_nondegenerate(grp({2, 4}), 22);
  REQUIRE(are_isomorphic(a, a).isomorphic);
  PairingIsoReport ab = are_isomorphic(a, b);
  REQUIRE(ab.isomorphic == are_isomorphic(b, a).isomorphic);
  if (ab.isomorphic && ab.witness) {
    // the witness transports values exactly
    for (const auto& x : all_elements(a.group()))
      for (const auto& y : all_elements(a.group()))
        REQUIRE(b.value(ab.witness->apply(x), ab.witness->apply(y)) == a.value(x, y));
  }
}

TEST_CASE("value-group exponent equals group exponent for non-degenerate pairings") {
  std::mt19937_64 rng(31415);
  std::vector<FiniteAbelianGroup> gs = {grp({2}), grp({4}), grp({2, 4}), grp({3, 3}), grp({6}),
                                        grp({8}), grp({2, 2})};
  for (const auto& g : gs) {
    TorsionPairing p = random_nondegenerate(g, rng());
    REQUIRE(p.values_exponent() == g.exponent());
  }
}
