#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "m3link/serial.hpp"
#include "m3link/snf.hpp"

using namespace m3link;

namespace {

IntMatrix make(int rows, int cols, std::initializer_list<long> vals) {
  IntMatrix m(rows, cols);
  auto it = vals.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.set(i, j, Int(*it++));
  return m;
}

// Independent oracle: invariant factors of a diagonal presentation, computed
// by regrouping prime powers (sorted exponents per prime).
std::vector<Int> diagonal_invariant_factors_oracle(const std::vector<Int>& diag) {
  std::map<Int, std::vector<int>> exps;
  int nonzero = 0;
  for (const auto& d : diag) {
    if (d == 0) continue;
    ++nonzero;
    for (const auto& [p, e] : factorize(d)) exps[p].push_back(e);
  }
  std::vector<Int> factors(nonzero, Int(1));
  for (auto& [p, es] : exps) {
    std::sort(es.begin(), es.end());
    // largest exponents go to the last invariant factor
    for (std::size_t k = 0; k < es.size(); ++k) {
      Int pe = 1;
      for (int i = 0; i < es[es.size() - 1 - k]; ++i) pe *= p;
      factors[nonzero - 1 - k] *= pe;
    }
  }
  std::vector<Int> out;
  for (const auto& f : factors)
    if (f > 1) out.push_back(f);
  return out;
}

IntMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, int span = 5) {
  IntMatrix m(rows, cols);
  std::uniform_int_distribution<int> d(-span, span);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.set(i, j, Int(d(rng)));
  return m;
}

IntMatrix random_unimodular(std::mt19937_64& rng, int n, int ops = 12) {
  IntMatrix m = IntMatrix::identity(n);
  if (n == 0) return m;
  std::uniform_int_distribution<int> pick(0, n - 1), coef(-2, 2), kind(0, 2);
  for (int k = 0; k < ops; ++k) {
    int i = pick(rng), j = pick(rng);
    switch (kind(rng)) {
      case 0: {  // row_i += c * row_j
        if (i == j) break;
        Int c(coef(rng));
        for (int t = 0; t < n; ++t) m.set(i, t, m.at(i, t) + c * m.at(j, t));
        break;
      }
      case 1: {  // swap rows
        for (int t = 0; t < n; ++t) {
          Int tmp = m.at(i, t);
          m.set(i, t, m.at(j, t));
          m.set(j, t, tmp);
        }
        break;
      }
      default: {  // negate a row
        for (int t = 0; t < n; ++t) m.set(i, t, -m.at(i, t));
        break;
      }
    }
  }
  return m;
}

void check_smith(const IntMatrix& a) {
  SmithDecomposition s = smith_normal_form(a);
  REQUIRE(s.U * a * s.V == s.D);
  REQUIRE(s.U * s.Uinv == IntMatrix::identity(a.rows()));
  REQUIRE(s.V * s.Vinv == IntMatrix::identity(a.cols()));
  REQUIRE(unimodular_inverse(s.U) == s.Uinv);
  // diagonal shape: nonnegative, divisibility chain, off-diagonal zero
  s.D.for_each_nonzero([&](int i, int j, const Int&) { REQUIRE(i == j); });
  for (std::size_t i = 0; i < s.diagonal.size(); ++i) {
    REQUIRE(s.diagonal[i] >= 0);
    if (i + 1 < s.diagonal.size() && s.diagonal[i] != 0)
      REQUIRE(s.diagonal[i + 1] % s.diagonal[i] == 0);
    if (s.diagonal[i] == 0 && i + 1 < s.diagonal.size()) REQUIRE(s.diagonal[i + 1] == 0);
  }
  // A = Uinv D Vinv
  REQUIRE(s.Uinv * s.D * s.Vinv == a);
}

}  // namespace

TEST_CASE("IntMatrix basic storage and equality") {
  IntMatrix a(3, 3);
  a.set(0, 2, 7);
  a.set(2, 1, -4);
  REQUIRE(a.at(0, 2) == 7);
  REQUIRE(a.at(1, 1) == 0);
  REQUIRE(a.is_dense());
  REQUIRE_THROWS_AS(a.at(3, 0), DimensionError);

  // large shapes switch to triplet storage; semantics must not change
  IntMatrix big(200, 60);
  REQUIRE_FALSE(big.is_dense());
  big.set(150, 33, 5);
  big.set(150, 33, 0);  // erase
  REQUIRE(big.at(150, 33) == 0);
  big.set(199, 59, -2);
  big.add_to(199, 59, 2);
  REQUIRE(big.is_zero());

  IntMatrix x = make(2, 2, {1, 2, 3, 4});
  IntMatrix y = make(2, 2, {1, 2, 3, 4});
  REQUIRE(x == y);
  y.set(1, 1, 5);
  REQUIRE(x != y);
}

TEST_CASE("IntMatrix arithmetic") {
  IntMatrix a = make(2, 3, {1, 0, 2, -1, 3, 1});
  IntMatrix b = make(3, 2, {3, 1, 2, 1, 1, 0});
  IntMatrix ab = make(2, 2, {5, 1, 4, 2});
  REQUIRE(a * b == ab);
  REQUIRE(a.transpose().transpose() == a);
  REQUIRE((a - a).is_zero());
  std::vector<Int> v{1, 1, 1};
  std::vector<Int> av = a.apply(v);
  REQUIRE(av == std::vector<Int>{3, 3});
}

TEST_CASE("smith_normal_form on the stated instances") {
  SECTION("identity") {
    SmithDecomposition s = smith_normal_form(IntMatrix::identity(3));
    REQUIRE(s.D == IntMatrix::identity(3));
    REQUIRE(s.U == IntMatrix::identity(3));
    REQUIRE(s.V == IntMatrix::identity(3));
  }
  SECTION("diagonal(2,3) reduces to diagonal(1,6)") {
    SmithDecomposition s = smith_normal_form(IntMatrix::diagonal({2, 3}));
    REQUIRE(s.diagonal == std::vector<Int>{1, 6});
    check_smith(IntMatrix::diagonal({2, 3}));
  }
  SECTION("zero matrix") {
    IntMatrix z(2, 2);
    SmithDecomposition s = smith_normal_form(z);
    REQUIRE(s.D == z);
    REQUIRE(s.rank == 0);
  }
  SECTION("empty shapes are legal") {
    check_smith(IntMatrix(0, 0));
    check_smith(IntMatrix(0, 3));
    check_smith(IntMatrix(3, 0));
  }
}

TEST_CASE("smith_normal_form randomized structural checks") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 60; ++trial) {
    int rows = static_cast<int>(rng() % 5);
    int cols = static_cast<int>(rng() % 5);
    check_smith(random_matrix(rng, rows, cols));
  }
}

TEST_CASE("smith diagonal matches the prime-regrouping oracle on diagonals") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(0, 30);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 1 + static_cast<int>(rng() % 4);
    std::vector<Int> diag;
    for (int i = 0; i < n; ++i) diag.push_back(Int(d(rng)));
    SmithDecomposition s = smith_normal_form(IntMatrix::diagonal(diag));
    REQUIRE(s.invariant_factors() == diagonal_invariant_factors_oracle(diag));
  }
}

TEST_CASE("smith diagonal is invariant under unimodular congruence") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng() % 3);
    IntMatrix a = random_matrix(rng, n, n);
    IntMatrix p = random_unimodular(rng, n);
    IntMatrix q = random_unimodular(rng, n);
    SmithDecomposition s1 = smith_normal_form(a);
    SmithDecomposition s2 = smith_normal_form(p * a * q);
    REQUIRE(s1.diagonal == s2.diagonal);
  }
}

TEST_CASE("solve_integer on the stated instances") {
  SECTION("identity system") {
    auto x = solve_integer(IntMatrix::identity(2), {5, -2});
    REQUIRE(x.has_value());
    REQUIRE(*x == std::vector<Int>{5, -2});
  }
  SECTION("parity obstruction") {
    auto x = solve_integer(make(1, 1, {2}), {3});
    REQUIRE_FALSE(x.has_value());
  }
  SECTION("Bezout row") {
    IntMatrix a = make(1, 2, {2, 3});
    auto x = solve_integer(a, {1});
    REQUIRE(x.has_value());
    REQUIRE(a.apply(*x) == std::vector<Int>{1});
  }
}

TEST_CASE("solve_integer agrees with the cokernel membership test") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> d(-4, 4);
  for (int trial = 0; trial < 60; ++trial) {
    int rows = 1 + static_cast<int>(rng() % 4);
    int cols = static_cast<int>(rng() % 4);
    IntMatrix a = random_matrix(rng, rows, cols, 3);
    std::vector<Int> b(rows);
    for (auto& v : b) v = d(rng);
    CokernelPresentation ck = cokernel_presentation(a);
    auto x = solve_integer(a, b);
    REQUIRE(x.has_value() == ck.maps_to_zero(b));
    if (x) REQUIRE(a.apply(*x) == b);
  }
}

TEST_CASE("cokernel_presentation on the stated instances") {
  SECTION("Z/2") {
    CokernelPresentation c = cokernel_presentation(make(1, 1, {2}));
    REQUIRE(c.factors == std::vector<Int>{2});
    REQUIRE(c.free_rank == 0);
  }
  SECTION("diagonal(1,4,6)") {
    CokernelPresentation c = cokernel_presentation(IntMatrix::diagonal({1, 4, 6}));
    REQUIRE(c.factors == std::vector<Int>{2, 12});
    REQUIRE(c.free_rank == 0);
  }
  SECTION("zero 2x2") {
    CokernelPresentation c = cokernel_presentation(IntMatrix(2, 2));
    REQUIRE(c.factors.empty());
    REQUIRE(c.free_rank == 2);
  }
}

TEST_CASE("cokernel projection is a homomorphism killing the column space") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 30; ++trial) {
    int rows = 1 + static_cast<int>(rng() % 4);
    int cols = static_cast<int>(rng() % 4);
    IntMatrix a = random_matrix(rng, rows, cols, 4);
    CokernelPresentation ck = cokernel_presentation(a);
    for (int j = 0; j < cols; ++j) REQUIRE(ck.maps_to_zero(a.col_vector(j)));
    // generator lifts project to the standard basis
    for (std::size_t g = 0; g < ck.factors.size(); ++g) {
      std::vector<Int> lift = ck.gen_lifts.col_vector(static_cast<int>(g));
      std::vector<Int> coords = ck.project_torsion(lift);
      for (std::size_t i = 0; i < ck.factors.size(); ++i)
        REQUIRE(coords[i] == (i == g ? 1 : 0));
    }
  }
}

TEST_CASE("rational_inverse on the stated instances") {
  SECTION("scalar") {
    RatMatrix inv = rational_inverse(make(1, 1, {2}));
    REQUIRE(inv.at(0, 0) == Rat(1, 2));
  }
  SECTION("identity") {
    REQUIRE(rational_inverse(IntMatrix::identity(3)) == RatMatrix::identity(3));
  }
  SECTION("2x2 against the adjugate oracle") {
    IntMatrix a = make(2, 2, {2, 1, 1, 2});
    RatMatrix inv = rational_inverse(a);
    // adjugate / det with det = 3
    REQUIRE(inv.at(0, 0) == Rat(2, 3));
    REQUIRE(inv.at(0, 1) == Rat(-1, 3));
    REQUIRE(inv.at(1, 0) == Rat(-1, 3));
    REQUIRE(inv.at(1, 1) == Rat(2, 3));
  }
  SECTION("singular input is rejected") {
    REQUIRE_THROWS_AS(rational_inverse(make(2, 2, {1, 2, 2, 4})), SingularMatrixError);
  }
}

TEST_CASE("rational_inverse of a unimodular matrix is integral") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + static_cast<int>(rng() % 4);
    IntMatrix u = random_unimodular(rng, n);
    RatMatrix inv = rational_inverse(u);
    REQUIRE(inv.is_integral());
    REQUIRE(inv.to_int() * u == IntMatrix::identity(n));
    REQUIRE(unimodular_inverse(u) == inv.to_int());
  }
}

TEST_CASE("kernel_basis spans the kernel") {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 40; ++trial) {
    int rows = 1 + static_cast<int>(rng() % 4);
    int cols = 1 + static_cast<int>(rng() % 5);
    IntMatrix a = random_matrix(rng, rows, cols, 3);
    IntMatrix k = kernel_basis(a);
    REQUIRE((a * k).is_zero());
    SmithDecomposition s = smith_normal_form(a);
    REQUIRE(k.cols() == cols - s.rank);
    // columns are primitive and independent: their SNF diagonal is all ones
    if (k.cols() > 0) {
      SmithDecomposition ks = smith_normal_form(k);
      REQUIRE(ks.rank == k.cols());
    }
  }
}

TEST_CASE("determinant via smith form") {
  REQUIRE(det(make(2, 2, {2, 1, 1, 2})) == 3);
  REQUIRE(det(make(2, 2, {0, 1, 1, 0})) == -1);
  REQUIRE(det(make(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9})) == 0);
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    IntMatrix u = random_unimodular(rng, 3);
    Int d = det(u);
    REQUIRE((d == 1 || d == -1));
  }
}

TEST_CASE("rational_solve") {
  IntMatrix a = make(2, 2, {2, 0, 0, 3});
  std::vector<Rat> x = rational_solve(a, {Rat(1), Rat(1)});
  REQUIRE(x == std::vector<Rat>{Rat(1, 2), Rat(1, 3)});
  REQUIRE_THROWS_AS(rational_solve(make(2, 1, {1, 1}), {Rat(0), Rat(1)}), Error);
}

TEST_CASE("matrix JSON round trip") {
  IntMatrix a = make(2, 3, {1, 0, -7, 0, 123456789, 2});
  a.set(1, 1, Int("123456789123456789123456789"));
  json j = to_json(a);
  REQUIRE(j["rows"] == 2);
  REQUIRE(j["cols"] == 3);
  IntMatrix b = int_matrix_from_json(j);
  REQUIRE(a == b);
  REQUIRE_THROWS_AS(int_matrix_from_json(json::array()), SerializationError);
}
