#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "m3link/finitegroup.hpp"

using namespace m3link;

namespace {

FiniteAbelianGroup grp(std::initializer_list<long> fs) {
  std::vector<Int> v;
  for (long f : fs) v.emplace_back(f);
  return FiniteAbelianGroup(v);
}

int center_size(const FiniteGroup& g) {
  int c = 0;
  for (int a = 0; a < g.size(); ++a) {
    bool central = true;
    for (int b = 0; b < g.size() && central; ++b)
      if (g.mul(a, b) != g.mul(b, a)) central = false;
    if (central) ++c;
  }
  return c;
}

}  // namespace

TEST_CASE("group_from_tag on the stated instances") {
  REQUIRE(group_from_tag("cyclic(1)").size() == 1);
  FiniteGroup q8 = group_from_tag("quaternion(8)");
  REQUIRE(q8.size() == 8);
  REQUIRE(center_size(q8) == 2);
  FiniteGroup klein = group_from_tag("product(cyclic(2),cyclic(2))");
  REQUIRE(klein.size() == 4);
  REQUIRE(klein.is_abelian());
  REQUIRE(count_involutions(klein) == 3);
  REQUIRE_THROWS_AS(group_from_tag("sporadic(1)"), InvalidTagError);
  REQUIRE_THROWS_AS(group_from_tag("quaternion(6)"), InvalidTagError);
  REQUIRE_THROWS_AS(group_from_tag("nonsense"), InvalidTagError);
}

TEST_CASE("table validation rejects non-groups") {
  // identity fails
  REQUIRE_THROWS(FiniteGroup(2, {1, 0, 0, 1}, "bad"));
  // associativity fails (x*x = x table on two elements with identity row/col ok)
  REQUIRE_THROWS(FiniteGroup(3, {0, 1, 2, 1, 2, 2, 2, 0, 1}, "bad"));
}

TEST_CASE("element orders in quaternion groups") {
  FiniteGroup q8 = quaternion_group(8);
  std::multiset<long> orders;
  for (int a = 0; a < 8; ++a) orders.insert(to_long_checked(q8.order_of(a), "ord"));
  REQUIRE(orders == std::multiset<long>{1, 2, 4, 4, 4, 4, 4, 4});
  REQUIRE(count_involutions(q8) == 1);

  FiniteGroup q16 = quaternion_group(16);
  REQUIRE(count_involutions(q16) == 1);
  REQUIRE(q16.order_of(1) == 8);  // x has order 2n = 8
}

TEST_CASE("derived subgroups on the stated instances") {
  REQUIRE(derived_subgroup(cyclic_group(6)).group.size() == 1);
  SubgroupWithInclusion dq8 = derived_subgroup(quaternion_group(8));
  REQUIRE(dq8.group.size() == 2);  // the center {1, -1}
  SubgroupWithInclusion dd8 = derived_subgroup(dihedral_group(8));
  REQUIRE(dd8.group.size() == 2);
}

TEST_CASE("sylow 2-subgroups on the stated instances") {
  REQUIRE(sylow2(cyclic_group(15)).group.size() == 1);
  FiniteGroup q16 = quaternion_group(16);
  REQUIRE(sylow2(q16).group == q16);
  SubgroupWithInclusion s = sylow2(group_from_tag("product(quaternion(8),cyclic(3))"));
  REQUIRE(s.group.size() == 8);
  REQUIRE(is_generalized_quaternion(s.group));
  REQUIRE_THROWS_AS(sylow2(cyclic_group(1), 0), BoundExceededError);
}

TEST_CASE("derived series and quotients") {
  FiniteGroup q8 = quaternion_group(8);
  std::vector<std::vector<int>> series = derived_series(q8);
  REQUIRE(series.size() == 3);  // Q8 > Z/2 > 1
  REQUIRE(series[1].size() == 2);
  REQUIRE(series[2].size() == 1);

  // Q8 / Q8'' = Q8 since Q8'' is trivial
  QuotientWithProjection q = quotient_group(q8, series[2], "Q8/Q8''");
  REQUIRE(q.group.size() == 8);
  REQUIRE(is_generalized_quaternion(q.group));

  // Q8 / center is the Klein group
  QuotientWithProjection k = quotient_group(q8, series[1], "Q8/Z");
  REQUIRE(k.group.size() == 4);
  REQUIRE(k.group.is_abelian());
  REQUIRE(count_involutions(k.group) == 3);

  // non-normal subgroups are rejected: a reflection in dihedral(8)
  FiniteGroup d8 = dihedral_group(8);
  REQUIRE_THROWS(quotient_group(d8, d8.subgroup_closure({4}), "bad"));
}

TEST_CASE("abelianization of table groups") {
  REQUIRE(abelianization(quaternion_group(8)).group == grp({2, 2}));
  REQUIRE(abelianization(quaternion_group(12)).group == grp({4}));
  REQUIRE(abelianization(dihedral_group(8)).group == grp({2, 2}));
  REQUIRE(abelianization(cyclic_group(6)).group == grp({6}));
  REQUIRE(abelianization(semidihedral_group(16)).group == grp({2, 2}));

  // the projection is a homomorphism
  FiniteGroup q8 = quaternion_group(8);
  TableAbelianization ab = abelianization(q8);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      AbElement ea(ab.group, ab.coords_of[a]);
      AbElement eb(ab.group, ab.coords_of[b]);
      AbElement eab(ab.group, ab.coords_of[q8.mul(a, b)]);
      REQUIRE(ea + eb == eab);
    }
}

TEST_CASE("generalized quaternion recognition") {
  REQUIRE(is_generalized_quaternion(quaternion_group(8)));
  REQUIRE(is_generalized_quaternion(quaternion_group(16)));
  REQUIRE(is_generalized_quaternion(quaternion_group(32)));
  REQUIRE_FALSE(is_generalized_quaternion(dihedral_group(16)));
  REQUIRE_FALSE(is_generalized_quaternion(semidihedral_group(16)));
  REQUIRE_FALSE(is_generalized_quaternion(cyclic_group(8)));
  REQUIRE_FALSE(is_generalized_quaternion(group_from_tag("product(quaternion(8),cyclic(3))")));
}

TEST_CASE("subgroup closure and normalizers") {
  FiniteGroup d8 = dihedral_group(8);
  std::vector<int> rot = d8.subgroup_closure({1});
  REQUIRE(rot.size() == 4);
  REQUIRE(d8.is_normal(rot));
  std::vector<int> refl = d8.subgroup_closure({4});
  REQUIRE(refl.size() == 2);
  REQUIRE_FALSE(d8.is_normal(refl));
  REQUIRE(d8.normalizer(refl).size() == 4);
}

TEST_CASE("semidihedral relation holds") {
  FiniteGroup sd = semidihedral_group(16);
  int r = 1, s = 8;
  // s r s = r^3 (2^{k-2} - 1 = 3 for order 16)
  REQUIRE(sd.mul(sd.mul(s, r), s) == sd.power(r, 3));
  REQUIRE(sd.order_of(r) == 8);
  REQUIRE(sd.order_of(s) == 2);
}

TEST_CASE("from_table JSON") {
  nlohmann::json j = {{"size", 2}, {"table", {{0, 1}, {1, 0}}}, {"name", "z2"}};
  FiniteGroup g = group_from_table_json(j);
  REQUIRE(g.size() == 2);
  REQUIRE(g.name() == "z2");
  REQUIRE_THROWS_AS(group_from_table_json(nlohmann::json::array()), InvalidTagError);
}
