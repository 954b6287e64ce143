#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "m3link/verifier.hpp"

using namespace m3link;

namespace {

FiniteAbelianGroup grp(std::initializer_list<long> fs) {
  std::vector<Int> v;
  for (long f : fs) v.emplace_back(f);
  return FiniteAbelianGroup(v);
}

const std::vector<CatalogEntry>& catalog() {
  static std::vector<CatalogEntry> c = builtin_catalog();
  return c;
}

}  // namespace

TEST_CASE("catalog structure") {
  const auto& c = catalog();
  std::set<std::string> ids;
  int lens = 0, sums = 0;
  for (const auto& e : c) {
    REQUIRE(ids.insert(e.id).second);
    if (e.id.rfind("lens_", 0) == 0) ++lens;
    if (e.id.rfind("sum_", 0) == 0) ++sums;
  }
  REQUIRE(lens == 45);  // sum of phi(p) for p = 2..12
  REQUIRE(sums >= 100);
  REQUIRE_NOTHROW(catalog_entry(c, "spaceform_q8"));
  REQUIRE_NOTHROW(catalog_entry(c, "rp3_rp3"));
  REQUIRE_THROWS_AS(catalog_entry(c, "missing"), UnsupportedEntryError);
  // metadata invariant: stated order equals the order of the tagged group
  for (const auto& e : c)
    if (e.pi1_finite_order && e.known_group_tag)
      REQUIRE(Int(group_from_tag(*e.known_group_tag).size()) == *e.pi1_finite_order);
}

TEST_CASE("catalog JSON round trip") {
  const auto& c = catalog();
  json j = catalog_to_json(c);
  std::vector<CatalogEntry> back = catalog_from_json(j);
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    REQUIRE(back[i].id == c[i].id);
    REQUIRE(to_json(back[i]) == to_json(c[i]));
  }
}

TEST_CASE("derived quotients of catalog entries") {
  SECTION("Q8 at depth 2 is Q8 itself") {
    DerivedQuotient q = derived_quotient_catalog(catalog_entry(catalog(), "spaceform_q8"), 2);
    REQUIRE(q.kind == DerivedQuotient::Kind::finite);
    REQUIRE(q.table->size() == 8);
    REQUIRE(is_generalized_quaternion(*q.table));
  }
  SECTION("lens spaces stabilize immediately") {
    DerivedQuotient q = derived_quotient_catalog(catalog_entry(catalog(), "lens_5_1"), 2);
    REQUIRE(q.kind == DerivedQuotient::Kind::finite);
    REQUIRE(q.table->size() == 5);
    REQUIRE(q.table->is_abelian());
  }
  SECTION("RP3 # RP3 has an infinite depth-2 quotient") {
    DerivedQuotient q = derived_quotient_catalog(catalog_entry(catalog(), "rp3_rp3"), 2);
    REQUIRE(q.kind == DerivedQuotient::Kind::infinite_free_product);
    REQUIRE(q.free_product_orders == std::vector<Int>{2, 2});
  }
  SECTION("coprime sums have a cyclic depth-1 quotient") {
    DerivedQuotient q = derived_quotient_catalog(catalog_entry(catalog(), "sum_lens_2_1_3_1"), 1);
    REQUIRE(q.kind == DerivedQuotient::Kind::finite);
    REQUIRE(q.table->size() == 6);
  }
}

TEST_CASE("theorem check on the stated instances") {
  CupDataRegistry registry;
  SECTION("L(2,1) with its full fundamental group") {
    TheoremReport r =
        check_theorem1(make_quotient_spec(catalog_entry(catalog(), "lens_2_1"), 2), &registry);
    REQUIRE(r.verdict == "PASS");
    REQUIRE(r.c_group == grp({2}));
    REQUIRE(r.embedding_search.size() == 2);  // phi(2) * 2 orientations
    REQUIRE(r.hit.has_value());
  }
  SECTION("S^3/Q8 passes with the hyperbolic pairing") {
    TheoremReport r =
        check_theorem1(make_quotient_spec(catalog_entry(catalog(), "spaceform_q8"), 2), &registry);
    REQUIRE(r.verdict == "PASS");
    REQUIRE(r.h2 == grp({2, 2}));
    REQUIRE(r.c_cyclic);
    REQUIRE(r.cup_nondegenerate);
  }
  SECTION("L(5,1) sweeps to a matching unit") {
    TheoremReport r =
        check_theorem1(make_quotient_spec(catalog_entry(catalog(), "lens_5_1"), 2), &registry);
    REQUIRE(r.verdict == "PASS");
    REQUIRE(r.embedding_search.size() == 8);  // phi(5) * 2
  }
  SECTION("infinite quotient reports UNSUPPORTED") {
    TheoremReport r =
        check_theorem1(make_quotient_spec(catalog_entry(catalog(), "rp3_rp3"), 2), &registry);
    REQUIRE(r.verdict == "UNSUPPORTED");
  }
}

TEST_CASE("feature check on the stated instances") {
  CupDataRegistry registry;
  SECTION("L(4,1)") {
    FeatureReport r =
        check_features(make_quotient_spec(catalog_entry(catalog(), "lens_4_1"), 1), &registry);
    REQUIRE(r.verdict == "PASS");
    REQUIRE(r.h2_exponent == 4);
    REQUIRE(r.linking_values_exponent == 4);
    REQUIRE(r.fundamental_class_order == "UNSUPPORTED");
  }
  SECTION("L(2,1)") {
    FeatureReport r =
        check_features(make_quotient_spec(catalog_entry(catalog(), "lens_2_1"), 1), &registry);
    REQUIRE(r.verdict == "PASS");
    REQUIRE(r.h2_exponent == 2);
  }
  SECTION("trivial homology is a vacuous pass") {
    FeatureReport r = check_features(
        make_quotient_spec(catalog_entry(catalog(), "s3_identity_surgery"), 1), &registry);
    REQUIRE(r.verdict == "PASS");
    REQUIRE(r.h2_exponent == 1);
  }
  SECTION("non-coprime sums satisfy the depth-1 consequences") {
    FeatureReport r =
        check_features(make_quotient_spec(catalog_entry(catalog(), "rp3_rp3"), 1), &registry);
    REQUIRE(r.verdict == "PASS");  // non-degeneracy holds; only cyclicity fails there
  }
}

TEST_CASE("Reznikov dichotomy") {
  SECTION("S^3/Q8: zero self-linkings predict Q8") {
    ReznikovReport r = check_reznikov(catalog_entry(catalog(), "spaceform_q8"));
    REQUIRE(r.verdict == "PASS");
    REQUIRE(r.self_linkings_all_zero);
    REQUIRE(r.prediction == "Q8");
  }
  SECTION("S^3/Q16: nonzero self-linking predicts a bigger quaternion group") {
    ReznikovReport r = check_reznikov(catalog_entry(catalog(), "spaceform_q16"));
    REQUIRE(r.verdict == "PASS");
    REQUIRE_FALSE(r.self_linkings_all_zero);
  }
  SECTION("wrong homology violates the hypothesis") {
    REQUIRE_THROWS_AS(check_reznikov(catalog_entry(catalog(), "lens_4_1")),
                      HypothesisViolationError);
  }
  SECTION("RP3 # RP3 has the right homology but no finite quotient") {
    ReznikovReport r = check_reznikov(catalog_entry(catalog(), "rp3_rp3"));
    REQUIRE(r.verdict == "UNSUPPORTED");
  }
}

TEST_CASE("counterexample demo") {
  CounterexampleReport r = counterexample_demo();
  REQUIRE(r.verdict == "PASS");
  REQUIRE(r.cup_image_rank == 2);
  REQUIRE_FALSE(r.image_cyclic);
  REQUIRE(r.linking_is_diag_half);
  REQUIRE(r.relations_match);
}

TEST_CASE("catalog run with a filter") {
  CatalogRunReport rep = run_catalog(catalog(), "lens_7");
  REQUIRE(rep.entries.size() == 6);  // phi(7) lens spaces
  REQUIRE(rep.all_ok);
  for (const auto& e : rep.entries) {
    REQUIRE(e.theorem1.verdict == "PASS");
    REQUIRE(e.features.verdict == "PASS");
  }
  // empty filter match
  CatalogRunReport none = run_catalog(catalog(), "no_such_entry");
  REQUIRE(none.entries.empty());
  REQUIRE(none.all_ok);
}

TEST_CASE("JSON report shapes") {
  CupDataRegistry registry;
  TheoremReport r =
      check_theorem1(make_quotient_spec(catalog_entry(catalog(), "lens_3_1"), 2), &registry);
  json j = to_json(r);
  REQUIRE(j["verdict"] == "PASS");
  REQUIRE(j["embedding_search"].size() == 4);
  REQUIRE(j.contains("hit"));
  json cj = to_json(counterexample_demo());
  REQUIRE(cj["cup_image_rank"] == 2);
  REQUIRE(cj["image_cyclic"] == false);
}
