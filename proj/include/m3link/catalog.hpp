#pragma once

#include <optional>
#include <string>
#include <vector>

#include "m3link/cache.hpp"
#include "m3link/finitegroup.hpp"
#include "m3link/manifold.hpp"

namespace m3link {

/// One verification target: a manifold description plus fundamental-group
/// metadata. known_group_tag names the finite group the theorem harness works
/// with; theorem_depth is the derived depth n of that quotient.
struct CatalogEntry {
  std::string id;
  ManifoldDescription manifold;
  FpGroup pi1;
  std::optional<Int> pi1_finite_order;
  std::optional<std::string> known_group_tag;
  bool derived_stable = false;
  int theorem_depth = 2;
};

/// pi_1 / pi_1^(n) for a catalog entry, when it is computable here: finite
/// fundamental groups via their multiplication tables; free products of two
/// finite cyclic groups yield a symbolic infinite handle (that route exists
/// for the counterexample); anything else is unsupported.
struct DerivedQuotient {
  enum class Kind { finite, infinite_free_product, unsupported } kind = Kind::unsupported;
  std::optional<FiniteGroup> table;       // finite case
  std::vector<Int> free_product_orders;   // infinite free product case
  std::string note;
};

inline DerivedQuotient derived_quotient_catalog(const CatalogEntry& e, int n) {
  if (n < 1 || n > 2)
    throw UnsupportedEntryError("derived_quotient_catalog: depth must be 1 or 2");
  DerivedQuotient out;
  if (e.pi1_finite_order && e.known_group_tag) {
    FiniteGroup g = group_from_tag(*e.known_group_tag);
    if (Int(g.size()) != *e.pi1_finite_order)
      throw UnsupportedEntryError("catalog entry metadata is inconsistent: |" +
                                  *e.known_group_tag + "| != stated order");
    std::vector<std::vector<int>> series = derived_series(g, n);
    const std::vector<int>& term =
        n < static_cast<int>(series.size()) ? series[n] : series.back();
    QuotientWithProjection q = quotient_group(g, term, g.name() + "/D" + std::to_string(n));
    out.kind = DerivedQuotient::Kind::finite;
    out.table = std::move(q.group);
    return out;
  }
  // connected sums of two lens spaces have free-product fundamental group
  if (const auto* sum = std::get_if<ManifoldDescription::Sum>(&e.manifold.variant())) {
    std::vector<Int> orders;
    for (const auto& part : sum->parts) {
      const auto* l = std::get_if<ManifoldDescription::Lens>(&part.variant());
      if (!l) {
        out.note = "sum with non-lens parts is unsupported";
        return out;
      }
      orders.push_back(l->p);
    }
    if (n == 1) {
      // the abelianization is finite
      Int m = 1;
      for (const auto& p : orders) m *= p;
      auto [h1, rank] = first_homology(e.manifold);
      (void)rank;
      if (h1.is_cyclic()) {
        out.kind = DerivedQuotient::Kind::finite;
        out.table = group_from_tag("cyclic(" + m.str() + ")");
        return out;
      }
      out.note = "depth-1 quotient is finite abelian but non-cyclic; assemble it from factors";
      out.kind = DerivedQuotient::Kind::finite;
      std::string tag = "product(";
      for (std::size_t i = 0; i < orders.size(); ++i) {
        if (i) tag += ",";
        tag += "cyclic(" + orders[i].str() + ")";
      }
      tag += ")";
      out.table = group_from_tag(tag);
      return out;
    }
    out.kind = DerivedQuotient::Kind::infinite_free_product;
    out.free_product_orders = std::move(orders);
    out.note = "second derived subgroup of the free product is trivial or free; quotient infinite";
    return out;
  }
  out.note = "no finite-quotient route for this entry";
  return out;
}

/// Special resolution for a harness group tag: periodic for cyclic and
/// quaternion tags, tensor products of periodic ones for products of cyclics,
/// bar otherwise (within its memory bound). Quaternion homotopies go through
/// the content-addressed cache when M3LINK_CACHE_DIR is set.
inline FreeResolution special_resolution_for_tag(const std::string& tag, int horizon = 6) {
  auto open = tag.find('(');
  std::string head = open == std::string::npos ? tag : tag.substr(0, open);
  if (head == "cyclic") {
    int n = std::stoi(tag.substr(open + 1, tag.size() - open - 2));
    if (n == 1) return bar_resolution(std::make_shared<const FiniteGroup>(cyclic_group(1)), horizon);
    return periodic_resolution_cyclic(n, horizon);
  }
  if (head == "quaternion") {
    int order = std::stoi(tag.substr(open + 1, tag.size() - open - 2));
    return cached_resolution(tag, "periodic", horizon,
                             [&] { return periodic_resolution_quaternion(order, horizon); });
  }
  if (head == "product") {
    std::vector<std::string> parts = detail::split_args(tag.substr(open + 1, tag.size() - open - 2));
    FreeResolution acc = special_resolution_for_tag(parts.at(0), horizon);
    for (std::size_t i = 1; i < parts.size(); ++i)
      acc = tensor_resolution(acc, special_resolution_for_tag(parts[i], horizon), horizon);
    return acc;
  }
  return bar_resolution(std::make_shared<const FiniteGroup>(group_from_tag(tag)), horizon);
}

namespace detail {

inline std::string lens_id(const Int& p, const Int& q) {
  return "lens_" + p.str() + "_" + q.str();
}

inline CatalogEntry lens_entry(long p, long q) {
  CatalogEntry e;
  e.id = lens_id(p, q);
  e.manifold = ManifoldDescription::lens(p, q);
  e.pi1 = cyclic_presentation(p);
  e.pi1_finite_order = Int(p);
  e.known_group_tag = "cyclic(" + std::to_string(p) + ")";
  e.derived_stable = true;
  e.theorem_depth = 2;
  return e;
}

inline CatalogEntry sum_entry(long p, long q, long r, long s) {
  CatalogEntry e;
  e.id = "sum_lens_" + std::to_string(p) + "_" + std::to_string(q) + "_" + std::to_string(r) +
         "_" + std::to_string(s);
  e.manifold = ManifoldDescription::connected_sum(
      {ManifoldDescription::lens(p, q), ManifoldDescription::lens(r, s)});
  e.pi1 = free_product(cyclic_presentation(p), cyclic_presentation(r));
  e.derived_stable = (p == 2 && r == 2);
  if (gcd_int(p, r) == 1) {
    e.known_group_tag = "cyclic(" + std::to_string(p * r) + ")";
    e.theorem_depth = 1;  // the abelian quotient carries the harness
  } else {
    e.theorem_depth = 2;  // infinite derived quotient: expected unsupported
  }
  return e;
}

}  // namespace detail

/// The built-in verification catalog:
///   - lens spaces L(p,q) for p <= 12,
///   - connected sums of two lens spaces with coprime orders and |H1| <= 36,
///   - a few non-coprime sums (no finite theorem quotient; kept to exercise
///     the unsupported verdict), with RP^3 # RP^3 doubling as the
///     counterexample manifold,
///   - the quaternionic space forms S^3/Q8 and S^3/Q16,
///   - S^3 presented by an identity surgery matrix (trivial-homology edge).
inline std::vector<CatalogEntry> builtin_catalog() {
  std::vector<CatalogEntry> out;
  for (long p = 2; p <= 12; ++p)
    for (long q = 1; q < p; ++q)
      if (gcd_int(p, q) == 1) out.push_back(detail::lens_entry(p, q));
  for (long p = 2; p <= 18; ++p)
    for (long r = p + 1; p * r <= 36; ++r) {
      if (gcd_int(p, r) != 1) continue;
      for (long q = 1; q < p; ++q) {
        if (gcd_int(p, q) != 1) continue;
        for (long s = 1; s < r; ++s) {
          if (gcd_int(r, s) != 1) continue;
          out.push_back(detail::sum_entry(p, q, r, s));
        }
      }
    }
  // non-coprime sums: the infinite-derived-quotient family
  {
    CatalogEntry rp3 = detail::sum_entry(2, 1, 2, 1);
    rp3.id = "rp3_rp3";
    out.push_back(rp3);
    out.push_back(detail::sum_entry(2, 1, 4, 1));
    out.push_back(detail::sum_entry(3, 1, 3, 2));
  }
  {
    CatalogEntry q8;
    q8.id = "spaceform_q8";
    q8.manifold = ManifoldDescription::space_form(SpaceFormTag::q8());
    q8.pi1 = quaternion_presentation(2);
    q8.pi1_finite_order = Int(8);
    q8.known_group_tag = "quaternion(8)";
    q8.derived_stable = true;
    q8.theorem_depth = 2;
    out.push_back(q8);

    CatalogEntry q16;
    q16.id = "spaceform_q16";
    q16.manifold = ManifoldDescription::space_form(SpaceFormTag::q16());
    q16.pi1 = quaternion_presentation(4);
    q16.pi1_finite_order = Int(16);
    q16.known_group_tag = "quaternion(16)";
    q16.derived_stable = true;
    q16.theorem_depth = 2;
    out.push_back(q16);

    CatalogEntry s3;
    s3.id = "s3_identity_surgery";
    s3.manifold = ManifoldDescription::surgery(IntMatrix::identity(2));
    s3.pi1 = FpGroup({}, {});
    s3.pi1_finite_order = Int(1);
    s3.known_group_tag = "cyclic(1)";
    s3.derived_stable = true;
    s3.theorem_depth = 2;
    out.push_back(s3);
  }
  return out;
}

inline const CatalogEntry& catalog_entry(const std::vector<CatalogEntry>& catalog,
                                         const std::string& id) {
  for (const auto& e : catalog)
    if (e.id == id) return e;
  throw UnsupportedEntryError("no catalog entry with id: " + id);
}

// --- catalog JSON ---

inline json to_json(const CatalogEntry& e) {
  json j;
  j["id"] = e.id;
  j["manifold"] = to_json(e.manifold);
  json gens = json::array();
  for (const auto& g : e.pi1.generators()) gens.push_back(g);
  json rels = json::array();
  for (const auto& w : e.pi1.relators()) rels.push_back(w);
  j["pi1"] = {{"generators", gens}, {"relators", rels}};
  if (e.pi1_finite_order) j["pi1_finite_order"] = to_long_checked(*e.pi1_finite_order, "order");
  if (e.known_group_tag) j["known_group_tag"] = *e.known_group_tag;
  j["derived_stable"] = e.derived_stable;
  j["theorem_depth"] = e.theorem_depth;
  return j;
}

inline CatalogEntry catalog_entry_from_json(const json& j) {
  CatalogEntry e;
  e.id = j.at("id").get<std::string>();
  e.manifold = manifold_from_json(j.at("manifold"));
  std::vector<std::string> gens;
  for (const auto& g : j.at("pi1").at("generators")) gens.push_back(g.get<std::string>());
  std::vector<std::vector<int>> rels;
  for (const auto& w : j.at("pi1").at("relators")) rels.push_back(w.get<std::vector<int>>());
  e.pi1 = FpGroup(std::move(gens), std::move(rels));
  if (j.contains("pi1_finite_order")) e.pi1_finite_order = Int(j.at("pi1_finite_order").get<long>());
  if (j.contains("known_group_tag")) e.known_group_tag = j.at("known_group_tag").get<std::string>();
  e.derived_stable = j.value("derived_stable", false);
  e.theorem_depth = j.value("theorem_depth", 2);
  return e;
}

inline json catalog_to_json(const std::vector<CatalogEntry>& entries) {
  json j = json::array();
  for (const auto& e : entries) j.push_back(to_json(e));
  return j;
}

inline std::vector<CatalogEntry> catalog_from_json(const json& j) {
  std::vector<CatalogEntry> out;
  for (const auto& e : j) out.push_back(catalog_entry_from_json(e));
  return out;
}

}  // namespace m3link
