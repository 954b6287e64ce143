#pragma once

#include <atomic>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "m3link/catalog.hpp"
#include "m3link/cup.hpp"

namespace m3link {

inline std::string abelian_tag(const FiniteAbelianGroup& g) {
  if (g.is_trivial()) return "cyclic(1)";
  if (g.num_generators() == 1) return "cyclic(" + g.factors()[0].str() + ")";
  std::string tag = "product(";
  for (int i = 0; i < g.num_generators(); ++i) {
    if (i) tag += ",";
    tag += "cyclic(" + g.factors()[i].str() + ")";
  }
  return tag + ")";
}

/// A catalog entry together with the derived depth of the quotient the
/// theorem harness works with. The quotient map is the canonical projection
/// pi_1 -> pi_1 / pi_1^(n), so its kernel lies in the n-th derived subgroup
/// by construction.
struct QuotientSpec {
  CatalogEntry entry;
  int depth = 2;
  DerivedQuotient quotient;
  std::string group_tag;  // resolvable tag when the quotient is finite
};

inline QuotientSpec make_quotient_spec(const CatalogEntry& e, int depth) {
  QuotientSpec s;
  s.entry = e;
  s.depth = depth;
  s.quotient = derived_quotient_catalog(e, depth);
  if (s.quotient.kind == DerivedQuotient::Kind::finite) {
    if (depth >= 2 && e.known_group_tag)
      s.group_tag = *e.known_group_tag;
    else
      s.group_tag = abelian_tag(abelianization(*s.quotient.table).group);
  }
  return s;
}

/// Cup-pairing data for a group tag: the special resolutions (periodic,
/// tensor products of periodic) carry the full route; everything else falls
/// back to the bar-resolution route, which is the |G| <= 8 oracle.
inline CupPairingData cup_data_for_tag(const std::string& tag) {
  std::function<bool(const std::string&)> special = [&](const std::string& t) -> bool {
    auto open = t.find('(');
    if (open == std::string::npos) return false;
    std::string head = t.substr(0, open);
    if (head == "cyclic" || head == "quaternion") return true;
    if (head == "product") {
      for (const auto& part : detail::split_args(t.substr(open + 1, t.size() - open - 2)))
        if (!special(part)) return false;
      return true;
    }
    return false;
  };
  if (special(tag)) return cup_pairing_gram(CupContext(special_resolution_for_tag(tag)));
  auto group = std::make_shared<const FiniteGroup>(group_from_tag(tag));
  if (group->size() > 8)
    throw BoundExceededError("cup_data_for_tag: no special resolution for '" + tag +
                             "' and the bar-resolution route is bounded at |G| <= 8");
  return cup_pairing_gram_large(group);
}

/// Shared cup-pairing computations, keyed by group tag. Thread-safe; each tag
/// is computed exactly once.
class CupDataRegistry {
 public:
  std::shared_ptr<const CupPairingData> get(const std::string& tag) {
    std::shared_future<std::shared_ptr<const CupPairingData>> fut;
    std::promise<std::shared_ptr<const CupPairingData>> prom;
    bool compute_here = false;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = memo_.find(tag);
      if (it == memo_.end()) {
        fut = prom.get_future().share();
        memo_.emplace(tag, fut);
        compute_here = true;
      } else {
        fut = it->second;
      }
    }
    if (compute_here) {
      try {
        auto data = std::make_shared<const CupPairingData>(cup_data_for_tag(tag));
        prom.set_value(std::move(data));
      } catch (...) {
        prom.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_future<std::shared_ptr<const CupPairingData>>> memo_;
};

struct EmbeddingTrial {
  Int unit;
  int orientation;
  bool isomorphic;
};

/// Outcome of the main correspondence check on one quotient spec.
struct TheoremReport {
  std::string manifold_id;
  std::string group_name;
  FiniteAbelianGroup h2, h4, c_group;
  bool c_cyclic = false;
  bool cup_nondegenerate = false;
  FiniteAbelianGroup linking_group;
  std::vector<EmbeddingTrial> embedding_search;
  std::optional<EmbeddingTrial> hit;
  std::optional<AbHom> witness;
  std::string verdict;  // PASS | FAIL | UNSUPPORTED
  std::string detail;
};

/// Cup pairing of the finite quotient vs the linking form of the manifold:
/// computes the image subgroup C, then sweeps every embedding of a cyclic C
/// into Q/Z (all units) and both orientations of the linking form, looking
/// for a pairing isomorphism. PASS needs cyclic C, a non-degenerate pairing
/// into C, and at least one sweep hit.
inline TheoremReport check_theorem1(const QuotientSpec& spec, CupDataRegistry* registry = nullptr) {
  TheoremReport rep;
  rep.manifold_id = spec.entry.id;
  if (spec.quotient.kind != DerivedQuotient::Kind::finite) {
    rep.verdict = "UNSUPPORTED";
    rep.detail = spec.quotient.kind == DerivedQuotient::Kind::infinite_free_product
                     ? "derived quotient is infinite"
                     : "derived quotient is not computable here: " + spec.quotient.note;
    return rep;
  }
  rep.group_name = spec.group_tag;
  std::shared_ptr<const CupPairingData> cup;
  if (registry) {
    cup = registry->get(spec.group_tag);
  } else {
    cup = std::make_shared<const CupPairingData>(cup_data_for_tag(spec.group_tag));
  }
  rep.h2 = cup->h2;
  rep.h4 = cup->h4;
  rep.c_group = cup->c_group;
  rep.c_cyclic = cup->cyclic;
  rep.cup_nondegenerate = cup->nondegenerate;

  TorsionPairing linking = linking_form(spec.entry.manifold);
  rep.linking_group = linking.group();
  if (!cup->cyclic) {
    rep.verdict = "FAIL";
    rep.detail = "cup image is not cyclic";
    return rep;
  }
  Int m = cup->c_group.is_trivial() ? Int(1) : cup->c_group.factors()[0];
  for (int orientation : {+1, -1}) {
    TorsionPairing target = orientation > 0 ? linking : linking.negated();
    for (const Int& unit : units_mod(m)) {
      EmbeddingTrial trial{unit, orientation, false};
      PairingIsoReport iso = are_isomorphic(cup->to_torsion_pairing(unit), target);
      trial.isomorphic = iso.isomorphic;
      if (iso.isomorphic && !rep.hit) {
        rep.hit = trial;
        rep.witness = iso.witness;
      }
      rep.embedding_search.push_back(trial);
    }
  }
  bool pass = rep.c_cyclic && rep.cup_nondegenerate && rep.hit.has_value();
  rep.verdict = pass ? "PASS" : "FAIL";
  if (!pass) {
    rep.detail = !rep.cup_nondegenerate ? "cup pairing into C is degenerate"
                                        : "no embedding/orientation matches the linking form";
  }
  return rep;
}

/// Depth-1 consequences: the cup pairing into C is non-degenerate, and the
/// exponent of the matched linking values equals exp(H^2(G)) = exp(H_1(M)).
/// The pushforward of the fundamental class itself is out of reach without
/// degree-3 group homology, and is reported as such.
struct FeatureReport {
  std::string manifold_id;
  std::string group_name;
  bool cup_nondegenerate = false;
  Int linking_values_exponent = 1;
  Int h2_exponent = 1;
  Int h1_exponent = 1;
  std::string fundamental_class_order = "UNSUPPORTED";
  std::string verdict;
  std::string detail;
};

inline FeatureReport check_features(const QuotientSpec& spec, CupDataRegistry* registry = nullptr) {
  FeatureReport rep;
  rep.manifold_id = spec.entry.id;
  if (spec.quotient.kind != DerivedQuotient::Kind::finite) {
    rep.verdict = "UNSUPPORTED";
    rep.detail = "no finite quotient at this depth";
    return rep;
  }
  rep.group_name = spec.group_tag;
  std::shared_ptr<const CupPairingData> cup;
  if (registry) {
    cup = registry->get(spec.group_tag);
  } else {
    cup = std::make_shared<const CupPairingData>(cup_data_for_tag(spec.group_tag));
  }
  rep.cup_nondegenerate = cup->nondegenerate;
  TorsionPairing linking = linking_form(spec.entry.manifold);
  rep.linking_values_exponent = linking.values_exponent();
  rep.h2_exponent = cup->h2.exponent();
  rep.h1_exponent = first_homology(spec.entry.manifold).first.exponent();
  bool pass = rep.cup_nondegenerate && rep.linking_values_exponent == rep.h2_exponent &&
              rep.h2_exponent == rep.h1_exponent;
  rep.verdict = pass ? "PASS" : "FAIL";
  if (!pass)
    rep.detail = !rep.cup_nondegenerate ? "cup pairing degenerate" : "exponent mismatch";
  return rep;
}

/// The dichotomy for H_1 = (Z/2)^2: all self-linkings zero predicts the
/// quaternion group of order 8 as the Sylow-2 subgroup of the depth-2
/// quotient; a nonzero self-linking predicts a generalized quaternion group
/// of order at least 16.
struct ReznikovReport {
  std::string manifold_id;
  bool self_linkings_all_zero = false;
  std::string prediction;
  std::string actual;
  std::string verdict;
  std::string detail;
};

inline ReznikovReport check_reznikov(const CatalogEntry& entry) {
  ReznikovReport rep;
  rep.manifold_id = entry.id;
  auto [h1, rank] = first_homology(entry.manifold);
  if (rank != 0 || !(h1 == FiniteAbelianGroup(std::vector<Int>{2, 2})))
    throw HypothesisViolationError("check_reznikov: H_1 must be Z/2 + Z/2");
  TorsionPairing linking = linking_form(entry.manifold);
  rep.self_linkings_all_zero = true;
  for (const auto& c : all_elements(linking.group()))
    if (!linking.value(c, c).is_zero()) rep.self_linkings_all_zero = false;
  rep.prediction = rep.self_linkings_all_zero ? "Q8" : "Q2^k, k>3";
  DerivedQuotient q = derived_quotient_catalog(entry, 2);
  if (q.kind != DerivedQuotient::Kind::finite) {
    rep.verdict = "UNSUPPORTED";
    rep.detail = "depth-2 quotient is not finite";
    return rep;
  }
  SubgroupWithInclusion s = sylow2(*q.table);
  rep.actual = "order " + std::to_string(s.group.size());
  bool quaternion = is_generalized_quaternion(s.group);
  bool match = rep.self_linkings_all_zero ? (quaternion && s.group.size() == 8)
                                          : (quaternion && s.group.size() >= 16);
  rep.verdict = match ? "PASS" : "FAIL";
  if (!match) rep.detail = "Sylow-2 subgroup does not match the prediction";
  return rep;
}

/// The counterexample with infinite derived quotient: RP^3 # RP^3. The cup
/// image of Z/2 * Z/2 has rank two, so the cyclic-image conclusion fails
/// exactly where its hypothesis does.
struct CounterexampleReport {
  FiniteAbelianGroup linking_group;
  bool linking_is_diag_half = false;
  FiniteAbelianGroup cup_image;
  int cup_image_rank = 0;
  bool image_cyclic = true;
  bool relations_match = false;  // x y = 0, 2 x = 2 y = 0, x^2 and y^2 independent
  std::string verdict;
};

inline CounterexampleReport counterexample_demo() {
  CounterexampleReport rep;
  ManifoldDescription m = ManifoldDescription::connected_sum(
      {ManifoldDescription::lens(2, 1), ManifoldDescription::lens(2, 1)});
  TorsionPairing linking = linking_form(m);
  rep.linking_group = linking.group();
  rep.linking_is_diag_half =
      linking.group() == FiniteAbelianGroup(std::vector<Int>{2, 2}) &&
      linking.gram()[0][0] == QmodZ(1, 2) && linking.gram()[1][1] == QmodZ(1, 2) &&
      linking.gram()[0][1].is_zero();
  CupPairingData cup = free_product_cup_pairing({Int(2), Int(2)});
  rep.cup_image = cup.c_group;
  rep.cup_image_rank = cup.c_group.num_generators();
  rep.image_cyclic = cup.cyclic;
  AbElement x2 = cup.pair_in_c(AbElement::generator(cup.h2, 0), AbElement::generator(cup.h2, 0));
  AbElement y2 = cup.pair_in_c(AbElement::generator(cup.h2, 1), AbElement::generator(cup.h2, 1));
  AbElement xy = cup.pair_in_c(AbElement::generator(cup.h2, 0), AbElement::generator(cup.h2, 1));
  bool squares_independent = !x2.is_zero() && !y2.is_zero() && x2 != y2 && (x2 + y2).order() == 2;
  rep.relations_match = cup.h2 == FiniteAbelianGroup(std::vector<Int>{2, 2}) && xy.is_zero() &&
                        squares_independent;
  rep.verdict =
      (!rep.image_cyclic && rep.cup_image_rank == 2 && rep.linking_is_diag_half &&
       rep.relations_match)
          ? "PASS"
          : "FAIL";
  return rep;
}

// --- catalog-level run ---

struct EntryResult {
  std::string id;
  TheoremReport theorem1;
  FeatureReport features;
  std::optional<ReznikovReport> reznikov;
  std::string expected_theorem1;  // PASS or UNSUPPORTED
  bool ok = false;
};

struct CatalogRunReport {
  std::vector<EntryResult> entries;
  int num_pass = 0, num_fail = 0, num_unsupported = 0;
  bool all_ok = true;
};

inline EntryResult verify_entry(const CatalogEntry& e, CupDataRegistry* registry) {
  EntryResult res;
  res.id = e.id;
  QuotientSpec theorem_spec = make_quotient_spec(e, e.theorem_depth);
  res.expected_theorem1 =
      theorem_spec.quotient.kind == DerivedQuotient::Kind::finite ? "PASS" : "UNSUPPORTED";
  res.theorem1 = check_theorem1(theorem_spec, registry);
  QuotientSpec features_spec = make_quotient_spec(e, 1);
  res.features = check_features(features_spec, registry);
  auto [h1, rank] = first_homology(e.manifold);
  if (rank == 0 && h1 == FiniteAbelianGroup(std::vector<Int>{2, 2}))
    res.reznikov = check_reznikov(e);
  bool reznikov_ok = !res.reznikov || res.reznikov->verdict == "PASS" ||
                     res.reznikov->verdict == "UNSUPPORTED";
  res.ok = res.theorem1.verdict == res.expected_theorem1 && res.features.verdict == "PASS" &&
           reznikov_ok;
  return res;
}

inline CatalogRunReport run_catalog(const std::vector<CatalogEntry>& catalog,
                                    const std::string& filter = "", bool parallel = true) {
  std::vector<const CatalogEntry*> selected;
  for (const auto& e : catalog)
    if (filter.empty() || e.id.find(filter) != std::string::npos) selected.push_back(&e);
  CatalogRunReport rep;
  rep.entries.resize(selected.size());
  CupDataRegistry registry;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= selected.size()) return;
      rep.entries[i] = verify_entry(*selected[i], &registry);
    }
  };
  if (parallel && selected.size() > 1) {
    unsigned n = std::min<unsigned>(std::thread::hardware_concurrency(), 8);
    n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(selected.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  } else {
    worker();
  }
  std::sort(rep.entries.begin(), rep.entries.end(),
            [](const EntryResult& a, const EntryResult& b) { return a.id < b.id; });
  for (const auto& r : rep.entries) {
    if (r.theorem1.verdict == "PASS") ++rep.num_pass;
    else if (r.theorem1.verdict == "UNSUPPORTED") ++rep.num_unsupported;
    else ++rep.num_fail;
    if (!r.ok) rep.all_ok = false;
  }
  return rep;
}

// --- report JSON ---

inline json to_json(const FiniteAbelianGroup& g) {
  json factors = json::array();
  for (const auto& d : g.factors()) factors.push_back(int_to_string(d));
  return json{{"factors", factors}};
}

inline json to_json(const TorsionPairing& p) {
  json gram = json::array();
  for (const auto& row : p.gram()) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v.str());
    gram.push_back(r);
  }
  return json{{"group", to_json(p.group())}, {"gram", gram}};
}

inline json to_json(const TheoremReport& r) {
  json trials = json::array();
  for (const auto& t : r.embedding_search)
    trials.push_back(json{{"unit", int_to_string(t.unit)},
                          {"orientation", t.orientation},
                          {"isomorphic", t.isomorphic}});
  json j{{"manifold", r.manifold_id},
         {"group", r.group_name},
         {"h2", to_json(r.h2)},
         {"h4", to_json(r.h4)},
         {"cup_image", to_json(r.c_group)},
         {"cup_image_cyclic", r.c_cyclic},
         {"cup_nondegenerate", r.cup_nondegenerate},
         {"linking_group", to_json(r.linking_group)},
         {"embedding_search", trials},
         {"verdict", r.verdict}};
  if (!r.detail.empty()) j["detail"] = r.detail;
  if (r.hit)
    j["hit"] = json{{"unit", int_to_string(r.hit->unit)}, {"orientation", r.hit->orientation}};
  if (r.witness) j["witness_matrix"] = to_json(r.witness->matrix());
  return j;
}

inline json to_json(const FeatureReport& r) {
  json j{{"manifold", r.manifold_id},
         {"group", r.group_name},
         {"cup_nondegenerate", r.cup_nondegenerate},
         {"linking_values_exponent", int_to_string(r.linking_values_exponent)},
         {"h2_exponent", int_to_string(r.h2_exponent)},
         {"h1_exponent", int_to_string(r.h1_exponent)},
         {"fundamental_class_order", r.fundamental_class_order},
         {"verdict", r.verdict}};
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

inline json to_json(const ReznikovReport& r) {
  json j{{"manifold", r.manifold_id},
         {"self_linkings_all_zero", r.self_linkings_all_zero},
         {"prediction", r.prediction},
         {"actual", r.actual},
         {"verdict", r.verdict}};
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

inline json to_json(const CounterexampleReport& r) {
  return json{{"linking_group", to_json(r.linking_group)},
              {"linking_is_diag_half", r.linking_is_diag_half},
              {"cup_image", to_json(r.cup_image)},
              {"cup_image_rank", r.cup_image_rank},
              {"image_cyclic", r.image_cyclic},
              {"relations_match", r.relations_match},
              {"verdict", r.verdict}};
}

inline json to_json(const CatalogRunReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    json je{{"id", e.id},
            {"theorem1", to_json(e.theorem1)},
            {"features", to_json(e.features)},
            {"expected_theorem1", e.expected_theorem1},
            {"ok", e.ok}};
    if (e.reznikov) je["reznikov"] = to_json(*e.reznikov);
    entries.push_back(je);
  }
  return json{{"entries", entries},
              {"num_pass", r.num_pass},
              {"num_fail", r.num_fail},
              {"num_unsupported", r.num_unsupported},
              {"all_ok", r.all_ok}};
}

}  // namespace m3link
