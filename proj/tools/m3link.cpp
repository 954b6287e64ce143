// m3link: exact torsion linking forms of rational homology 3-spheres vs the
// degree-2 cup pairing of their finite derived quotients.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "m3link/cohomology.hpp"
#include "m3link/verifier.hpp"

using namespace m3link;

namespace {

std::string group_str(const FiniteAbelianGroup& g, int free_rank = 0) {
  std::string s;
  if (g.is_trivial() && free_rank == 0) return "0";
  for (int i = 0; i < g.num_generators(); ++i) {
    if (!s.empty()) s += " x ";
    s += "Z/" + g.factors()[i].str();
  }
  for (int i = 0; i < free_rank; ++i) {
    if (!s.empty()) s += " x ";
    s += "Z";
  }
  return s;
}

void print_pairing(const TorsionPairing& p) {
  std::cout << "group: " << group_str(p.group()) << "\n";
  if (p.group().is_trivial()) return;
  std::cout << "gram (values in Q/Z):\n";
  for (const auto& row : p.gram()) {
    std::cout << "  ";
    for (const auto& v : row) std::cout << v.str() << "\t";
    std::cout << "\n";
  }
}

ManifoldDescription resolve_manifold(const std::string& arg) {
  if (arg.rfind("catalog:", 0) == 0) {
    static std::vector<CatalogEntry> cat = builtin_catalog();
    return catalog_entry(cat, arg.substr(8)).manifold;
  }
  std::ifstream in(arg);
  if (!in) throw Error("cannot open manifest file: " + arg);
  json j;
  in >> j;
  return manifold_from_json(j);
}

int cmd_linking(const std::string& target, bool as_json) {
  ManifoldDescription m = resolve_manifold(target);
  TorsionPairing p = linking_form(m);
  if (as_json) {
    std::cout << to_json(p).dump(2) << "\n";
  } else {
    std::cout << "manifold: " << m.str() << "\n";
    print_pairing(p);
    std::cout << "non-degenerate: " << (is_nondegenerate(p) ? "yes" : "no") << "\n";
  }
  return 0;
}

int cmd_cohomology(const std::string& tag, int degree, const std::string& coeffs,
                   const std::string& strategy) {
  FreeResolution r = strategy == "bar"
                         ? bar_resolution(std::make_shared<const FiniteGroup>(group_from_tag(tag)),
                                          std::max(degree + 1, 2))
                         : special_resolution_for_tag(tag, std::max(degree + 2, 6));
  if (coeffs == "qz") {
    QmodZCohomology h(&r, degree);
    std::cout << "H^" << degree << "(" << tag << "; Q/Z) = " << group_str(h.group()) << "\n";
  } else {
    CohomologyGroup h = cohomology_z(r, degree);
    std::cout << "H^" << degree << "(" << tag << "; Z) = " << group_str(h.group(), h.free_rank())
              << "\n";
  }
  return 0;
}

int cmd_cup_pairing(const std::string& tag, bool as_json) {
  CupPairingData d = cup_data_for_tag(tag);
  if (as_json) {
    json gram = json::array();
    for (const auto& row : d.gram_c) {
      json r = json::array();
      for (const auto& coords : row) {
        json cell = json::array();
        for (const auto& v : coords) cell.push_back(int_to_string(v));
        r.push_back(cell);
      }
      gram.push_back(r);
    }
    json j{{"group", tag},
           {"h2", to_json(d.h2)},
           {"h4", to_json(d.h4)},
           {"cup_image", to_json(d.c_group)},
           {"cyclic", d.cyclic},
           {"nondegenerate", d.nondegenerate},
           {"gram_in_image_coordinates", gram}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "group:         " << tag << "\n";
    std::cout << "H^2:           " << group_str(d.h2) << "\n";
    std::cout << "H^4:           " << group_str(d.h4) << "\n";
    std::cout << "cup image C:   " << group_str(d.c_group) << (d.cyclic ? "  (cyclic)" : "  (NOT cyclic)")
              << "\n";
    std::cout << "non-degenerate into C: " << (d.nondegenerate ? "yes" : "no") << "\n";
    if (!d.gram_c.empty()) {
      std::cout << "gram in C-coordinates:\n";
      for (const auto& row : d.gram_c) {
        std::cout << "  ";
        for (const auto& coords : row) {
          std::string cell = "(";
          for (std::size_t i = 0; i < coords.size(); ++i) {
            if (i) cell += ",";
            cell += coords[i].str();
          }
          cell += ")";
          std::cout << cell << "\t";
        }
        std::cout << "\n";
      }
    }
  }
  return 0;
}

int cmd_verify_one(const std::string& what, const std::string& entry_id, bool as_json) {
  static std::vector<CatalogEntry> cat = builtin_catalog();
  static const CatalogEntry dummy;
  const CatalogEntry& e = what == "counterexample" ? dummy : catalog_entry(cat, entry_id);
  std::string verdict;
  json j;
  if (what == "theorem1") {
    TheoremReport r = check_theorem1(make_quotient_spec(e, e.theorem_depth));
    verdict = r.verdict;
    j = to_json(r);
    if (!as_json) {
      std::cout << "entry:     " << e.id << "  (" << e.manifold.str() << ")\n";
      std::cout << "group:     " << (r.group_name.empty() ? "-" : r.group_name) << "\n";
      if (!r.group_name.empty()) {
        std::cout << "H^2:       " << group_str(r.h2) << "\n";
        std::cout << "cup image: " << group_str(r.c_group)
                  << (r.c_cyclic ? " (cyclic)" : " (NOT cyclic)") << "\n";
        std::cout << "linking:   " << group_str(r.linking_group) << "\n";
        std::cout << "embeddings tried: " << r.embedding_search.size();
        if (r.hit)
          std::cout << "; hit at unit " << r.hit->unit.str() << ", orientation "
                    << (r.hit->orientation > 0 ? "+" : "-");
        std::cout << "\n";
      }
    }
  } else if (what == "features") {
    FeatureReport r = check_features(make_quotient_spec(e, 1));
    verdict = r.verdict;
    j = to_json(r);
    if (!as_json) {
      std::cout << "entry:  " << e.id << "\n";
      std::cout << "group:  " << (r.group_name.empty() ? "-" : r.group_name) << "\n";
      std::cout << "cup non-degenerate: " << (r.cup_nondegenerate ? "yes" : "no") << "\n";
      std::cout << "exponents (linking values / H^2 / H_1): " << r.linking_values_exponent.str()
                << " / " << r.h2_exponent.str() << " / " << r.h1_exponent.str() << "\n";
      std::cout << "fundamental-class pushforward order: " << r.fundamental_class_order << "\n";
    }
  } else if (what == "reznikov") {
    ReznikovReport r = check_reznikov(e);
    verdict = r.verdict;
    j = to_json(r);
    if (!as_json) {
      std::cout << "entry:      " << e.id << "\n";
      std::cout << "self-linkings all zero: " << (r.self_linkings_all_zero ? "yes" : "no") << "\n";
      std::cout << "prediction: " << r.prediction << "\n";
      std::cout << "actual:     " << r.actual << "\n";
    }
  } else if (what == "counterexample") {
    CounterexampleReport r = counterexample_demo();
    verdict = r.verdict;
    j = to_json(r);
    if (!as_json) {
      std::cout << "manifold: RP^3 # RP^3, group Z/2 * Z/2\n";
      std::cout << "linking form diag(1/2, 1/2): " << (r.linking_is_diag_half ? "yes" : "no")
                << "\n";
      std::cout << "cup image rank: " << r.cup_image_rank << " (cyclic: "
                << (r.image_cyclic ? "yes" : "no") << ")\n";
      std::cout << "ring relations (xy, 2x, 2y) match: " << (r.relations_match ? "yes" : "no")
                << "\n";
    }
  } else {
    std::cerr << "unknown verify target: " << what << "\n";
    return 2;
  }
  if (as_json) std::cout << j.dump(2) << "\n";
  else std::cout << "verdict: " << verdict << "\n";
  return verdict == "FAIL" ? 1 : 0;
}

int cmd_verify_all(const std::string& filter, bool as_json) {
  static std::vector<CatalogEntry> cat = builtin_catalog();
  CatalogRunReport rep = run_catalog(cat, filter);
  if (as_json) {
    std::cout << to_json(rep).dump(2) << "\n";
  } else {
    std::cout << "id                      theorem1     features  reznikov  ok\n";
    for (const auto& e : rep.entries) {
      std::string t1 = e.theorem1.verdict;
      if (t1 == "UNSUPPORTED") t1 += "(expected " + e.expected_theorem1 + ")";
      std::printf("%-23s %-12s %-9s %-9s %s\n", e.id.c_str(), t1.c_str(),
                  e.features.verdict.c_str(),
                  e.reznikov ? e.reznikov->verdict.c_str() : "-", e.ok ? "yes" : "NO");
    }
    std::cout << "entries: " << rep.entries.size() << "  pass: " << rep.num_pass
              << "  unsupported: " << rep.num_unsupported << "  fail: " << rep.num_fail << "\n";
    std::cout << (rep.all_ok ? "ALL OK" : "MISMATCHES PRESENT") << "\n";
  }
  return rep.all_ok ? 0 : 1;
}

int cmd_catalog_list(bool as_json) {
  static std::vector<CatalogEntry> cat = builtin_catalog();
  if (as_json) {
    std::cout << catalog_to_json(cat).dump(2) << "\n";
    return 0;
  }
  std::cout << "id                      manifold              |pi1|     group tag\n";
  for (const auto& e : cat) {
    std::string order = e.pi1_finite_order ? e.pi1_finite_order->str() : "infinite";
    std::printf("%-23s %-21s %-9s %s\n", e.id.c_str(), e.manifold.str().c_str(), order.c_str(),
                e.known_group_tag ? e.known_group_tag->c_str() : "-");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torsion linking forms vs cup pairings of finite derived quotients"};
  app.require_subcommand(1);

  std::string linking_target;
  bool linking_json = false;
  auto* linking = app.add_subcommand("linking", "linking form of a manifold");
  linking->add_option("manifest", linking_target, "manifest JSON path or catalog:ID")->required();
  linking->add_flag("--json", linking_json, "emit JSON");

  std::string coh_group, coh_coeffs = "z", coh_resolution = "special";
  int coh_degree = 2;
  auto* coh = app.add_subcommand("cohomology", "cohomology of a finite group");
  coh->add_option("--group", coh_group, "group tag, e.g. cyclic(4) or quaternion(8)")->required();
  coh->add_option("--degree", coh_degree, "cohomological degree")->required();
  coh->add_option("--coeffs", coh_coeffs, "z or qz")->check(CLI::IsMember({"z", "qz"}));
  coh->add_option("--resolution", coh_resolution, "bar or special")
      ->check(CLI::IsMember({"bar", "special"}));

  std::string cup_group;
  bool cup_json = false;
  auto* cup = app.add_subcommand("cup-pairing", "degree-2 cup pairing image data");
  cup->add_option("--group", cup_group, "group tag")->required();
  cup->add_flag("--json", cup_json, "emit JSON");

  auto* verify = app.add_subcommand("verify", "run the verification harness");
  verify->require_subcommand(1);
  std::string entry_id, filter;
  bool verify_json = false;
  auto* v_theorem = verify->add_subcommand("theorem1", "cup image vs linking form");
  v_theorem->add_option("--entry", entry_id, "catalog entry id")->required();
  v_theorem->add_flag("--json", verify_json);
  auto* v_features = verify->add_subcommand("features", "depth-1 consequences");
  v_features->add_option("--entry", entry_id, "catalog entry id")->required();
  v_features->add_flag("--json", verify_json);
  auto* v_rez = verify->add_subcommand("reznikov", "Sylow-2 dichotomy for (Z/2)^2 homology");
  v_rez->add_option("--entry", entry_id, "catalog entry id")->required();
  v_rez->add_flag("--json", verify_json);
  auto* v_counter = verify->add_subcommand("counterexample", "the infinite-quotient counterexample");
  v_counter->add_flag("--json", verify_json);
  auto* v_all = verify->add_subcommand("all", "every applicable catalog entry");
  v_all->add_option("--filter", filter, "substring filter on entry ids");
  v_all->add_flag("--json", verify_json);

  bool catalog_json = false;
  auto* cat = app.add_subcommand("catalog", "catalog operations");
  cat->require_subcommand(1);
  auto* cat_list = cat->add_subcommand("list", "list catalog entries");
  cat_list->add_flag("--json", catalog_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (linking->parsed()) return cmd_linking(linking_target, linking_json);
    if (coh->parsed()) return cmd_cohomology(coh_group, coh_degree, coh_coeffs, coh_resolution);
    if (cup->parsed()) return cmd_cup_pairing(cup_group, cup_json);
    if (verify->parsed()) {
      if (v_theorem->parsed()) return cmd_verify_one("theorem1", entry_id, verify_json);
      if (v_features->parsed()) return cmd_verify_one("features", entry_id, verify_json);
      if (v_rez->parsed()) return cmd_verify_one("reznikov", entry_id, verify_json);
      if (v_counter->parsed()) return cmd_verify_one("counterexample", "", verify_json);
      if (v_all->parsed()) return cmd_verify_all(filter, verify_json);
    }
    if (cat->parsed() && cat_list->parsed()) return cmd_catalog_list(catalog_json);
  } catch (const InvalidTagError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedEntryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SerializationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
