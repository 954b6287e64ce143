#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "m3link/resolution.hpp"
#include "m3link/serial.hpp"

namespace m3link {

/// Resolutions with explicitly solved homotopies serialize to JSON so repeated
/// runs skip the solve. Cache files are content-addressed by
/// group tag + strategy + horizon.
inline json resolution_to_json(const FreeResolution& r, const std::string& group_tag) {
  json j;
  j["group_tag"] = group_tag;
  j["strategy"] = r.strategy();
  j["horizon"] = r.horizon();
  json ranks = json::array();
  for (int d = 0; d <= r.horizon(); ++d) ranks.push_back(r.rank(d));
  j["ranks"] = ranks;
  json bds = json::array();
  for (int d = 1; d <= r.horizon(); ++d) {
    json cols = json::array();
    for (int c = 0; c < r.rank(d); ++c) {
      json col = json::array();
      for (const auto& [row, e] : r.boundary(d).column(c))
        for (const auto& [elem, coeff] : e.terms())
          col.push_back(json::array({row, elem, int_to_string(coeff)}));
      cols.push_back(col);
    }
    bds.push_back(cols);
  }
  j["boundaries"] = bds;
  const int gs = r.group().size();
  json hs = json::array();
  for (int d = 0; d + 1 <= r.horizon(); ++d) {
    json per_degree = json::array();
    for (int b = 0; b < r.rank(d); ++b)
      for (int g = 0; g < gs; ++g) {
        json terms = json::array();
        for (const Term& t : r.homotopy(d, b, g))
          terms.push_back(json::array({t.basis, t.elem, int_to_string(t.coeff)}));
        per_degree.push_back(terms);
      }
    hs.push_back(per_degree);
  }
  j["homotopy"] = hs;
  return j;
}

inline FreeResolution resolution_from_json(const json& j) {
  auto group = std::make_shared<const FiniteGroup>(
      group_from_tag(j.at("group_tag").get<std::string>()));
  int horizon = j.at("horizon").get<int>();
  std::vector<int> ranks;
  for (const auto& r : j.at("ranks")) ranks.push_back(r.get<int>());
  if (static_cast<int>(ranks.size()) != horizon + 1)
    throw SerializationError("resolution JSON: rank list does not match horizon");
  std::vector<GroupRingMatrix> bds;
  for (int d = 1; d <= horizon; ++d) {
    const json& cols = j.at("boundaries").at(d - 1);
    GroupRingMatrix m(group, ranks[d - 1], ranks[d]);
    for (int c = 0; c < ranks[d]; ++c)
      for (const auto& t : cols.at(c))
        m.add_entry(t.at(0).get<int>(), c,
                    GroupRingElement::of(t.at(1).get<int>(),
                                         int_from_string(t.at(2).get<std::string>())));
    bds.push_back(std::move(m));
  }
  FreeResolution res(group, ranks, std::move(bds), j.at("strategy").get<std::string>());
  const int gs = group->size();
  auto h = std::make_shared<std::vector<std::vector<std::vector<Term>>>>();
  const json& hs = j.at("homotopy");
  for (std::size_t d = 0; d < hs.size(); ++d) {
    std::vector<std::vector<Term>> per(static_cast<std::size_t>(ranks[d]) * gs);
    for (std::size_t flat = 0; flat < per.size(); ++flat)
      for (const auto& t : hs.at(d).at(flat))
        per[flat].push_back({t.at(0).get<int>(), t.at(1).get<int>(),
                             int_from_string(t.at(2).get<std::string>())});
    h->push_back(std::move(per));
  }
  res.set_homotopy([h, gs](int degree, int basis, int elem) -> std::vector<Term> {
    if (degree >= static_cast<int>(h->size()))
      throw HorizonError("cached homotopy: degree beyond the stored range");
    return (*h)[degree][static_cast<std::size_t>(basis) * gs + elem];
  });
  return res;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::optional<std::string> cache_dir_from_env() {
  const char* dir = std::getenv("M3LINK_CACHE_DIR");
  if (!dir || !*dir) return std::nullopt;
  return std::string(dir);
}

inline std::string cache_file_name(const std::string& group_tag, const std::string& strategy,
                                   int horizon) {
  std::string key = group_tag + "|" + strategy + "|" + std::to_string(horizon);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
  return "res_" + std::string(buf) + ".json";
}

/// Loads a cached resolution when M3LINK_CACHE_DIR is set and holds one;
/// otherwise builds it and, if possible, stores it.
template <typename Builder>
FreeResolution cached_resolution(const std::string& group_tag, const std::string& strategy,
                                 int horizon, Builder&& build) {
  auto dir = cache_dir_from_env();
  if (dir) {
    std::filesystem::path path =
        std::filesystem::path(*dir) / cache_file_name(group_tag, strategy, horizon);
    if (std::filesystem::exists(path)) {
      std::ifstream in(path);
      json j;
      in >> j;
      return resolution_from_json(j);
    }
    FreeResolution r = build();
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    std::ofstream out(path);
    if (out) out << resolution_to_json(r, group_tag);
    return r;
  }
  return build();
}

}  // namespace m3link
