#pragma once

// JSON forms for the exact types. Integer and rational values travel as
// decimal strings so interchange never rounds.

#include <string>

#include <json.hpp>

#include "m3link/errors.hpp"
#include "m3link/intmatrix.hpp"
#include "m3link/numeric.hpp"

namespace m3link {

using json = nlohmann::json;

inline std::string int_to_string(const Int& v) { return v.str(); }

inline Int int_from_string(const std::string& s) {
  try {
    return Int(s);
  } catch (const std::exception&) {
    throw SerializationError("bad integer literal: " + s);
  }
}

inline std::string rat_to_string(const Rat& r) {
  if (rat_den(r) == 1) return rat_num(r).str();
  return rat_num(r).str() + "/" + rat_den(r).str();
}

inline Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw SerializationError("bad rational literal: " + s);
  }
}

inline json to_json(const IntMatrix& m) {
  json entries = json::array();
  m.for_each_nonzero([&](int i, int j, const Int& v) {
    entries.push_back(json::array({i, j, int_to_string(v)}));
  });
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

inline IntMatrix int_matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols"))
    throw SerializationError("matrix JSON must have rows/cols");
  IntMatrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  if (j.contains("entries"))
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 3)
        throw SerializationError("matrix entry must be [i, j, \"v\"]");
      m.set(e[0].get<int>(), e[1].get<int>(), int_from_string(e[2].get<std::string>()));
    }
  return m;
}

}  // namespace m3link
