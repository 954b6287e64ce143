#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "m3link/abgrp.hpp"
#include "m3link/errors.hpp"

namespace m3link {

/// Finite group as a multiplication table. Element 0 is the identity. The
/// table is verified to be a group on construction.
class FiniteGroup {
 public:
  FiniteGroup() : n_(1), table_{0}, name_("trivial") {}

  FiniteGroup(int n, std::vector<int> table, std::string name,
              std::vector<int> generators = {})
      : n_(n), table_(std::move(table)), name_(std::move(name)), gens_(std::move(generators)) {
    validate();
  }

  int size() const { return n_; }
  const std::string& name() const { return name_; }
  const std::vector<int>& generator_hints() const { return gens_; }

  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a) * n_ + b]; }

  int inv(int a) const {
    for (int b = 0; b < n_; ++b)
      if (mul(a, b) == 0) return b;
    throw Error("FiniteGroup: element has no inverse");  // unreachable after validate
  }

  int power(int a, Int e) const {
    e = mod_floor(e, order_of(a));
    int acc = 0;
    for (Int k = 0; k < e; ++k) acc = mul(acc, a);
    return acc;
  }

  Int order_of(int a) const {
    int x = a;
    Int k = 1;
    while (x != 0) {
      x = mul(x, a);
      ++k;
    }
    return k;
  }

  bool is_abelian() const {
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  int commutator(int a, int b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }

  /// Closure of a generating set (always contains the identity).
  std::vector<int> subgroup_closure(const std::vector<int>& gens) const {
    std::set<int> elems{0};
    std::vector<int> frontier{0};
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int x : frontier)
        for (int g : gens) {
          int y = mul(x, g);
          if (elems.insert(y).second) next.push_back(y);
        }
      frontier = std::move(next);
    }
    return {elems.begin(), elems.end()};
  }

  bool is_subgroup(const std::vector<int>& elems) const {
    std::set<int> s(elems.begin(), elems.end());
    if (!s.count(0)) return false;
    for (int a : elems)
      for (int b : elems)
        if (!s.count(mul(a, b))) return false;
    return true;
  }

  bool is_normal(const std::vector<int>& elems) const {
    std::set<int> s(elems.begin(), elems.end());
    for (int g = 0; g < n_; ++g)
      for (int h : elems)
        if (!s.count(mul(mul(g, h), inv(g)))) return false;
    return true;
  }

  std::vector<int> normalizer(const std::vector<int>& elems) const {
    std::set<int> s(elems.begin(), elems.end());
    std::vector<int> out;
    for (int g = 0; g < n_; ++g) {
      bool ok = true;
      for (int h : elems)
        if (!s.count(mul(mul(g, h), inv(g)))) { ok = false; break; }
      if (ok) out.push_back(g);
    }
    return out;
  }

  std::vector<int> derived_subgroup_elements() const {
    std::vector<int> comms;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) comms.push_back(commutator(a, b));
    std::sort(comms.begin(), comms.end());
    comms.erase(std::unique(comms.begin(), comms.end()), comms.end());
    return subgroup_closure(comms);
  }

  bool operator==(const FiniteGroup& o) const { return n_ == o.n_ && table_ == o.table_; }

 private:
  void validate() const {
    if (n_ <= 0 || table_.size() != static_cast<std::size_t>(n_) * n_)
      throw Error("FiniteGroup: bad table shape");
    for (int v : table_)
      if (v < 0 || v >= n_) throw Error("FiniteGroup: table entry out of range");
    for (int a = 0; a < n_; ++a)
      if (mul(0, a) != a || mul(a, 0) != a)
        throw Error("FiniteGroup: element 0 is not the identity");
    std::vector<bool> has_inv(n_, false);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        if (mul(a, b) == 0) has_inv[a] = true;
    for (int a = 0; a < n_; ++a)
      if (!has_inv[a]) throw Error("FiniteGroup: missing inverse");
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        for (int c = 0; c < n_; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c)))
            throw Error("FiniteGroup: multiplication is not associative");
  }

  int n_;
  std::vector<int> table_;
  std::string name_;
  std::vector<int> gens_;
};

/// A subgroup re-packaged as a group of its own, with the inclusion map.
struct SubgroupWithInclusion {
  FiniteGroup group;
  std::vector<int> inclusion;  // subgroup element -> ambient element
};

inline SubgroupWithInclusion subgroup_as_group(const FiniteGroup& g,
                                               std::vector<int> elems,
                                               const std::string& name) {
  std::sort(elems.begin(), elems.end());
  if (elems.empty() || elems.front() != 0 || !g.is_subgroup(elems))
    throw Error("subgroup_as_group: not a subgroup");
  std::map<int, int> index;
  for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i);
  int m = static_cast<int>(elems.size());
  std::vector<int> table(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      table[static_cast<std::size_t>(a) * m + b] = index.at(g.mul(elems[a], elems[b]));
  return {FiniteGroup(m, std::move(table), name), std::move(elems)};
}

inline SubgroupWithInclusion derived_subgroup(const FiniteGroup& g) {
  return subgroup_as_group(g, g.derived_subgroup_elements(), "[" + g.name() + "," + g.name() + "]");
}

/// Quotient by a normal subgroup, with the projection map.
struct QuotientWithProjection {
  FiniteGroup group;
  std::vector<int> projection;  // ambient element -> quotient element
};

inline QuotientWithProjection quotient_group(const FiniteGroup& g,
                                             const std::vector<int>& normal_elems,
                                             const std::string& name) {
  if (!g.is_normal(normal_elems)) throw Error("quotient_group: subgroup is not normal");
  std::set<int> normal(normal_elems.begin(), normal_elems.end());
  std::vector<int> coset_of(g.size(), -1);
  std::vector<int> reps;
  for (int a = 0; a < g.size(); ++a) {
    if (coset_of[a] >= 0) continue;
    int c = static_cast<int>(reps.size());
    reps.push_back(a);
    for (int h : normal_elems) coset_of[g.mul(a, h)] = c;
  }
  int m = static_cast<int>(reps.size());
  std::vector<int> table(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      table[static_cast<std::size_t>(a) * m + b] = coset_of[g.mul(reps[a], reps[b])];
  return {FiniteGroup(m, std::move(table), name), std::move(coset_of)};
}

/// Sylow 2-subgroup, grown one index-2 step at a time inside normalizers.
inline SubgroupWithInclusion sylow2(const FiniteGroup& g, int bound = 512) {
  if (g.size() > bound) throw BoundExceededError("sylow2: group order exceeds bound");
  Int two_part = p_part(Int(g.size()), 2);
  std::vector<int> s{0};
  while (static_cast<Int>(s.size()) < two_part) {
    std::vector<int> norm = g.normalizer(s);
    std::set<int> in_s(s.begin(), s.end());
    bool grown = false;
    for (int x : norm) {
      if (in_s.count(x)) continue;
      // order of the image of x in N(S)/S
      Int k = 1;
      int y = x;
      while (!in_s.count(y)) { y = g.mul(y, x); ++k; }
      if (k % 2 != 0) continue;
      int h = g.power(x, k / 2);  // image has order 2, h^2 in S
      if (in_s.count(h)) continue;
      std::vector<int> bigger = s;
      for (int e : s) bigger.push_back(g.mul(h, e));
      std::sort(bigger.begin(), bigger.end());
      s = std::move(bigger);
      grown = true;
      break;
    }
    if (!grown) throw Error("sylow2: stalled below the full 2-part");
  }
  return subgroup_as_group(g, s, "Sylow2(" + g.name() + ")");
}

/// Derived series inside the table group; returns G = D_0 > D_1 > ... as
/// element lists, stopping when it stabilizes or after max_steps.
inline std::vector<std::vector<int>> derived_series(const FiniteGroup& g, int max_steps = 8) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(g.size());
  for (int i = 0; i < g.size(); ++i) cur[i] = i;
  out.push_back(cur);
  for (int step = 0; step < max_steps; ++step) {
    SubgroupWithInclusion sub = subgroup_as_group(g, cur, "D");
    std::vector<int> der = sub.group.derived_subgroup_elements();
    std::vector<int> next;
    for (int e : der) next.push_back(sub.inclusion[e]);
    std::sort(next.begin(), next.end());
    if (next == cur) break;
    out.push_back(next);
    cur = std::move(next);
    if (cur.size() == 1) break;
  }
  return out;
}

/// Abelianization of a table group with the projection onto invariant-factor
/// coordinates.
struct TableAbelianization {
  FiniteAbelianGroup group;
  std::vector<std::vector<Int>> coords_of;  // element -> coordinates
};

inline TableAbelianization abelianization(const FiniteGroup& g) {
  QuotientWithProjection q = quotient_group(g, g.derived_subgroup_elements(), "ab");
  const FiniteGroup& a = q.group;
  // present the abelian quotient on all its elements: e_x + e_y - e_{xy}
  IntMatrix rel(a.size(), a.size() * a.size());
  int col = 0;
  for (int x = 0; x < a.size(); ++x)
    for (int y = 0; y < a.size(); ++y, ++col) {
      rel.add_to(x, col, 1);
      rel.add_to(y, col, 1);
      rel.add_to(a.mul(x, y), col, -1);
    }
  CokernelGroup ck = from_cokernel(rel);
  TableAbelianization out;
  out.group = ck.group;
  out.coords_of.resize(g.size());
  for (int e = 0; e < g.size(); ++e) {
    std::vector<Int> unit(a.size(), Int(0));
    unit[q.projection[e]] = 1;
    out.coords_of[e] = ck.project(unit).coords();
  }
  return out;
}

inline FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b,
                                  const std::string& name) {
  int n = a.size() * b.size();
  std::vector<int> table(static_cast<std::size_t>(n) * n);
  auto id = [&](int x, int y) { return x * b.size() + y; };
  for (int x1 = 0; x1 < a.size(); ++x1)
    for (int y1 = 0; y1 < b.size(); ++y1)
      for (int x2 = 0; x2 < a.size(); ++x2)
        for (int y2 = 0; y2 < b.size(); ++y2)
          table[static_cast<std::size_t>(id(x1, y1)) * n + id(x2, y2)] =
              id(a.mul(x1, x2), b.mul(y1, y2));
  return FiniteGroup(n, std::move(table), name);
}

inline int count_involutions(const FiniteGroup& g) {
  int c = 0;
  for (int a = 1; a < g.size(); ++a)
    if (g.mul(a, a) == 0) ++c;
  return c;
}

/// A 2-group of order >= 8 with a unique involution is cyclic or generalized
/// quaternion; non-abelian settles it.
inline bool is_generalized_quaternion(const FiniteGroup& g) {
  Int n(g.size());
  if (n < 8 || p_part(n, 2) != n) return false;
  return count_involutions(g) == 1 && !g.is_abelian();
}

// --- construction from tags ---

inline FiniteGroup cyclic_group(int n) {
  if (n < 1) throw InvalidTagError("cyclic: order must be >= 1");
  std::vector<int> t(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
  return FiniteGroup(n, std::move(t), "cyclic(" + std::to_string(n) + ")", n > 1 ? std::vector<int>{1} : std::vector<int>{});
}

inline FiniteGroup dihedral_group(int order) {
  if (order < 2 || order % 2 != 0) throw InvalidTagError("dihedral: order must be even and >= 2");
  int n = order / 2;
  auto id = [&](int i, int s) { return s ? n + i : i; };
  std::vector<int> t(static_cast<std::size_t>(order) * order);
  auto set = [&](int a, int b, int v) { t[static_cast<std::size_t>(a) * order + b] = v; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      set(id(a, 0), id(b, 0), id((a + b) % n, 0));
      set(id(a, 0), id(b, 1), id((a + b) % n, 1));
      set(id(a, 1), id(b, 0), id(((a - b) % n + n) % n, 1));
      set(id(a, 1), id(b, 1), id(((a - b) % n + n) % n, 0));
    }
  return FiniteGroup(order, std::move(t), "dihedral(" + std::to_string(order) + ")",
                     {id(1 % n, 0), id(0, 1)});
}

/// Generalized quaternion group of the given order 4n (n >= 2):
/// x of order 2n, y with y^2 = x^n and y^-1 x y = x^-1.
inline FiniteGroup quaternion_group(int order) {
  if (order < 8 || order % 4 != 0)
    throw InvalidTagError("quaternion: order must be a multiple of 4 and >= 8");
  int n = order / 4;
  int m = 2 * n;  // order of x
  auto id = [&](int i, int s) { return s ? m + i : i; };
  std::vector<int> t(static_cast<std::size_t>(order) * order);
  auto set = [&](int a, int b, int v) { t[static_cast<std::size_t>(a) * order + b] = v; };
  auto mm = [&](int v) { return ((v % m) + m) % m; };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      set(id(a, 0), id(b, 0), id(mm(a + b), 0));
      set(id(a, 0), id(b, 1), id(mm(a + b), 1));
      set(id(a, 1), id(b, 0), id(mm(a - b), 1));
      set(id(a, 1), id(b, 1), id(mm(a - b + n), 0));  // y^2 = x^n
    }
  return FiniteGroup(order, std::move(t), "quaternion(" + std::to_string(order) + ")",
                     {id(1, 0), id(0, 1)});
}

inline FiniteGroup semidihedral_group(int order) {
  // order 2^k, k >= 4: r of order 2^{k-1}, s^2 = 1, s r s = r^{2^{k-2} - 1}
  if (order < 16 || (order & (order - 1)) != 0)
    throw InvalidTagError("semidihedral: order must be 2^k with k >= 4");
  int n = order / 2;
  int tw = n / 2 - 1;
  auto id = [&](int i, int s) { return s ? n + i : i; };
  auto mm = [&](long v) { return static_cast<int>(((v % n) + n) % n); };
  std::vector<int> t(static_cast<std::size_t>(order) * order);
  auto set = [&](int a, int b, int v) { t[static_cast<std::size_t>(a) * order + b] = v; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      set(id(a, 0), id(b, 0), id(mm(a + b), 0));
      set(id(a, 0), id(b, 1), id(mm(a + b), 1));
      set(id(a, 1), id(b, 0), id(mm(a + static_cast<long>(tw) * b), 1));
      set(id(a, 1), id(b, 1), id(mm(a + static_cast<long>(tw) * b), 0));
    }
  return FiniteGroup(order, std::move(t), "semidihedral(" + std::to_string(order) + ")",
                     {id(1, 0), id(0, 1)});
}

inline FiniteGroup group_from_table_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("size") || !j.contains("table"))
    throw InvalidTagError("from_table: JSON needs size and table");
  int n = j.at("size").get<int>();
  std::vector<int> table;
  for (const auto& row : j.at("table"))
    for (const auto& v : row) table.push_back(v.get<int>());
  return FiniteGroup(n, std::move(table), j.value("name", std::string("from_table")));
}

/// Parses tags of the form cyclic(n), dihedral(2n), quaternion(4n),
/// semidihedral(2^k), product(tag, tag, ...).
inline FiniteGroup group_from_tag(const std::string& tag);

namespace detail {

inline std::vector<std::string> split_args(const std::string& body) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : body) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

}  // namespace detail

inline FiniteGroup group_from_tag(const std::string& tag) {
  auto open = tag.find('(');
  if (open == std::string::npos || tag.back() != ')')
    throw InvalidTagError("bad group tag: " + tag);
  std::string head = tag.substr(0, open);
  std::string body = tag.substr(open + 1, tag.size() - open - 2);
  try {
    if (head == "cyclic") return cyclic_group(std::stoi(body));
    if (head == "dihedral") return dihedral_group(std::stoi(body));
    if (head == "quaternion") return quaternion_group(std::stoi(body));
    if (head == "semidihedral") return semidihedral_group(std::stoi(body));
    if (head == "from_table") return group_from_table_json(nlohmann::json::parse(body));
    if (head == "product") {
      std::vector<std::string> parts = detail::split_args(body);
      if (parts.empty()) return cyclic_group(1);
      FiniteGroup acc = group_from_tag(parts[0]);
      for (std::size_t i = 1; i < parts.size(); ++i)
        acc = direct_product(acc, group_from_tag(parts[i]), "");
      if (parts.size() > 1)
        acc = FiniteGroup(acc.size(), [&] {
          std::vector<int> t;
          for (int a = 0; a < acc.size(); ++a)
            for (int b = 0; b < acc.size(); ++b) t.push_back(acc.mul(a, b));
          return t;
        }(), tag);
      return acc;
    }
  } catch (const InvalidTagError&) {
    throw;
  } catch (const std::exception& e) {
    throw InvalidTagError("bad group tag '" + tag + "': " + e.what());
  }
  throw InvalidTagError("unknown group tag: " + tag);
}

}  // namespace m3link
