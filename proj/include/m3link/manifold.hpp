#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "m3link/errors.hpp"
#include "m3link/fpgroup.hpp"
#include "m3link/pairing.hpp"
#include "m3link/serial.hpp"

namespace m3link {

/// Negative (minus) continued fraction p/q = a_1 - 1/(a_2 - 1/(... - 1/a_n))
/// with every a_i >= 2; defined for p > q >= 1 coprime.
inline std::vector<Int> minus_continued_fraction(Int p, Int q) {
  if (p < 2 || q < 1 || q >= p || gcd_int(p, q) != 1)
    throw Error("minus_continued_fraction: need coprime 1 <= q < p");
  std::vector<Int> out;
  for (;;) {
    Int a = (p + q - 1) / q;  // ceil(p/q)
    out.push_back(a);
    Int r = a * q - p;
    if (r == 0) break;
    p = q;
    q = r;
  }
  return out;
}

/// Tridiagonal chain-link matrix of a lens space: diagonal from the minus
/// continued fraction of p/q, ones off the diagonal. |det| = p.
inline IntMatrix lens_chain_matrix(const Int& p, const Int& q) {
  std::vector<Int> a = minus_continued_fraction(p, q);
  int n = static_cast<int>(a.size());
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    m.set(i, i, a[i]);
    if (i + 1 < n) {
      m.set(i, i + 1, 1);
      m.set(i + 1, i, 1);
    }
  }
  return m;
}

/// Plumbing matrix of the D_k tree (k >= 4) with all weights -2: two leaves
/// attached to vertex 2, then a chain. Bounds the quaternionic space form
/// S^3/Q_{4(k-2)}.
inline IntMatrix d_plumbing_matrix(int k) {
  if (k < 4) throw Error("d_plumbing_matrix: need k >= 4");
  IntMatrix m(k, k);
  for (int i = 0; i < k; ++i) m.set(i, i, -2);
  auto edge = [&](int i, int j) {
    m.set(i, j, 1);
    m.set(j, i, 1);
  };
  edge(0, 2);
  edge(1, 2);
  for (int i = 2; i + 1 < k; ++i) edge(i, i + 1);
  return m;
}

/// Closed-formula route for the lens pairing: Z/p with <g,g> = -q'/p where
/// q q' = 1 mod p. Cross-validates the chain-matrix route.
inline TorsionPairing lens_closed_form_pairing(const Int& p, const Int& q) {
  if (p < 2 || gcd_int(p, q) != 1) throw Error("lens_closed_form_pairing: bad parameters");
  Int qinv = mod_inverse(q, p);
  return TorsionPairing::from_gram(FiniteAbelianGroup(std::vector<Int>{p}), {{QmodZ(-Rat(qinv, p))}});
}

/// Spherical space form tags.
struct SpaceFormTag {
  enum class Kind { Q8, Q16, Q4n, Lens } kind = Kind::Q8;
  Int n = 0;       // Q4n: group order 4n
  Int p = 0, q = 0;  // Lens

  static SpaceFormTag q8() { return {Kind::Q8, 2, 0, 0}; }
  static SpaceFormTag q16() { return {Kind::Q16, 4, 0, 0}; }
  static SpaceFormTag q4n(const Int& n) {
    if (n < 2) throw Error("SpaceFormTag: Q4n needs n >= 2");
    return {Kind::Q4n, n, 0, 0};
  }
  static SpaceFormTag lens(const Int& p, const Int& q) {
    return {Kind::Lens, 0, p, q};
  }

  /// Index n in Q_{4n} (quaternion order / 4).
  Int quaternion_n() const {
    switch (kind) {
      case Kind::Q8: return 2;
      case Kind::Q16: return 4;
      case Kind::Q4n: return n;
      default: throw UnsupportedVariantError("SpaceFormTag: not a quaternionic tag");
    }
  }

  std::string str() const {
    switch (kind) {
      case Kind::Q8: return "Q8";
      case Kind::Q16: return "Q16";
      case Kind::Q4n: return "Q4n(" + n.str() + ")";
      case Kind::Lens: return "Lens(" + p.str() + "," + q.str() + ")";
    }
    return "";
  }

  static SpaceFormTag parse(const std::string& s) {
    if (s == "Q8") return q8();
    if (s == "Q16") return q16();
    auto args = [&](const std::string& prefix) -> std::vector<Int> {
      std::string body = s.substr(prefix.size() + 1, s.size() - prefix.size() - 2);
      std::vector<Int> out;
      std::size_t pos = 0;
      while (pos <= body.size()) {
        auto comma = body.find(',', pos);
        if (comma == std::string::npos) comma = body.size();
        out.push_back(Int(body.substr(pos, comma - pos)));
        pos = comma + 1;
      }
      return out;
    };
    try {
      if (s.rfind("Q4n(", 0) == 0 && s.back() == ')') return q4n(args("Q4n")[0]);
      if (s.rfind("Lens(", 0) == 0 && s.back() == ')') {
        auto a = args("Lens");
        return lens(a.at(0), a.at(1));
      }
    } catch (const std::exception&) {
    }
    throw UnsupportedVariantError("unsupported space-form tag: " + s);
  }
};

/// Symbolic description of a closed oriented 3-manifold. The orientation sign
/// multiplies the linking form (it records the choice of fundamental class).
class ManifoldDescription {
 public:
  struct Lens { Int p, q; };
  struct Surgery { IntMatrix matrix; };
  struct Sum { std::vector<ManifoldDescription> parts; };
  struct SpaceForm { SpaceFormTag tag; };

  using Variant = std::variant<Lens, Surgery, Sum, SpaceForm>;

  static ManifoldDescription lens(const Int& p, const Int& q, int orientation = 1) {
    if (p < 2 || gcd_int(p, q) != 1)
      throw Error("lens space needs p >= 2 and gcd(p,q) = 1");
    ManifoldDescription m;
    m.v_ = Lens{p, mod_floor(q, p)};
    m.orientation_ = orientation;
    return m;
  }

  static ManifoldDescription surgery(IntMatrix l, int orientation = 1) {
    if (!l.is_symmetric()) throw Error("surgery matrix must be symmetric");
    ManifoldDescription m;
    m.v_ = Surgery{std::move(l)};
    m.orientation_ = orientation;
    return m;
  }

  static ManifoldDescription connected_sum(std::vector<ManifoldDescription> parts,
                                           int orientation = 1) {
    ManifoldDescription m;
    m.v_ = Sum{std::move(parts)};
    m.orientation_ = orientation;
    return m;
  }

  static ManifoldDescription space_form(SpaceFormTag tag, int orientation = 1) {
    ManifoldDescription m;
    m.v_ = SpaceForm{tag};
    m.orientation_ = orientation;
    return m;
  }

  const Variant& variant() const { return v_; }
  int orientation() const { return orientation_; }

  ManifoldDescription reversed() const {
    ManifoldDescription m = *this;
    m.orientation_ = -m.orientation_;
    return m;
  }

  std::string str() const {
    std::string s;
    if (const auto* l = std::get_if<Lens>(&v_))
      s = "L(" + l->p.str() + "," + l->q.str() + ")";
    else if (std::get_if<Surgery>(&v_))
      s = "Surgery";
    else if (const auto* c = std::get_if<Sum>(&v_)) {
      s = "Sum(";
      for (std::size_t i = 0; i < c->parts.size(); ++i) {
        if (i) s += " # ";
        s += c->parts[i].str();
      }
      s += ")";
    } else if (const auto* f = std::get_if<SpaceForm>(&v_))
      s = "S3/" + f->tag.str();
    if (orientation_ < 0) s = "-" + s;
    return s;
  }

 private:
  Variant v_;
  int orientation_ = 1;
};

/// H_1 of the manifold as (torsion group, first Betti number).
inline std::pair<FiniteAbelianGroup, int> first_homology(const ManifoldDescription& m);

namespace detail {

inline std::pair<FiniteAbelianGroup, int> sum_homology(
    const std::vector<ManifoldDescription>& parts) {
  std::vector<Int> ds;
  int rank = 0;
  for (const auto& p : parts) {
    auto [g, r] = first_homology(p);
    rank += r;
    for (const auto& d : g.factors()) ds.push_back(d);
  }
  return {normalize_factors(ds).group, rank};
}

}  // namespace detail

/// Standard presentation of Q_{4n}: <x, y | x^n = y^2, y^-1 x y = x^-1>.
inline FpGroup quaternion_presentation(const Int& n) {
  long nl = to_long_checked(n, "quaternion index");
  std::vector<int> r1 = FpGroup::power_word(0, nl);  // x^n y^-2
  r1.push_back(-2);
  r1.push_back(-2);
  std::vector<int> r2 = {-2, 1, 2, 1};  // y^-1 x y x
  return FpGroup({"x", "y"}, {r1, r2});
}

inline FpGroup cyclic_presentation(const Int& p) {
  return FpGroup({"x"}, {FpGroup::power_word(0, to_long_checked(p, "lens order"))});
}

inline std::pair<FiniteAbelianGroup, int> first_homology(const ManifoldDescription& m) {
  if (const auto* l = std::get_if<ManifoldDescription::Lens>(&m.variant()))
    return {FiniteAbelianGroup(std::vector<Int>{l->p}), 0};
  if (const auto* s = std::get_if<ManifoldDescription::Surgery>(&m.variant())) {
    CokernelGroup ck = from_cokernel(s->matrix);
    return {ck.group, ck.free_rank};
  }
  if (const auto* c = std::get_if<ManifoldDescription::Sum>(&m.variant()))
    return detail::sum_homology(c->parts);
  const auto& tag = std::get<ManifoldDescription::SpaceForm>(m.variant()).tag;
  if (tag.kind == SpaceFormTag::Kind::Lens) return {FiniteAbelianGroup(std::vector<Int>{tag.p}), 0};
  auto [g, r] = abelianization(quaternion_presentation(tag.quaternion_n()));
  return {g, r};
}

/// Linking pairing on the torsion of H_1. Requires b_1 = 0. The chain-link
/// matrix route is primary for lens spaces; space forms go through their
/// plumbing matrices; connected sums through the orthogonal sum; the
/// orientation sign negates the Gram matrix.
inline TorsionPairing linking_form(const ManifoldDescription& m) {
  TorsionPairing p;
  if (const auto* l = std::get_if<ManifoldDescription::Lens>(&m.variant())) {
    p = TorsionPairing::from_linking_matrix(lens_chain_matrix(l->p, l->q));
  } else if (const auto* s = std::get_if<ManifoldDescription::Surgery>(&m.variant())) {
    p = TorsionPairing::from_linking_matrix(s->matrix);  // rejects b1 > 0
  } else if (const auto* c = std::get_if<ManifoldDescription::Sum>(&m.variant())) {
    p = TorsionPairing::from_gram(FiniteAbelianGroup(), {});
    for (const auto& part : c->parts) p = orthogonal_sum(p, linking_form(part));
  } else {
    const auto& tag = std::get<ManifoldDescription::SpaceForm>(m.variant()).tag;
    if (tag.kind == SpaceFormTag::Kind::Lens)
      return linking_form(ManifoldDescription::lens(tag.p, tag.q, m.orientation()));
    int k = static_cast<int>(to_long_checked(tag.quaternion_n(), "plumbing size")) + 2;
    p = TorsionPairing::from_linking_matrix(d_plumbing_matrix(k));
  }
  return m.orientation() < 0 ? p.negated() : p;
}

/// Presentation of the fundamental group. Surgery descriptions are rejected:
/// only the symbolic families carry presentations here.
inline FpGroup fundamental_group(const ManifoldDescription& m) {
  if (const auto* l = std::get_if<ManifoldDescription::Lens>(&m.variant()))
    return cyclic_presentation(l->p);
  if (std::get_if<ManifoldDescription::Surgery>(&m.variant()))
    throw UnsupportedVariantError("fundamental_group: general surgery descriptions are unsupported");
  if (const auto* c = std::get_if<ManifoldDescription::Sum>(&m.variant())) {
    FpGroup g({}, {});
    for (const auto& part : c->parts) g = free_product(g, fundamental_group(part));
    return g;
  }
  const auto& tag = std::get<ManifoldDescription::SpaceForm>(m.variant()).tag;
  if (tag.kind == SpaceFormTag::Kind::Lens) return cyclic_presentation(tag.p);
  return quaternion_presentation(tag.quaternion_n());
}

// --- manifest JSON ---

inline json to_json(const ManifoldDescription& m) {
  json j;
  j["orientation"] = m.orientation();
  if (const auto* l = std::get_if<ManifoldDescription::Lens>(&m.variant())) {
    j["variant"] = "lens";
    j["p"] = to_long_checked(l->p, "p");
    j["q"] = to_long_checked(l->q, "q");
  } else if (const auto* s = std::get_if<ManifoldDescription::Surgery>(&m.variant())) {
    j["variant"] = "surgery";
    j["matrix"] = to_json(s->matrix);
  } else if (const auto* c = std::get_if<ManifoldDescription::Sum>(&m.variant())) {
    j["variant"] = "sum";
    json parts = json::array();
    for (const auto& part : c->parts) parts.push_back(to_json(part));
    j["parts"] = parts;
  } else {
    j["variant"] = "spaceform";
    j["tag"] = std::get<ManifoldDescription::SpaceForm>(m.variant()).tag.str();
  }
  return j;
}

inline ManifoldDescription manifold_from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant"))
    throw SerializationError("manifold JSON needs a variant field");
  int orientation = j.value("orientation", 1);
  if (orientation != 1 && orientation != -1)
    throw SerializationError("orientation must be +1 or -1");
  std::string v = j.at("variant").get<std::string>();
  if (v == "lens")
    return ManifoldDescription::lens(Int(j.at("p").get<long>()), Int(j.at("q").get<long>()),
                                     orientation);
  if (v == "surgery")
    return ManifoldDescription::surgery(int_matrix_from_json(j.at("matrix")), orientation);
  if (v == "sum") {
    std::vector<ManifoldDescription> parts;
    for (const auto& pj : j.at("parts")) parts.push_back(manifold_from_json(pj));
    return ManifoldDescription::connected_sum(std::move(parts), orientation);
  }
  if (v == "spaceform")
    return ManifoldDescription::space_form(SpaceFormTag::parse(j.at("tag").get<std::string>()),
                                           orientation);
  throw SerializationError("unknown manifold variant: " + v);
}

}  // namespace m3link
