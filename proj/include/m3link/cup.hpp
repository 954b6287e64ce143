#pragma once

#include <map>
#include <memory>
#include <tuple>
#include <utility>
#include <vector>

#include "m3link/cohomology.hpp"
#include "m3link/errors.hpp"
#include "m3link/pairing.hpp"
#include "m3link/resolution.hpp"

namespace m3link {

/// One summand of an element of (R tensor R)_n over the underlying Z-basis:
/// coeff * (gu . u) tensor (gv . v) with u in degree p, v in degree n - p.
struct TensorTerm {
  int p;
  int u, gu;
  int v, gv;
  Int coeff;
};

class TensorVector {
 public:
  void add(int p, int u, int gu, int v, int gv, const Int& c) {
    if (c == 0) return;
    auto key = std::make_tuple(p, u, gu, v, gv);
    auto [it, inserted] = data_.try_emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) data_.erase(it);
    }
  }
  void add_term(const TensorTerm& t, const Int& scale = Int(1)) {
    add(t.p, t.u, t.gu, t.v, t.gv, t.coeff * scale);
  }
  std::vector<TensorTerm> terms() const {
    std::vector<TensorTerm> out;
    for (const auto& [k, c] : data_)
      out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k),
                     std::get<4>(k), c});
    return out;
  }
  bool operator==(const TensorVector& o) const { return data_ == o.data_; }

 private:
  std::map<std::tuple<int, int, int, int, int>, Int> data_;
};

/// Equivariant chain map R -> R tensor R lifting the identity, stored on the
/// ZG-basis elements degree by degree.
struct DiagonalMap {
  std::vector<std::vector<std::vector<TensorTerm>>> maps;  // [n][basis]
  int degree_max() const { return static_cast<int>(maps.size()) - 1; }
};

/// Alexander-Whitney diagonal on the bar resolution:
/// [g1|...|gn] -> sum of [g1|..|gi] tensor (g1...gi) . [g_{i+1}|..|gn].
inline DiagonalMap alexander_whitney(const FreeResolution& bar, int degree_max) {
  if (bar.strategy() != "bar")
    throw ContextMismatchError("alexander_whitney: resolution is not a bar resolution");
  const int gs = bar.group().size();
  DiagonalMap out;
  out.maps.resize(degree_max + 1);
  for (int n = 0; n <= degree_max; ++n) {
    out.maps[n].resize(bar.rank(n));
    for (int b = 0; b < bar.rank(n); ++b) {
      std::vector<int> t = detail::bar_decode(b, n, gs);
      std::vector<TensorTerm>& terms = out.maps[n][b];
      int prefix = 0;  // product g1 ... gi
      for (int i = 0; i <= n; ++i) {
        std::vector<int> front(t.begin(), t.begin() + i);
        std::vector<int> back(t.begin() + i, t.end());
        terms.push_back({i, detail::bar_encode(front, gs), 0,
                         detail::bar_encode(back, gs), prefix, Int(1)});
        if (i < n) prefix = bar.group().mul(prefix, t[i]);
      }
    }
  }
  return out;
}

/// Diagonal approximation by recursive homotopy lifting:
/// D_0(b0) = b0 tensor b0, D_n(b) = h_tensor(D_{n-1}(boundary b)).
inline DiagonalMap lifted_diagonal(const FreeResolution& r, int degree_max) {
  if (degree_max >= r.horizon())
    throw HorizonError("lifted_diagonal: need horizon > degree_max");
  DiagonalMap out;
  out.maps.resize(degree_max + 1);
  out.maps[0] = {{TensorTerm{0, 0, 0, 0, 0, Int(1)}}};
  const FiniteGroup& g = r.group();
  for (int n = 1; n <= degree_max; ++n) {
    out.maps[n].resize(r.rank(n));
    for (int b = 0; b < r.rank(n); ++b) {
      // image of the boundary under D_{n-1}, translated diagonally
      TensorVector img;
      for (const auto& [row, e] : r.boundary(n).column(b))
        for (const auto& [elem, c] : e.terms())
          for (const TensorTerm& t : out.maps[n - 1][row])
            img.add(t.p, t.u, g.mul(elem, t.gu), t.v, g.mul(elem, t.gv), t.coeff * c);
      // contract: h tensor 1 plus (eta eps) tensor h on degree-0 first factors
      TensorVector lifted;
      for (const TensorTerm& t : img.terms()) {
        for (const Term& h : r.homotopy(t.p, t.u, t.gu))
          lifted.add(t.p + 1, h.basis, h.elem, t.v, t.gv, h.coeff * t.coeff);
        if (t.p == 0)
          for (const Term& h : r.homotopy(n - 1, t.v, t.gv))
            lifted.add(0, 0, 0, h.basis, h.elem, h.coeff * t.coeff);
      }
      out.maps[n][b] = lifted.terms();
    }
  }
  return out;
}

/// Checks the chain-map identity d_tensor . D = D . d degreewise, plus the
/// counit condition in degree 0.
inline bool check_diagonal(const DiagonalMap& d, const FreeResolution& r) {
  const FiniteGroup& g = r.group();
  {
    Int counit = 0;
    for (const TensorTerm& t : d.maps[0][0])
      if (t.p == 0) counit += t.coeff;
    if (counit != 1) return false;
  }
  for (int n = 1; n <= d.degree_max(); ++n)
    for (int b = 0; b < r.rank(n); ++b) {
      TensorVector lhs;  // d_tensor(D_n b)
      for (const TensorTerm& t : d.maps[n][b]) {
        int q = n - t.p;
        if (t.p >= 1)
          for (const Term& bt : r.boundary(t.p).apply_flat(t.u, t.gu))
            lhs.add(t.p - 1, bt.basis, bt.elem, t.v, t.gv, bt.coeff * t.coeff);
        if (q >= 1) {
          Int sign = (t.p % 2 == 0) ? Int(1) : Int(-1);
          for (const Term& bt : r.boundary(q).apply_flat(t.v, t.gv))
            lhs.add(t.p, t.u, t.gu, bt.basis, bt.elem, bt.coeff * t.coeff * sign);
        }
      }
      TensorVector rhs;  // D_{n-1}(d b)
      for (const auto& [row, e] : r.boundary(n).column(b))
        for (const auto& [elem, c] : e.terms())
          for (const TensorTerm& t : d.maps[n - 1][row])
            rhs.add(t.p, t.u, g.mul(elem, t.gu), t.v, g.mul(elem, t.gv), t.coeff * c);
      if (!(lhs == rhs)) return false;
    }
  return true;
}

/// Evaluation of (w1 cup w2) on degree p+q chains, trivial coefficients.
inline std::vector<Int> cup_cochain(const DiagonalMap& d, int p, int q,
                                    const std::vector<Int>& w1, const std::vector<Int>& w2) {
  std::vector<Int> out(d.maps.at(p + q).size(), Int(0));
  for (std::size_t b = 0; b < out.size(); ++b)
    for (const TensorTerm& t : d.maps[p + q][b])
      if (t.p == p) out[b] += t.coeff * w1.at(t.u) * w2.at(t.v);
  return out;
}

/// Mixed-coefficient cup of a Q/Z cochain with an integral cochain.
inline std::vector<QmodZ> cup_cochain_qz(const DiagonalMap& d, int p, int q,
                                         const std::vector<QmodZ>& w1,
                                         const std::vector<Int>& w2) {
  std::vector<QmodZ> out(d.maps.at(p + q).size());
  for (std::size_t b = 0; b < out.size(); ++b)
    for (const TensorTerm& t : d.maps[p + q][b])
      if (t.p == p) out[b] = out[b] + w1.at(t.u) * (t.coeff * w2.at(t.v));
  return out;
}

/// Cached cohomological context for one resolution: H^2, H^4, and a diagonal
/// approximation good through degree 4.
class CupContext {
 public:
  explicit CupContext(FreeResolution res) : r_(std::move(res)) {
    if (r_.horizon() < 5)
      throw HorizonError("CupContext: resolution horizon must be at least 5");
    diag_ = r_.strategy() == "bar" ? alexander_whitney(r_, 4) : lifted_diagonal(r_, 4);
    h2_ = cohomology_z(r_, 2);
    h4_ = cohomology_z(r_, 4);
  }

  const FreeResolution& resolution() const { return r_; }
  const DiagonalMap& diagonal() const { return diag_; }
  const CohomologyGroup& h2() const { return h2_; }
  const CohomologyGroup& h4() const { return h4_; }

  /// Cup product of two degree-2 classes given by cocycle vectors.
  AbElement cup_class(const std::vector<Int>& z1, const std::vector<Int>& z2) const {
    if (static_cast<int>(z1.size()) != r_.rank(2) || static_cast<int>(z2.size()) != r_.rank(2))
      throw ContextMismatchError("cup_class: cocycle from another resolution context");
    return h4_.class_of(cup_cochain(diag_, 2, 2, z1, z2));
  }

  /// Degree-2 class remembering where it was computed.
  struct BoundClass {
    const CupContext* context;
    std::vector<Int> cocycle;
  };

  BoundClass h2_generator(int i) const { return {this, h2_.generator_cocycle(i)}; }
  BoundClass bind(const AbElement& cls) const { return {this, h2_.cocycle_of(cls)}; }

  AbElement cup_product(const BoundClass& a, const BoundClass& b) const {
    if (a.context != this || b.context != this)
      throw ContextMismatchError("cup_product: class from another resolution context");
    return cup_class(a.cocycle, b.cocycle);
  }

 private:
  FreeResolution r_;
  DiagonalMap diag_;
  CohomologyGroup h2_, h4_;
};

/// Image data of the degree-2 cup pairing: the subgroup C of H^4 generated by
/// all pairwise products of H^2 generators, the Gram matrix in C-coordinates,
/// cyclicity of C, and non-degeneracy of the pairing into C. gram_h4 carries
/// the classes inside H^4 when the full degree-4 group was computed; the
/// large-complex route leaves it empty (C-coordinates are faithful anyway).
struct CupPairingData {
  FiniteAbelianGroup h2, h4;
  FiniteAbelianGroup c_group;
  bool cyclic = true;
  bool nondegenerate = true;
  std::vector<std::vector<std::vector<Int>>> gram_c;   // C-coordinates per (i, j)
  std::vector<std::vector<AbElement>> gram_h4;         // the same classes in H^4

  /// Bilinear extension of the Gram matrix, valued in C.
  AbElement pair_in_c(const AbElement& a, const AbElement& b) const {
    if (a.group() != h2 || b.group() != h2)
      throw GroupMismatchError("pair_in_c: element from another group");
    AbElement out = AbElement::zero(c_group);
    const int k = h2.num_generators();
    for (int i = 0; i < k; ++i) {
      if (a.coords()[i] == 0) continue;
      for (int j = 0; j < k; ++j) {
        Int c = a.coords()[i] * b.coords()[j];
        if (c != 0) out = out + AbElement(c_group, gram_c[i][j]) * c;
      }
    }
    return out;
  }

  /// For cyclic C of order m and a unit k: the Q/Z-valued pairing on H^2
  /// under the embedding generator -> k/m.
  TorsionPairing to_torsion_pairing(const Int& unit) const {
    if (!cyclic) throw Error("to_torsion_pairing: image subgroup is not cyclic");
    Int m = c_group.is_trivial() ? Int(1) : c_group.factors()[0];
    const int k = h2.num_generators();
    std::vector<std::vector<QmodZ>> gram(k, std::vector<QmodZ>(k));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (!c_group.is_trivial())
          gram[i][j] = QmodZ(unit * gram_c[i][j][0], m);
    return TorsionPairing::from_gram(h2, std::move(gram));
  }
};

namespace detail {

/// Non-degeneracy into C from the Gram matrix alone.
inline bool cup_nondegenerate(const CupPairingData& d) {
  const int k = d.h2.num_generators();
  for (const auto& a : all_elements(d.h2)) {
    if (a.is_zero()) continue;
    bool hits = false;
    for (int j = 0; j < k && !hits; ++j)
      if (!d.pair_in_c(a, AbElement::generator(d.h2, j)).is_zero()) hits = true;
    if (!hits) return false;
  }
  return true;
}

}  // namespace detail

namespace detail {

/// Presentation of the subgroup of an invariant-factor group generated by the
/// given coordinate vectors, with a coordinate map for membership.
struct SubgroupPresentation {
  FiniteAbelianGroup group;
  IntMatrix basis;  // columns: lattice basis of preimage(L) in Z^m
  std::shared_ptr<ColumnEchelon> ech;
  CokernelPresentation pres;

  std::vector<Int> coords_of(const std::vector<Int>& ambient) const {
    auto w = ech->solve(ambient);
    if (!w) throw Error("subgroup coords: element outside the subgroup");
    return pres.project_torsion(*w);
  }
};

inline SubgroupPresentation subgroup_of(const FiniteAbelianGroup& ambient,
                                        const std::vector<std::vector<Int>>& gens) {
  const int m = ambient.num_generators();
  IntMatrix all(m, static_cast<int>(gens.size()) + m);
  for (int j = 0; j < static_cast<int>(gens.size()); ++j)
    for (int i = 0; i < m; ++i)
      if (gens[j][i] != 0) all.set(i, j, gens[j][i]);
  for (int i = 0; i < m; ++i) all.set(i, static_cast<int>(gens.size()) + i, ambient.factors()[i]);
  SubgroupPresentation out;
  out.basis = lattice_column_basis(all);
  out.ech = std::make_shared<ColumnEchelon>(out.basis);
  IntMatrix rel(out.basis.cols(), m);
  for (int j = 0; j < m; ++j) {
    std::vector<Int> target(m, Int(0));
    target[j] = ambient.factors()[j];
    auto w = out.ech->solve(target);
    if (!w) throw Error("subgroup_of: relation lattice escapes the basis");
    for (int i = 0; i < rel.rows(); ++i)
      if ((*w)[i] != 0) rel.set(i, j, (*w)[i]);
  }
  out.pres = cokernel_presentation(rel);
  out.group = FiniteAbelianGroup(out.pres.factors);
  return out;
}

}  // namespace detail

/// Full cup-pairing image computation on one resolution context.
inline CupPairingData cup_pairing_gram(const CupContext& ctx) {
  CupPairingData out;
  out.h2 = ctx.h2().group();
  out.h4 = ctx.h4().group();
  const int k = out.h2.num_generators();
  out.gram_h4.assign(k, std::vector<AbElement>(k, AbElement::zero(out.h4)));
  std::vector<std::vector<Int>> gens;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) {
      AbElement c = ctx.cup_class(ctx.h2().generator_cocycle(i), ctx.h2().generator_cocycle(j));
      out.gram_h4[i][j] = out.gram_h4[j][i] = c;
      gens.push_back(c.coords());
    }
  detail::SubgroupPresentation sub = detail::subgroup_of(out.h4, gens);
  out.c_group = sub.group;
  out.cyclic = sub.group.num_generators() <= 1;
  out.gram_c.assign(k, std::vector<std::vector<Int>>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.gram_c[i][j] = sub.coords_of(out.gram_h4[i][j].coords());
  out.nondegenerate = detail::cup_nondegenerate(out);
  return out;
}

/// Cup pairing of a free product of finite cyclic groups: classifying spaces
/// wedge, so cohomology splits with componentwise products and zero cross
/// terms.
inline CupPairingData free_product_cup_pairing(const std::vector<Int>& orders) {
  for (const auto& n : orders)
    if (n < 2) throw Error("free_product_cup_pairing: factors must be finite cyclic of order >= 2");
  // per-factor cup data via the periodic resolution
  std::vector<Int> units;
  for (const auto& n : orders) {
    CupContext ctx(periodic_resolution_cyclic(static_cast<int>(to_long_checked(n, "order")), 5));
    CupPairingData d = cup_pairing_gram(ctx);
    if (!(d.h2 == FiniteAbelianGroup(std::vector<Int>{n})) || d.gram_c[0].empty())
      throw Error("free_product_cup_pairing: unexpected cyclic factor data");
    // generator^2 = unit * (generator of C = H^4)
    units.push_back(d.gram_c[0][0].empty() ? Int(0) : d.gram_c[0][0][0]);
  }
  const int r = static_cast<int>(orders.size());
  FactorNormalization h2n = normalize_factors(orders);
  FactorNormalization h4n = normalize_factors(orders);
  CupPairingData out;
  out.h2 = h2n.group;
  out.h4 = h4n.group;
  const int k = out.h2.num_generators();
  // cup of old generators: e_a cup e_b = 0 for a != b, u_a * (H^4 factor a) else
  auto old_cup = [&](int a, int b) {
    std::vector<Int> v(r, Int(0));
    if (a == b) v[a] = units[a];
    return v;
  };
  out.gram_h4.assign(k, std::vector<AbElement>(k, AbElement::zero(out.h4)));
  std::vector<std::vector<Int>> gens;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      std::vector<Int> li = h2n.new_gens_in_old.col_vector(i);
      std::vector<Int> lj = h2n.new_gens_in_old.col_vector(j);
      std::vector<Int> acc(r, Int(0));
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
          if (li[a] == 0 || lj[b] == 0) continue;
          std::vector<Int> c = old_cup(a, b);
          for (int t = 0; t < r; ++t) acc[t] += li[a] * lj[b] * c[t];
        }
      out.gram_h4[i][j] = AbElement(out.h4, h4n.old_to_new.apply(acc));
      if (j <= i) gens.push_back(out.gram_h4[i][j].coords());
    }
  detail::SubgroupPresentation sub = detail::subgroup_of(out.h4, gens);
  out.c_group = sub.group;
  out.cyclic = sub.group.num_generators() <= 1;
  out.gram_c.assign(k, std::vector<std::vector<Int>>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.gram_c[i][j] = sub.coords_of(out.gram_h4[i][j].coords());
  out.nondegenerate = detail::cup_nondegenerate(out);
  return out;
}

/// Cup pairing over a bar resolution too large for a full degree-4 cohomology
/// group. Positive-degree cohomology of a finite group is finite, so the
/// degree-4 cocycle lattice is the saturation of the coboundary image; that
/// turns every class question into an exact solve against delta^3:
///   - H^4 is the product of the invariant factors of delta^3,
///   - C = Z^{pairs} / { x : sum x_ij z_ij is a coboundary },
///   - class vanishing and non-degeneracy are thin integral solves.
/// Only degree 4 of the bar resolution is needed.
inline CupPairingData cup_pairing_gram_large(std::shared_ptr<const FiniteGroup> group,
                                             long memory_bound = 4'000'000) {
  FreeResolution bar = bar_resolution(std::move(group), 4, memory_bound);
  CohomologyGroup h2 = cohomology_z(bar, 2);
  DiagonalMap diag = alexander_whitney(bar, 4);
  IntMatrix delta3 = coboundary_matrix(bar, 3);
  ColumnEchelon ech3(delta3);

  CupPairingData out;
  out.h2 = h2.group();
  const int k = out.h2.num_generators();
  std::vector<std::vector<Int>> cochains(k * k);
  std::vector<std::pair<int, int>> pairs;  // unordered (i >= j)
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) {
      cochains[i * k + j] =
          cup_cochain(diag, 2, 2, h2.generator_cocycle(i), h2.generator_cocycle(j));
      pairs.emplace_back(i, j);
    }
  // graded commutativity at class level: z_ij - z_ji must be a coboundary
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j) {
      std::vector<Int> zji =
          cup_cochain(diag, 2, 2, h2.generator_cocycle(j), h2.generator_cocycle(i));
      std::vector<Int> diff = cochains[i * k + j];
      for (std::size_t t = 0; t < diff.size(); ++t) diff[t] -= zji[t];
      if (!ech3.solve(diff))
        throw Error("cup_pairing_gram_large: cup classes fail graded commutativity");
    }
  const int t = static_cast<int>(pairs.size());
  const int dim4 = bar.rank(4);
  // relation lattice of C: coefficients whose combination is a coboundary
  IntMatrix block(dim4, t + delta3.cols());
  for (int c = 0; c < t; ++c) {
    const auto& z = cochains[pairs[c].first * k + pairs[c].second];
    for (int row = 0; row < dim4; ++row)
      if (z[row] != 0) block.set(row, c, z[row]);
  }
  delta3.for_each_nonzero([&](int i, int j, const Int& v) { block.set(i, t + j, v); });
  IntMatrix ker = kernel_basis(block);
  IntMatrix relations(t, ker.cols());
  for (int c = 0; c < ker.cols(); ++c)
    for (int i = 0; i < t; ++i)
      if (ker.at(i, c) != 0) relations.set(i, c, ker.at(i, c));
  CokernelPresentation pres = cokernel_presentation(relations);
  if (pres.free_rank != 0)
    throw Error("cup_pairing_gram_large: image subgroup fails to be finite");
  out.c_group = FiniteAbelianGroup(pres.factors);
  out.cyclic = out.c_group.num_generators() <= 1;
  out.gram_c.assign(k, std::vector<std::vector<Int>>(k));
  for (int c = 0; c < t; ++c) {
    std::vector<Int> unit(t, Int(0));
    unit[c] = 1;
    std::vector<Int> coords = pres.project_torsion(unit);
    out.gram_c[pairs[c].first][pairs[c].second] = coords;
    out.gram_c[pairs[c].second][pairs[c].first] = coords;
  }
  out.nondegenerate = detail::cup_nondegenerate(out);
  // H^4 itself, from the elementary divisors of delta^3
  out.h4 = FiniteAbelianGroup(smith_normal_form(delta3, false).invariant_factors());
  return out;
}

/// Agreement of two cup-pairing computations up to isomorphism of the
/// (H^2, C, gram) data: some automorphism pair carries one Gram to the other.
inline bool cup_pairings_isomorphic(const CupPairingData& a, const CupPairingData& b) {
  if (!(a.h2 == b.h2) || !(a.c_group == b.c_group)) return false;
  const int k = a.h2.num_generators();
  if (a.c_group.is_trivial()) return true;
  for (const AbHom& phi : automorphisms(a.h2))
    for (const AbHom& psi : automorphisms(a.c_group)) {
      bool ok = true;
      for (int i = 0; i < k && ok; ++i)
        for (int j = 0; j < k && ok; ++j) {
          // psi(gram_a(i,j)) == gram_b(phi(e_i), phi(e_j)) by bilinearity
          AbElement lhs = psi.apply(AbElement(a.c_group, a.gram_c[i][j]));
          AbElement rhs = AbElement::zero(b.c_group);
          for (int s = 0; s < k; ++s)
            for (int t = 0; t < k; ++t) {
              Int c = phi.matrix().at(s, i) * phi.matrix().at(t, j);
              if (c != 0) rhs = rhs + AbElement(b.c_group, b.gram_c[s][t]) * c;
            }
          if (lhs != rhs) ok = false;
        }
      if (ok) return true;
    }
  return false;
}

}  // namespace m3link
