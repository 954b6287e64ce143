#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "m3link/errors.hpp"
#include "m3link/groupring.hpp"
#include "m3link/snf.hpp"

namespace m3link {

/// Free resolution of Z over ZG up to a horizon, with boundary maps as
/// group-ring matrices and a contracting homotopy on the underlying free
/// abelian groups. The homotopy witnesses exactness:
///   boundary(1) h_0 + eta eps = id,   boundary(d+1) h_d + h_{d-1} boundary(d) = id.
class FreeResolution {
 public:
  using HomotopyFn = std::function<std::vector<Term>(int degree, int basis, int elem)>;

  FreeResolution() = default;
  FreeResolution(std::shared_ptr<const FiniteGroup> group, std::vector<int> ranks,
                 std::vector<GroupRingMatrix> boundaries, std::string strategy)
      : group_(std::move(group)), ranks_(std::move(ranks)),
        boundaries_(std::move(boundaries)), strategy_(std::move(strategy)) {
    if (ranks_.empty() || ranks_[0] != 1)
      throw Error("FreeResolution: degree 0 must have rank 1");
    if (boundaries_.size() + 1 != ranks_.size())
      throw Error("FreeResolution: need one boundary per positive degree");
    for (std::size_t i = 0; i < boundaries_.size(); ++i)
      if (boundaries_[i].target_rank() != ranks_[i] ||
          boundaries_[i].source_rank() != ranks_[i + 1])
        throw Error("FreeResolution: boundary shape mismatch at degree " + std::to_string(i + 1));
  }

  const FiniteGroup& group() const { return *group_; }
  std::shared_ptr<const FiniteGroup> group_ptr() const { return group_; }
  int horizon() const { return static_cast<int>(ranks_.size()) - 1; }
  int rank(int degree) const { return ranks_.at(degree); }
  const std::string& strategy() const { return strategy_; }

  /// boundary(i): F_i -> F_{i-1}, for 1 <= i <= horizon.
  const GroupRingMatrix& boundary(int i) const { return boundaries_.at(i - 1); }

  bool has_homotopy() const { return static_cast<bool>(homotopy_); }
  void set_homotopy(HomotopyFn h) { homotopy_ = std::move(h); }

  /// h_d applied to the underlying basis vector (basis, elem) of F_d.
  std::vector<Term> homotopy(int degree, int basis, int elem) const {
    if (!homotopy_) throw Error("FreeResolution: no contracting homotopy attached");
    if (degree + 1 > horizon())
      throw HorizonError("FreeResolution: homotopy leaves the horizon");
    return homotopy_(degree, basis, elem);
  }

  std::vector<Term> homotopy_applied(int degree, const std::vector<Term>& v) const {
    FlatVector acc;
    for (const Term& t : v)
      acc.add_terms(homotopy(degree, t.basis, t.elem), t.coeff);
    return acc.terms();
  }

  std::vector<Term> boundary_applied(int degree, const std::vector<Term>& v) const {
    FlatVector acc;
    for (const Term& t : v)
      acc.add_terms(boundary(degree).apply_flat(t.basis, t.elem), t.coeff);
    return acc.terms();
  }

  /// Augmentation of a flat vector in degree 0 (rank-1 module, eps(g b0) = 1).
  static Int augmentation(const std::vector<Term>& v) {
    Int s = 0;
    for (const Term& t : v) s += t.coeff;
    return s;
  }

 private:
  std::shared_ptr<const FiniteGroup> group_;
  std::vector<int> ranks_;
  std::vector<GroupRingMatrix> boundaries_;
  std::string strategy_;
  HomotopyFn homotopy_;
};

// --- bar resolution ---

namespace detail {

/// Tuple index arithmetic for the (unnormalized) bar resolution.
inline std::vector<int> bar_decode(int index, int degree, int gsize) {
  std::vector<int> t(degree);
  for (int i = degree - 1; i >= 0; --i) {
    t[i] = index % gsize;
    index /= gsize;
  }
  return t;
}

inline int bar_encode(const std::vector<int>& t, int gsize) {
  long idx = 0;
  for (int g : t) idx = idx * gsize + g;
  return static_cast<int>(idx);
}

}  // namespace detail

/// Unnormalized bar resolution through degree n_max; rank |G|^n in degree n.
/// Canonical homotopy h(g [g1|...|gn]) = [g|g1|...|gn].
inline FreeResolution bar_resolution(std::shared_ptr<const FiniteGroup> group, int n_max,
                                     long memory_bound = 4'000'000) {
  const int n = group->size();
  long cells = 1;
  for (int d = 0; d <= n_max + 1; ++d) {
    cells *= n;
    if (cells > memory_bound)
      throw BoundExceededError("bar_resolution: |G|^(n_max+1) exceeds the memory bound");
  }
  std::vector<int> ranks;
  long r = 1;
  for (int d = 0; d <= n_max; ++d) {
    ranks.push_back(static_cast<int>(r));
    r *= n;
  }
  std::vector<GroupRingMatrix> bds;
  for (int d = 1; d <= n_max; ++d) {
    GroupRingMatrix m(group, ranks[d - 1], ranks[d]);
    for (int col = 0; col < ranks[d]; ++col) {
      std::vector<int> t = detail::bar_decode(col, d, n);
      // front face: g1 . [g2|...|gn]
      std::vector<int> tail(t.begin() + 1, t.end());
      m.add_entry(detail::bar_encode(tail, n), col, GroupRingElement::of(t[0]));
      // middle faces
      int sign = 1;
      for (int i = 0; i + 1 < d; ++i) {
        sign = -sign;
        std::vector<int> merged;
        merged.reserve(d - 1);
        for (int k = 0; k < i; ++k) merged.push_back(t[k]);
        merged.push_back(group->mul(t[i], t[i + 1]));
        for (int k = i + 2; k < d; ++k) merged.push_back(t[k]);
        m.add_entry(detail::bar_encode(merged, n), col, GroupRingElement::of(0, Int(sign)));
      }
      // back face: drop the last letter
      std::vector<int> head(t.begin(), t.end() - 1);
      sign = (d % 2 == 0) ? 1 : -1;
      m.add_entry(detail::bar_encode(head, n), col, GroupRingElement::of(0, Int(sign)));
    }
    bds.push_back(std::move(m));
  }
  FreeResolution res(group, std::move(ranks), std::move(bds), "bar");
  int gsize = n;
  res.set_homotopy([gsize](int degree, int basis, int elem) -> std::vector<Term> {
    std::vector<int> t = detail::bar_decode(basis, degree, gsize);
    t.insert(t.begin(), elem);
    return {Term{detail::bar_encode(t, gsize), 0, Int(1)}};
  });
  return res;
}

// --- periodic resolution of a cyclic group ---

/// 2-periodic resolution of Z/n: rank 1 everywhere, boundaries alternating
/// (t - 1) and the norm, homotopy in closed form.
inline FreeResolution periodic_resolution_cyclic(int n, int n_max) {
  if (n < 2) throw Error("periodic_resolution_cyclic: need n >= 2");
  auto group = std::make_shared<const FiniteGroup>(cyclic_group(n));
  std::vector<int> ranks(n_max + 1, 1);
  GroupRingElement tm1 =
      GroupRingElement::from_terms({{1, Int(1)}, {0, Int(-1)}});
  GroupRingElement nrm = norm_element(*group);
  std::vector<GroupRingMatrix> bds;
  for (int d = 1; d <= n_max; ++d) {
    GroupRingMatrix m(group, 1, 1);
    m.add_entry(0, 0, d % 2 == 1 ? tm1 : nrm);
    bds.push_back(std::move(m));
  }
  FreeResolution res(group, std::move(ranks), std::move(bds), "periodic");
  res.set_homotopy([n](int degree, int /*basis*/, int elem) -> std::vector<Term> {
    std::vector<Term> out;
    if (degree % 2 == 0) {
      for (int j = 0; j < elem; ++j) out.push_back({0, j, Int(1)});
    } else if (elem == n - 1) {
      out.push_back({0, 0, Int(1)});
    }
    return out;
  });
  return res;
}

// --- homotopy solving and checks ---

/// Degreewise exact solve for a contracting homotopy. Fails with the degree
/// when the complex is not exact there.
inline std::vector<std::vector<std::vector<Term>>> solve_contracting_homotopy(
    const FreeResolution& r, int max_degree = -1) {
  const int gs = r.group().size();
  if (max_degree < 0) max_degree = r.horizon() - 1;
  std::vector<std::vector<std::vector<Term>>> h(max_degree + 1);
  for (int d = 0; d <= max_degree; ++d) {
    IntMatrix bz = r.boundary(d + 1).underlying();
    ColumnEchelon ech(bz);
    int dim = r.rank(d) * gs;
    h[d].resize(dim);
    for (int basis = 0; basis < r.rank(d); ++basis)
      for (int g = 0; g < gs; ++g) {
        FlatVector target;
        target.add(basis, g, 1);
        if (d == 0) {
          target.add(0, 0, -1);  // eta eps
        } else {
          std::vector<Term> down = r.boundary(d).apply_flat(basis, g);
          for (const Term& t : down) {
            for (const Term& ht : h[d - 1][t.basis * gs + t.elem])
              target.add(ht.basis, ht.elem, -t.coeff * ht.coeff);
          }
        }
        std::vector<Int> b(static_cast<std::size_t>(r.rank(d)) * gs, Int(0));
        for (const Term& t : target.terms()) b[t.basis * gs + t.elem] = t.coeff;
        auto x = ech.solve(b);
        if (!x)
          throw NotExactError("complex is not exact at degree " + std::to_string(d));
        std::vector<Term>& out = h[d][basis * gs + g];
        for (int i = 0; i < static_cast<int>(x->size()); ++i)
          if ((*x)[i] != 0) out.push_back({i / gs, i % gs, (*x)[i]});
      }
  }
  return h;
}

inline void attach_solved_homotopy(FreeResolution& r, int max_degree = -1) {
  auto h = std::make_shared<std::vector<std::vector<std::vector<Term>>>>(
      solve_contracting_homotopy(r, max_degree));
  int gs = r.group().size();
  r.set_homotopy([h, gs](int degree, int basis, int elem) -> std::vector<Term> {
    if (degree >= static_cast<int>(h->size()))
      throw HorizonError("solved homotopy: degree beyond the solved range");
    return (*h)[degree][basis * gs + elem];
  });
}

// --- periodic resolution of generalized quaternion groups ---

/// 4-periodic resolution of Q_{4n} (orders 8, 16, 32) from the standard
/// presentation <x, y | x^n = y^2, y^-1 x y = x^-1>:
///   d1 = (x-1, y-1)
///   d2 = [[1+x+...+x^{n-1}, 1+xy], [-(1+y), x-1]]
///   d3 = ((x-1), (1-xy))^T, d4 = (norm), then repeat.
/// The contracting homotopy is solved exactly; failure to solve would mean a
/// wrong boundary matrix and is a hard error.
inline FreeResolution periodic_resolution_quaternion(int order, int n_max) {
  if (order != 8 && order != 16 && order != 32)
    throw BoundExceededError("periodic_resolution_quaternion: order must be 8, 16, or 32");
  int n = order / 4;
  auto group = std::make_shared<const FiniteGroup>(quaternion_group(order));
  const int x = 1;           // x^1
  const int y = 2 * n;       // y
  const int xy = group->mul(x, y);
  auto xpow = [&](int k) { return ((k % (2 * n)) + 2 * n) % (2 * n); };

  GroupRingElement xm1 = GroupRingElement::from_terms({{x, Int(1)}, {0, Int(-1)}});
  GroupRingElement ym1 = GroupRingElement::from_terms({{y, Int(1)}, {0, Int(-1)}});
  std::vector<std::pair<int, Int>> nx_terms;
  for (int k = 0; k < n; ++k) nx_terms.emplace_back(xpow(k), Int(1));
  GroupRingElement nx = GroupRingElement::from_terms(std::move(nx_terms));
  GroupRingElement one_plus_xy = GroupRingElement::from_terms({{0, Int(1)}, {xy, Int(1)}});
  GroupRingElement minus_one_plus_y =
      GroupRingElement::from_terms({{0, Int(-1)}, {y, Int(-1)}});
  GroupRingElement one_minus_xy = GroupRingElement::from_terms({{0, Int(1)}, {xy, Int(-1)}});

  auto rank_at = [](int d) {
    static const int pat[4] = {1, 2, 2, 1};
    return pat[d % 4];
  };
  std::vector<int> ranks;
  for (int d = 0; d <= n_max; ++d) ranks.push_back(rank_at(d));

  std::vector<GroupRingMatrix> bds;
  for (int d = 1; d <= n_max; ++d) {
    GroupRingMatrix m(group, rank_at(d - 1), rank_at(d));
    switch (d % 4) {
      case 1:  // F_1 -> F_0
        m.add_entry(0, 0, xm1);
        m.add_entry(0, 1, ym1);
        break;
      case 2:  // F_2 -> F_1
        m.add_entry(0, 0, nx);
        m.add_entry(1, 0, minus_one_plus_y);
        m.add_entry(0, 1, one_plus_xy);
        m.add_entry(1, 1, xm1);
        break;
      case 3:  // F_3 -> F_2
        m.add_entry(0, 0, xm1);
        m.add_entry(1, 0, one_minus_xy);
        break;
      default:  // F_4 -> F_3: the full norm
        m.add_entry(0, 0, norm_element(*group));
        break;
    }
    bds.push_back(std::move(m));
  }
  FreeResolution res(group, std::move(ranks), std::move(bds), "periodic");
  attach_solved_homotopy(res);
  return res;
}

// --- tensor product resolution ---

/// Resolution of G1 x G2 built from resolutions of the factors; degree n is
/// the sum over p+q=n of F^1_p tensor F^2_q. Product elements are indexed
/// (g1, g2) -> g1 * |G2| + g2, matching direct_product.
/// Homotopy: h = h1 tensor 1 + (eta1 eps1) tensor h2.
inline FreeResolution tensor_resolution(const FreeResolution& r1, const FreeResolution& r2,
                                        int n_max = -1) {
  if (n_max < 0) n_max = std::min(r1.horizon(), r2.horizon());
  if (n_max > std::min(r1.horizon(), r2.horizon()))
    throw HorizonError("tensor_resolution: factors do not reach the requested horizon");
  auto g1 = r1.group_ptr();
  auto g2 = r2.group_ptr();
  auto group = std::make_shared<const FiniteGroup>(
      direct_product(*g1, *g2, "product(" + g1->name() + "," + g2->name() + ")"));
  const int n2 = g2->size();

  std::vector<int> r2ranks;
  for (int d = 0; d <= r2.horizon(); ++d) r2ranks.push_back(r2.rank(d));

  // offsets[n][p] = first index of the (p, n-p) block in degree n
  std::vector<std::vector<int>> offsets(n_max + 1);
  std::vector<int> ranks(n_max + 1, 0);
  for (int n = 0; n <= n_max; ++n) {
    int off = 0;
    offsets[n].resize(n + 2, 0);
    for (int p = 0; p <= n; ++p) {
      offsets[n][p] = off;
      off += r1.rank(p) * r2.rank(n - p);
    }
    offsets[n][n + 1] = off;
    ranks[n] = off;
  }
  auto encode = [offsets, r2ranks](int n, int p, int u, int v) {
    return offsets[n][p] + u * r2ranks[n - p] + v;
  };
  auto decode = [offsets, r2ranks](int n, int idx, int& p, int& u, int& v) {
    p = 0;
    while (idx >= offsets[n][p + 1]) ++p;
    int rel = idx - offsets[n][p];
    int rv = r2ranks[n - p];
    u = rel / rv;
    v = rel % rv;
  };

  auto pair_elem = [n2](int e1, int e2) { return e1 * n2 + e2; };

  std::vector<GroupRingMatrix> bds;
  for (int n = 1; n <= n_max; ++n) {
    GroupRingMatrix m(group, ranks[n - 1], ranks[n]);
    for (int col = 0; col < ranks[n]; ++col) {
      int p, u, v;
      decode(n, col, p, u, v);
      int q = n - p;
      if (p >= 1)
        for (const auto& [row, e] : r1.boundary(p).column(u))
          for (const auto& [elem, c] : e.terms())
            m.add_entry(encode(n - 1, p - 1, row, v), col,
                        GroupRingElement::of(pair_elem(elem, 0), c));
      if (q >= 1) {
        Int sign = (p % 2 == 0) ? Int(1) : Int(-1);
        for (const auto& [row, e] : r2.boundary(q).column(v))
          for (const auto& [elem, c] : e.terms())
            m.add_entry(encode(n - 1, p, u, row), col,
                        GroupRingElement::of(pair_elem(0, elem), c * sign));
      }
    }
    bds.push_back(std::move(m));
  }
  FreeResolution res(group, std::move(ranks), std::move(bds), "tensor");

  auto h1 = std::make_shared<FreeResolution>(r1);
  auto h2 = std::make_shared<FreeResolution>(r2);
  res.set_homotopy([h1, h2, n2, encode, decode](int degree, int basis,
                                                int elem) -> std::vector<Term> {
    int p, u, v;
    decode(degree, basis, p, u, v);
    int q = degree - p;
    int e1 = elem / n2, e2 = elem % n2;
    std::vector<Term> out;
    for (const Term& t : h1->homotopy(p, u, e1))
      out.push_back({encode(degree + 1, p + 1, t.basis, v), t.elem * n2 + e2, t.coeff});
    if (p == 0) {
      // eps1(g1 . b0) = 1, eta1 = (b0, identity)
      for (const Term& t : h2->homotopy(q, v, e2))
        out.push_back({encode(degree + 1, 0, 0, t.basis), 0 * n2 + t.elem, t.coeff});
    }
    return out;
  });
  return res;
}

// --- structural checks ---

/// boundary(i-1) . boundary(i) = 0 for all i, and eps . boundary(1) = 0.
inline bool check_boundaries_square_to_zero(const FreeResolution& r) {
  if (!r.boundary(1).augmented().is_zero()) return false;
  for (int i = 2; i <= r.horizon(); ++i)
    if (!r.boundary(i - 1).multiply(r.boundary(i)).is_zero()) return false;
  return true;
}

/// The exactness witness, degreewise on every underlying basis vector.
inline bool check_homotopy_witness(const FreeResolution& r, int max_degree = -1) {
  if (max_degree < 0) max_degree = r.horizon() - 1;
  const int gs = r.group().size();
  for (int d = 0; d <= max_degree; ++d) {
    for (int basis = 0; basis < r.rank(d); ++basis)
      for (int g = 0; g < gs; ++g) {
        FlatVector acc;
        acc.add_terms(r.boundary_applied(d + 1, r.homotopy(d, basis, g)));
        if (d == 0) {
          acc.add(0, 0, 1);  // eta eps
        } else {
          acc.add_terms(r.homotopy_applied(d - 1, r.boundary(d).apply_flat(basis, g)));
        }
        FlatVector expect;
        expect.add(basis, g, 1);
        if (!(acc == expect)) return false;
      }
  }
  return true;
}

// --- chain map lifting ---

/// Equivariant chain map lifting the identity of Z, stored on basis elements.
struct ChainMap {
  // maps[n][source basis] = flat terms in the target's degree n
  std::vector<std::vector<std::vector<Term>>> maps;

  int degree_max() const { return static_cast<int>(maps.size()) - 1; }

  std::vector<Term> apply_flat(const FiniteGroup& target_group, int degree, int basis,
                               int elem, const Int& coeff = Int(1)) const {
    std::vector<Term> out;
    for (const Term& t : maps.at(degree).at(basis))
      out.push_back({t.basis, target_group.mul(elem, t.elem), t.coeff * coeff});
    return out;
  }

  /// Pullback of an integer cochain on the target (trivial coefficients).
  std::vector<Int> pullback(int degree, const std::vector<Int>& z) const {
    std::vector<Int> out(maps.at(degree).size(), Int(0));
    for (std::size_t b = 0; b < maps[degree].size(); ++b)
      for (const Term& t : maps[degree][b]) out[b] += t.coeff * z.at(t.basis);
    return out;
  }
};

/// Effective comparison theorem: f_0(b0) = eta', f_n(b) = h'(f_{n-1}(d b)).
inline ChainMap lift_chain_map(const FreeResolution& source, const FreeResolution& target,
                               int degree_max) {
  if (degree_max > source.horizon() || degree_max > target.horizon())
    throw HorizonError("lift_chain_map: beyond a horizon");
  if (!(source.group() == target.group()))
    throw ContextMismatchError("lift_chain_map: resolutions over different groups");
  const FiniteGroup& g = target.group();
  ChainMap out;
  out.maps.resize(degree_max + 1);
  out.maps[0] = {{Term{0, 0, Int(1)}}};  // b0 -> eta'(1)
  for (int n = 1; n <= degree_max; ++n) {
    out.maps[n].resize(source.rank(n));
    for (int b = 0; b < source.rank(n); ++b) {
      FlatVector image;
      for (const auto& [row, e] : source.boundary(n).column(b))
        for (const auto& [elem, c] : e.terms())
          image.add_terms(out.apply_flat(g, n - 1, row, elem, c));
      FlatVector lifted;
      for (const Term& t : image.terms())
        lifted.add_terms(target.homotopy(n - 1, t.basis, t.elem), t.coeff);
      out.maps[n][b] = lifted.terms();
    }
  }
  return out;
}

/// f commutes with the boundaries degreewise on every basis element.
inline bool check_chain_map(const ChainMap& f, const FreeResolution& source,
                            const FreeResolution& target) {
  const FiniteGroup& g = target.group();
  if (FreeResolution::augmentation(f.maps[0][0]) != 1) return false;
  for (int n = 1; n <= f.degree_max(); ++n)
    for (int b = 0; b < source.rank(n); ++b) {
      FlatVector lhs;  // d'(f_n b)
      for (const Term& t : f.maps[n][b])
        lhs.add_terms(target.boundary(n).apply_flat(t.basis, t.elem), t.coeff);
      FlatVector rhs;  // f_{n-1}(d b)
      for (const auto& [row, e] : source.boundary(n).column(b))
        for (const auto& [elem, c] : e.terms())
          rhs.add_terms(f.apply_flat(g, n - 1, row, elem, c));
      if (!(lhs == rhs)) return false;
    }
  return true;
}

}  // namespace m3link
