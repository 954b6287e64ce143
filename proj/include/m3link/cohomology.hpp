#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "m3link/abgrp.hpp"
#include "m3link/errors.hpp"
#include "m3link/resolution.hpp"

namespace m3link {

/// Coboundary C^n -> C^{n+1} of the Hom_ZG(F_*, Z) complex: the augmented
/// boundary matrix of degree n+1, transposed.
inline IntMatrix coboundary_matrix(const FreeResolution& r, int n) {
  if (n < 0 || n + 1 > r.horizon())
    throw HorizonError("coboundary_matrix: degree outside the resolution horizon");
  return r.boundary(n + 1).augmented().transpose();
}

/// Subquotient presentation of a cohomology group at one degree, with exact
/// projection (class of a cocycle) and lifts (representative of a class).
class CohomologyGroup {
 public:
  CohomologyGroup() = default;

  int degree() const { return degree_; }
  const FiniteAbelianGroup& group() const { return group_; }
  int free_rank() const { return free_rank_; }
  int cochain_dim() const { return kernel_.rows(); }

  /// Class of an integer cocycle (throws if the vector is not a cocycle).
  AbElement class_of(const std::vector<Int>& cocycle) const {
    auto w = kernel_echelon_->solve(cocycle);
    if (!w) throw Error("class_of: vector is not a cocycle");
    return AbElement(group_, pres_.project_torsion(*w));
  }

  /// Representative cocycle for a class.
  std::vector<Int> cocycle_of(const AbElement& cls) const {
    if (cls.group() != group_) throw GroupMismatchError("cocycle_of: class from another group");
    std::vector<Int> z(kernel_.rows(), Int(0));
    for (int i = 0; i < group_.num_generators(); ++i) {
      if (cls.coords()[i] == 0) continue;
      for (int row = 0; row < kernel_.rows(); ++row)
        z[row] += cls.coords()[i] * gen_reps_.at(i)[row];
    }
    return z;
  }

  std::vector<Int> generator_cocycle(int i) const { return gen_reps_.at(i); }

 private:
  friend CohomologyGroup cohomology_z(const FreeResolution&, int);
  friend CohomologyGroup cohomology_mod(const FreeResolution&, int, const Int&);

  int degree_ = 0;
  FiniteAbelianGroup group_;
  int free_rank_ = 0;
  IntMatrix kernel_;  // cochain_dim x k basis of the cocycle lattice
  CokernelPresentation pres_;
  std::shared_ptr<ColumnEchelon> kernel_echelon_;
  std::vector<std::vector<Int>> gen_reps_;
};

/// H^n(G; Z) computed from the resolution's Hom complex via Smith reduction.
inline CohomologyGroup cohomology_z(const FreeResolution& r, int n) {
  IntMatrix delta_n = coboundary_matrix(r, n);
  IntMatrix kernel = kernel_basis(delta_n);
  auto ech = std::make_shared<ColumnEchelon>(kernel);
  IntMatrix relations(kernel.cols(), n == 0 ? 0 : r.rank(n - 1));
  if (n > 0) {
    IntMatrix prev = coboundary_matrix(r, n - 1);
    for (int j = 0; j < prev.cols(); ++j) {
      auto w = ech->solve(prev.col_vector(j));
      if (!w) throw Error("cohomology_z: coboundary is not a cocycle (d^2 != 0?)");
      for (int i = 0; i < relations.rows(); ++i)
        if ((*w)[i] != 0) relations.set(i, j, (*w)[i]);
    }
  }
  CohomologyGroup out;
  out.degree_ = n;
  out.pres_ = cokernel_presentation(relations);
  out.group_ = FiniteAbelianGroup(out.pres_.factors);
  out.free_rank_ = out.pres_.free_rank;
  out.kernel_ = kernel;
  out.kernel_echelon_ = ech;
  for (std::size_t i = 0; i < out.pres_.factors.size(); ++i) {
    std::vector<Int> lift = out.pres_.gen_lifts.col_vector(static_cast<int>(i));
    std::vector<Int> rep(kernel.rows(), Int(0));
    for (int row = 0; row < kernel.rows(); ++row)
      for (int c = 0; c < kernel.cols(); ++c)
        if (lift[c] != 0) rep[row] += kernel.at(row, c) * lift[c];
    out.gen_reps_.push_back(std::move(rep));
  }
  return out;
}

/// H^n(G; Z/m): cocycles mod m, modulo integral coboundaries and m times
/// everything. Classes are carried by integer vectors read mod m.
inline CohomologyGroup cohomology_mod(const FreeResolution& r, int n, const Int& m) {
  if (m < 2) throw Error("cohomology_mod: modulus must be >= 2");
  IntMatrix delta_n = coboundary_matrix(r, n);
  const int dim = delta_n.cols(), codim = delta_n.rows();
  // solutions of delta x = m y, projected to x
  IntMatrix block(codim, dim + codim);
  delta_n.for_each_nonzero([&](int i, int j, const Int& v) { block.set(i, j, v); });
  for (int i = 0; i < codim; ++i) block.set(i, dim + i, m);
  IntMatrix ker = kernel_basis(block);
  IntMatrix gens(dim, ker.cols() + dim);  // generators of the cocycle lattice, plus m I
  for (int c = 0; c < ker.cols(); ++c)
    for (int i = 0; i < dim; ++i)
      if (ker.at(i, c) != 0) gens.set(i, c, ker.at(i, c));
  for (int i = 0; i < dim; ++i) gens.set(i, ker.cols() + i, m);
  IntMatrix basis = lattice_column_basis(gens);
  auto ech = std::make_shared<ColumnEchelon>(basis);
  // relations: integral coboundaries and m e_i
  int prev_cols = n == 0 ? 0 : r.rank(n - 1);
  IntMatrix relations(basis.cols(), prev_cols + dim);
  IntMatrix prev = n == 0 ? IntMatrix(dim, 0) : coboundary_matrix(r, n - 1);
  for (int j = 0; j < prev_cols + dim; ++j) {
    std::vector<Int> target(dim, Int(0));
    if (j < prev_cols) target = prev.col_vector(j);
    else target[j - prev_cols] = m;
    auto sol = ech->solve(target);
    if (!sol) throw Error("cohomology_mod: relation escapes the cocycle lattice");
    for (int i = 0; i < relations.rows(); ++i)
      if ((*sol)[i] != 0) relations.set(i, j, (*sol)[i]);
  }
  CohomologyGroup out;
  out.degree_ = n;
  out.pres_ = cokernel_presentation(relations);
  out.group_ = FiniteAbelianGroup(out.pres_.factors);
  out.free_rank_ = out.pres_.free_rank;
  out.kernel_ = basis;
  out.kernel_echelon_ = ech;
  for (std::size_t i = 0; i < out.pres_.factors.size(); ++i) {
    std::vector<Int> lift = out.pres_.gen_lifts.col_vector(static_cast<int>(i));
    std::vector<Int> rep(basis.rows(), Int(0));
    for (int row = 0; row < basis.rows(); ++row)
      for (int c = 0; c < basis.cols(); ++c)
        if (lift[c] != 0) rep[row] += basis.at(row, c) * lift[c];
    out.gen_reps_.push_back(std::move(rep));
  }
  return out;
}

// --- cochain helpers ---

inline bool is_integer_cocycle(const FreeResolution& r, int n, const std::vector<Int>& z) {
  IntMatrix d = coboundary_matrix(r, n);
  for (const auto& v : d.apply(z))
    if (v != 0) return false;
  return true;
}

inline bool is_qz_cocycle(const FreeResolution& r, int n, const std::vector<QmodZ>& z) {
  IntMatrix d = coboundary_matrix(r, n);
  std::vector<QmodZ> out(d.rows());
  d.for_each_nonzero([&](int i, int j, const Int& v) { out[i] = out[i] + z[j] * v; });
  for (const auto& v : out)
    if (!v.is_zero()) return false;
  return true;
}

/// Cochain-level Bockstein: lift the Q/Z cochain to Q with values in [0,1),
/// apply the coboundary; the result is integral exactly when the input is a
/// cocycle mod 1.
inline std::vector<Int> bockstein_cochain(const FreeResolution& r, int n,
                                          const std::vector<QmodZ>& z) {
  if (!is_qz_cocycle(r, n, z)) throw Error("bockstein: input is not a Q/Z cocycle");
  IntMatrix d = coboundary_matrix(r, n);
  std::vector<Rat> lifted(d.rows());
  d.for_each_nonzero([&](int i, int j, const Int& v) { lifted[i] += z[j].value() * Rat(v); });
  std::vector<Int> out(d.rows());
  for (int i = 0; i < d.rows(); ++i) {
    if (rat_den(lifted[i]) != 1)
      throw Error("bockstein: coboundary of the lift is not integral");
    out[i] = rat_num(lifted[i]);
  }
  return out;
}

/// Cochain-level inverse Bockstein: solves delta u = |G| y over Z and returns
/// u / |G| mod 1. Always solvable for a cocycle y in positive degree; failure
/// is a hard error.
inline std::vector<QmodZ> bockstein_inverse_cochain(const FreeResolution& r, int n,
                                                    const std::vector<Int>& y) {
  if (n < 1) throw Error("bockstein_inverse: degree must be >= 1");
  if (!is_integer_cocycle(r, n, y)) throw Error("bockstein_inverse: input is not a cocycle");
  Int order(r.group().size());
  IntMatrix d_prev = coboundary_matrix(r, n - 1);
  std::vector<Int> rhs(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) rhs[i] = order * y[i];
  auto u = solve_integer(d_prev, rhs);
  if (!u)
    throw Error("bockstein_inverse: |G| y is not a coboundary; the Bockstein fails to be "
                "surjective, which contradicts finiteness");
  std::vector<QmodZ> z(u->size());
  for (std::size_t i = 0; i < u->size(); ++i) z[i] = QmodZ(Rat((*u)[i], order));
  return z;
}

/// H^n(G; Q/Z) presented through the Bockstein isomorphism onto H^{n+1}(G; Z)
/// (finite group, n >= 1). Classes of Q/Z cocycles are identified by their
/// Bockstein; lifts come from the inverse construction.
class QmodZCohomology {
 public:
  QmodZCohomology(const FreeResolution* r, int n) : r_(r), degree_(n), next_(cohomology_z(*r, n + 1)) {
    if (n < 1) throw Error("QmodZCohomology: degree must be >= 1");
  }

  int degree() const { return degree_; }
  const FiniteAbelianGroup& group() const { return next_.group(); }

  AbElement class_of(const std::vector<QmodZ>& z) const {
    return next_.class_of(bockstein_cochain(*r_, degree_, z));
  }

  std::vector<QmodZ> cocycle_of(const AbElement& cls) const {
    return bockstein_inverse_cochain(*r_, degree_ + 1, next_.cocycle_of(cls));
  }

  const CohomologyGroup& bockstein_target() const { return next_; }

 private:
  const FreeResolution* r_;
  int degree_;
  CohomologyGroup next_;
};

/// Integral 2-cocycle on the bar resolution attached to a character of H_1(G):
/// f(g, h) = q(g) + q(h) - q(gh) for the rational lift q with values in [0,1).
/// The assignment character -> class realizes H^1(G, Q/Z) = H^2(G, Z).
inline std::vector<Int> char_to_h2_cocycle(const FiniteGroup& g, const TableAbelianization& ab,
                                           const Character& chi) {
  const int n = g.size();
  std::vector<Rat> lift(n);
  for (int e = 0; e < n; ++e)
    lift[e] = chi.apply(AbElement(ab.group, ab.coords_of[e])).value();
  std::vector<Int> f(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Rat v = lift[a] + lift[b] - lift[g.mul(a, b)];
      if (rat_den(v) != 1) throw Error("char_to_h2: lift defect is not integral");
      f[static_cast<std::size_t>(a) * n + b] = rat_num(v);
    }
  return f;
}

}  // namespace m3link
