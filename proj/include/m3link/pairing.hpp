#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "m3link/abgrp.hpp"
#include "m3link/errors.hpp"
#include "m3link/snf.hpp"

namespace m3link {

/// Symmetric Q/Z-valued bilinear form on a finite abelian group, stored as a
/// Gram matrix on the invariant-factor generators. Well-definedness demands
/// d_i * gram[i][j] = 0 in Q/Z.
class TorsionPairing {
 public:
  TorsionPairing() = default;

  static TorsionPairing from_gram(FiniteAbelianGroup g, std::vector<std::vector<QmodZ>> gram) {
    const int k = g.num_generators();
    if (static_cast<int>(gram.size()) != k)
      throw MalformedGramError("from_gram: gram has wrong number of rows");
    for (int i = 0; i < k; ++i)
      if (static_cast<int>(gram[i].size()) != k)
        throw MalformedGramError("from_gram: gram row " + std::to_string(i) + " has wrong length");
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (gram[i][j] != gram[j][i])
          throw MalformedGramError("from_gram: not symmetric at cell (" + std::to_string(i) +
                                   "," + std::to_string(j) + ")");
        if (!(gram[i][j] * g.factors()[i]).is_zero())
          throw MalformedGramError("from_gram: value not annihilated by generator order at cell (" +
                                   std::to_string(i) + "," + std::to_string(j) + ")");
      }
    TorsionPairing p;
    p.group_ = std::move(g);
    p.gram_ = std::move(gram);
    return p;
  }

  /// Linking pairing of the closed oriented 3-manifold presented by surgery on
  /// a framed link with nonsingular symmetric linking matrix L: the form
  /// (x, y) |-> -x^T L^{-1} y mod 1 on coker(L).
  static TorsionPairing from_linking_matrix(const IntMatrix& l) {
    if (!l.is_symmetric()) throw MalformedGramError("from_linking_matrix: matrix not symmetric");
    CokernelGroup ck = from_cokernel(l);
    if (ck.free_rank != 0)
      throw SingularMatrixError("from_linking_matrix: singular matrix (b1 > 0 is rejected)");
    RatMatrix inv = rational_inverse(l);
    const int k = ck.group.num_generators();
    std::vector<std::vector<QmodZ>> gram(k, std::vector<QmodZ>(k));
    std::vector<std::vector<Int>> lifts;
    for (int i = 0; i < k; ++i) lifts.push_back(ck.lift_generator(i));
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) {
        Rat v = 0;
        for (int a = 0; a < l.rows(); ++a) {
          if (lifts[i][a] == 0) continue;
          for (int b = 0; b < l.rows(); ++b)
            if (lifts[j][b] != 0 && inv.at(a, b) != 0)
              v += Rat(lifts[i][a]) * inv.at(a, b) * Rat(lifts[j][b]);
        }
        gram[i][j] = gram[j][i] = QmodZ(-v);
      }
    return from_gram(ck.group, std::move(gram));
  }

  const FiniteAbelianGroup& group() const { return group_; }
  const std::vector<std::vector<QmodZ>>& gram() const { return gram_; }

  QmodZ value(const AbElement& a, const AbElement& b) const {
    if (a.group() != group_ || b.group() != group_)
      throw GroupMismatchError("TorsionPairing::value: element from a different group");
    QmodZ v;
    for (int i = 0; i < group_.num_generators(); ++i) {
      if (a.coords()[i] == 0) continue;
      for (int j = 0; j < group_.num_generators(); ++j)
        if (b.coords()[j] != 0) v = v + gram_[i][j] * (a.coords()[i] * b.coords()[j]);
    }
    return v;
  }

  TorsionPairing negated() const {
    auto g = gram_;
    for (auto& row : g)
      for (auto& x : row) x = -x;
    return from_gram(group_, std::move(g));
  }

  /// Exponent of the subgroup of Q/Z generated by all pairing values
  /// (bilinearity reduces this to the Gram entries).
  Int values_exponent() const {
    Int e = 1;
    for (const auto& row : gram_)
      for (const auto& x : row) e = lcm_int(e, x.order());
    return e;
  }

  bool operator==(const TorsionPairing& o) const {
    return group_ == o.group_ && gram_ == o.gram_;
  }

 private:
  FiniteAbelianGroup group_;
  std::vector<std::vector<QmodZ>> gram_;
};

/// Block sum, renormalized to invariant-factor form with the Gram matrix
/// transported along the normalization.
inline TorsionPairing orthogonal_sum(const TorsionPairing& p1, const TorsionPairing& p2) {
  std::vector<Int> ds = p1.group().factors();
  ds.insert(ds.end(), p2.group().factors().begin(), p2.group().factors().end());
  const int k1 = p1.group().num_generators();
  const int m = static_cast<int>(ds.size());
  auto block = [&](int a, int b) -> QmodZ {
    bool a1 = a < k1, b1 = b < k1;
    if (a1 != b1) return QmodZ();
    return a1 ? p1.gram()[a][b] : p2.gram()[a - k1][b - k1];
  };
  FactorNormalization n = normalize_factors(ds);
  const int k = n.group.num_generators();
  std::vector<std::vector<QmodZ>> gram(k, std::vector<QmodZ>(k));
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      QmodZ v;
      std::vector<Int> li = n.new_gens_in_old.col_vector(i);
      std::vector<Int> lj = n.new_gens_in_old.col_vector(j);
      for (int a = 0; a < m; ++a) {
        if (li[a] == 0) continue;
        for (int b = 0; b < m; ++b)
          if (lj[b] != 0) v = v + block(a, b) * (li[a] * lj[b]);
      }
      gram[i][j] = gram[j][i] = v;
    }
  return TorsionPairing::from_gram(n.group, std::move(gram));
}

/// Non-degeneracy: the adjoint a |-> p(a, -) into the character dual is
/// injective. Checked on a scaled integer Gram: with gram = N / D entrywise,
/// the adjoint kernel is {a : N^T a = 0 mod D} / diag(d) Z^k, so the pairing is
/// non-degenerate iff that solution lattice equals diag(d) Z^k.
inline bool is_nondegenerate(const TorsionPairing& p) {
  const int k = p.group().num_generators();
  if (k == 0) return true;
  Int d_common = 1;
  for (const auto& row : p.gram())
    for (const auto& x : row) d_common = lcm_int(d_common, x.order());
  IntMatrix nt(k, 2 * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const Rat& v = p.gram()[i][j].value();
      Int scaled = rat_num(v) * (d_common / rat_den(v));
      if (scaled != 0) nt.set(j, i, scaled);  // row j: condition on p(a, e_j)
    }
  for (int j = 0; j < k; ++j) nt.set(j, k + j, d_common);
  IntMatrix ker = kernel_basis(nt);
  for (int c = 0; c < ker.cols(); ++c)
    for (int i = 0; i < k; ++i)
      if (mod_floor(ker.at(i, c), p.group().factors()[i]) != 0) return false;
  return true;
}

/// Isomorphism-test result with the quick invariants that were compared.
struct PairingIsoReport {
  bool isomorphic = false;
  std::optional<AbHom> witness;  // carries the first pairing to the second
  std::vector<std::tuple<std::string, std::string, std::string>> invariants_compared;
};

namespace detail {

inline std::string factors_str(const FiniteAbelianGroup& g) {
  std::string s = "[";
  for (std::size_t i = 0; i < g.factors().size(); ++i) {
    if (i) s += ",";
    s += g.factors()[i].str();
  }
  return s + "]";
}

inline std::string self_pairing_multiset(const TorsionPairing& p) {
  std::vector<std::string> vals;
  for (const auto& e : all_elements(p.group()))
    vals.push_back(p.value(e, e).str());
  std::sort(vals.begin(), vals.end());
  std::string s = "{";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) s += ",";
    s += vals[i];
  }
  return s + "}";
}

inline bool carries(const TorsionPairing& p1, const TorsionPairing& p2, const AbHom& phi) {
  const int k = p1.group().num_generators();
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      AbElement a = phi.apply(AbElement::generator(p1.group(), i));
      AbElement b = phi.apply(AbElement::generator(p1.group(), j));
      if (p2.value(a, b) != p1.gram()[i][j]) return false;
    }
  return true;
}

}  // namespace detail

/// Brute-force isomorphism testing over Aut(G) with invariant prefiltering.
inline PairingIsoReport are_isomorphic(const TorsionPairing& p1, const TorsionPairing& p2,
                                       const Int& bound = 256) {
  PairingIsoReport rep;
  rep.invariants_compared.emplace_back("group", detail::factors_str(p1.group()),
                                       detail::factors_str(p2.group()));
  if (p1.group() != p2.group()) return rep;
  rep.invariants_compared.emplace_back("self_pairing_multiset",
                                       detail::self_pairing_multiset(p1),
                                       detail::self_pairing_multiset(p2));
  if (std::get<1>(rep.invariants_compared.back()) != std::get<2>(rep.invariants_compared.back()))
    return rep;
  AbHom id = AbHom::identity(p1.group());
  if (detail::carries(p1, p2, id)) {
    rep.isomorphic = true;
    rep.witness = id;
    return rep;
  }
  for (const AbHom& phi : automorphisms(p1.group(), bound)) {
    if (detail::carries(p1, p2, phi)) {
      rep.isomorphic = true;
      rep.witness = phi;
      return rep;
    }
  }
  return rep;
}

/// Produces b with ord(p(a,b)) = ord(a), following the prime-part construction:
/// per prime pick a partner realizing the full p-valuation, rescale to exactly
/// the prime power, and add up (pairwise coprime orders multiply).
inline AbElement order_realization_witness(const TorsionPairing& p, const AbElement& a,
                                           const Int& bound = 4096) {
  if (a.group() != p.group())
    throw GroupMismatchError("order_realization_witness: element from a different group");
  if (a.is_zero()) throw Error("order_realization_witness: a must be nonzero");
  if (!is_nondegenerate(p))
    throw DegeneratePairingError("order_realization_witness: pairing is degenerate");
  const Int n = a.order();
  std::vector<AbElement> elems = all_elements(p.group(), bound);
  AbElement b = AbElement::zero(p.group());
  for (const auto& [q, e] : factorize(n)) {
    Int target = 1;
    for (int i = 0; i < e; ++i) target *= q;
    AbElement best = AbElement::zero(p.group());
    Int best_pp = 1;
    for (const auto& cand : elems) {
      Int pp = p_part(p.value(a, cand).order(), q);
      if (pp > best_pp) {
        best_pp = pp;
        best = cand;
      }
      if (best_pp == target) break;
    }
    if (best_pp != target)
      throw Error("order_realization_witness: no partner realizes the " + q.str() +
                  "-part; this contradicts non-degeneracy");
    Int ord_v = p.value(a, best).order();
    best = best * (ord_v / best_pp);  // now ord(p(a, best)) = q^e exactly
    b = b + best;
  }
  if (p.value(a, b).order() != n)
    throw Error("order_realization_witness: assembled witness has wrong order");
  return b;
}

/// Seed-deterministic non-degenerate pairing, by rejection sampling.
inline TorsionPairing random_nondegenerate(const FiniteAbelianGroup& g, std::uint64_t seed,
                                           const Int& bound = 256) {
  if (g.order() > bound)
    throw BoundExceededError("random_nondegenerate: group order exceeds bound");
  std::mt19937_64 rng(seed);
  const int k = g.num_generators();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::vector<QmodZ>> gram(k, std::vector<QmodZ>(k));
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) {
        Int den = gcd_int(g.factors()[i], g.factors()[j]);
        Int num = Int(rng() % static_cast<std::uint64_t>(to_long_checked(den, "factor")));
        gram[i][j] = gram[j][i] = QmodZ(num, den);
      }
    TorsionPairing p = TorsionPairing::from_gram(g, std::move(gram));
    if (is_nondegenerate(p)) return p;
  }
  throw GenerationFailureError("random_nondegenerate: exhausted attempts");
}

}  // namespace m3link
