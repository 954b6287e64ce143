#pragma once

#include <string>
#include <vector>

#include "m3link/abgrp.hpp"
#include "m3link/errors.hpp"

namespace m3link {

/// Finitely presented group: generator names plus relator words. Words are
/// sequences of signed generator numbers (+(i+1) for g_i, -(i+1) for its
/// inverse), kept freely reduced.
class FpGroup {
 public:
  FpGroup() = default;
  FpGroup(std::vector<std::string> gens, std::vector<std::vector<int>> relators)
      : gens_(std::move(gens)) {
    for (auto& w : relators) relators_.push_back(reduce(w));
    for (const auto& w : relators_)
      for (int s : w) {
        int idx = s > 0 ? s - 1 : -s - 1;
        if (s == 0 || idx >= static_cast<int>(gens_.size()))
          throw Error("FpGroup: relator uses an undeclared generator");
      }
  }

  static std::vector<int> reduce(const std::vector<int>& w) {
    std::vector<int> out;
    for (int s : w) {
      if (!out.empty() && out.back() == -s) out.pop_back();
      else out.push_back(s);
    }
    return out;
  }

  /// x^n as a relator word for generator index i.
  static std::vector<int> power_word(int i, long n) {
    std::vector<int> w;
    int s = n >= 0 ? i + 1 : -(i + 1);
    for (long k = 0; k < (n >= 0 ? n : -n); ++k) w.push_back(s);
    return w;
  }

  const std::vector<std::string>& generators() const { return gens_; }
  const std::vector<std::vector<int>>& relators() const { return relators_; }

  /// Exponent-sum matrix: one column per relator.
  IntMatrix exponent_sum_matrix() const {
    IntMatrix m(static_cast<int>(gens_.size()), static_cast<int>(relators_.size()));
    for (int j = 0; j < static_cast<int>(relators_.size()); ++j)
      for (int s : relators_[j]) {
        int i = s > 0 ? s - 1 : -s - 1;
        m.add_to(i, j, s > 0 ? 1 : -1);
      }
    return m;
  }

  bool operator==(const FpGroup& o) const {
    return gens_ == o.gens_ && relators_ == o.relators_;
  }

 private:
  std::vector<std::string> gens_;
  std::vector<std::vector<int>> relators_;
};

/// Free product: disjoint generators, relators side by side. Names of the
/// second factor are suffixed when they collide.
inline FpGroup free_product(const FpGroup& a, const FpGroup& b) {
  std::vector<std::string> gens = a.generators();
  for (const auto& g : b.generators()) {
    std::string name = g;
    while (std::find(gens.begin(), gens.end(), name) != gens.end()) name += "'";
    gens.push_back(name);
  }
  std::vector<std::vector<int>> rels = a.relators();
  int shift = static_cast<int>(a.generators().size());
  for (const auto& w : b.relators()) {
    std::vector<int> shifted;
    for (int s : w) shifted.push_back(s > 0 ? s + shift : s - shift);
    rels.push_back(shifted);
  }
  return FpGroup(std::move(gens), std::move(rels));
}

/// Abelianization as (torsion group, free rank): the cokernel of the
/// exponent-sum matrix.
inline std::pair<FiniteAbelianGroup, int> abelianization(const FpGroup& g) {
  CokernelGroup ck = from_cokernel(g.exponent_sum_matrix());
  return {ck.group, ck.free_rank};
}

}  // namespace m3link
