#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "m3link/errors.hpp"
#include "m3link/finitegroup.hpp"
#include "m3link/intmatrix.hpp"

namespace m3link {

/// Formal integer combination of group elements, sparse and sorted by element.
class GroupRingElement {
 public:
  GroupRingElement() = default;

  static GroupRingElement of(int elem, Int coeff = Int(1)) {
    GroupRingElement e;
    if (coeff != 0) e.terms_.emplace_back(elem, std::move(coeff));
    return e;
  }

  /// 1 + g + g^2 + ... over a whole cyclic run, or any explicit list.
  static GroupRingElement from_terms(std::vector<std::pair<int, Int>> terms) {
    std::map<int, Int> acc;
    for (auto& [e, c] : terms) acc[e] += c;
    GroupRingElement out;
    for (auto& [e, c] : acc)
      if (c != 0) out.terms_.emplace_back(e, c);
    return out;
  }

  const std::vector<std::pair<int, Int>>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  GroupRingElement operator+(const GroupRingElement& o) const {
    std::vector<std::pair<int, Int>> all = terms_;
    all.insert(all.end(), o.terms_.begin(), o.terms_.end());
    return from_terms(std::move(all));
  }

  GroupRingElement operator-() const {
    GroupRingElement out;
    for (const auto& [e, c] : terms_) out.terms_.emplace_back(e, -c);
    return out;
  }

  GroupRingElement operator-(const GroupRingElement& o) const { return *this + (-o); }

  GroupRingElement scaled(const Int& s) const {
    if (s == 0) return {};
    GroupRingElement out;
    for (const auto& [e, c] : terms_) out.terms_.emplace_back(e, c * s);
    return out;
  }

  GroupRingElement mul(const FiniteGroup& g, const GroupRingElement& o) const {
    std::vector<std::pair<int, Int>> prod;
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) prod.emplace_back(g.mul(e1, e2), c1 * c2);
    return from_terms(std::move(prod));
  }

  GroupRingElement left_translate(const FiniteGroup& g, int elem) const {
    GroupRingElement out;
    std::vector<std::pair<int, Int>> prod;
    for (const auto& [e, c] : terms_) prod.emplace_back(g.mul(elem, e), c);
    return from_terms(std::move(prod));
  }

  Int augmentation() const {
    Int s = 0;
    for (const auto& [e, c] : terms_) s += c;
    return s;
  }

  bool operator==(const GroupRingElement& o) const { return terms_ == o.terms_; }

 private:
  std::vector<std::pair<int, Int>> terms_;
};

inline GroupRingElement norm_element(const FiniteGroup& g) {
  std::vector<std::pair<int, Int>> t;
  for (int e = 0; e < g.size(); ++e) t.emplace_back(e, Int(1));
  return GroupRingElement::from_terms(std::move(t));
}

/// One summand of an element of a free module over the underlying Z-basis:
/// coeff * (elem . basis_generator).
struct Term {
  int basis;
  int elem;
  Int coeff;
};

/// Sparse vector over the underlying Z-basis of a free ZG-module.
class FlatVector {
 public:
  void add(int basis, int elem, const Int& c) {
    if (c == 0) return;
    auto key = std::make_pair(basis, elem);
    auto [it, inserted] = data_.try_emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) data_.erase(it);
    }
  }
  void add_terms(const std::vector<Term>& ts, const Int& scale = Int(1)) {
    for (const auto& t : ts) add(t.basis, t.elem, t.coeff * scale);
  }
  bool is_zero() const { return data_.empty(); }
  std::vector<Term> terms() const {
    std::vector<Term> out;
    for (const auto& [k, c] : data_) out.push_back({k.first, k.second, c});
    return out;
  }
  bool operator==(const FlatVector& o) const { return data_ == o.data_; }

 private:
  std::map<std::pair<int, int>, Int> data_;
};

/// Matrix over the group ring: columns are images of the source generators.
class GroupRingMatrix {
 public:
  GroupRingMatrix() = default;
  GroupRingMatrix(std::shared_ptr<const FiniteGroup> g, int target_rank, int source_rank)
      : group_(std::move(g)), target_(target_rank),
        cols_(static_cast<std::size_t>(source_rank)) {}

  const FiniteGroup& group() const { return *group_; }
  std::shared_ptr<const FiniteGroup> group_ptr() const { return group_; }
  int target_rank() const { return target_; }
  int source_rank() const { return static_cast<int>(cols_.size()); }

  void add_entry(int row, int col, GroupRingElement e) {
    if (e.is_zero()) return;
    for (auto& [r, v] : cols_.at(col))
      if (r == row) {
        v = v + e;
        return;
      }
    cols_.at(col).emplace_back(row, std::move(e));
  }

  const std::vector<std::pair<int, GroupRingElement>>& column(int j) const {
    return cols_.at(j);
  }

  /// Image of the underlying basis vector (col j, elem g), as flat terms.
  std::vector<Term> apply_flat(int j, int g) const {
    std::vector<Term> out;
    for (const auto& [row, e] : cols_.at(j))
      for (const auto& [elem, c] : e.terms())
        out.push_back({row, group_->mul(g, elem), c});
    return out;
  }

  /// Composition matrix of this after rhs, between free left modules: the
  /// rhs coefficient acts first, so entries compose as e_rhs * e_lhs.
  GroupRingMatrix multiply(const GroupRingMatrix& rhs) const {
    if (rhs.target_ != source_rank())
      throw DimensionError("GroupRingMatrix multiply: inner rank mismatch");
    GroupRingMatrix out(group_, target_, rhs.source_rank());
    for (int j = 0; j < rhs.source_rank(); ++j) {
      std::map<int, GroupRingElement> acc;
      for (const auto& [mid, e2] : rhs.cols_[j])
        for (const auto& [row, e1] : cols_.at(mid)) {
          GroupRingElement prod = e2.mul(*group_, e1);
          auto it = acc.find(row);
          if (it == acc.end()) acc.emplace(row, prod);
          else it->second = it->second + prod;
        }
      for (auto& [row, e] : acc)
        if (!e.is_zero()) out.cols_[j].emplace_back(row, std::move(e));
    }
    return out;
  }

  bool is_zero() const {
    for (const auto& col : cols_)
      for (const auto& [row, e] : col)
        if (!e.is_zero()) return false;
    return true;
  }

  /// Entrywise augmentation: the matrix of the induced map after applying
  /// - tensor Z over ZG with the trivial module.
  IntMatrix augmented() const {
    IntMatrix m(target_, source_rank());
    for (int j = 0; j < source_rank(); ++j)
      for (const auto& [row, e] : cols_[j]) m.add_to(row, j, e.augmentation());
    return m;
  }

  /// Underlying integer matrix on flat bases (basis * |G| + elem).
  IntMatrix underlying() const {
    const int n = group_->size();
    IntMatrix m(target_ * n, source_rank() * n);
    for (int j = 0; j < source_rank(); ++j)
      for (int g = 0; g < n; ++g)
        for (const Term& t : apply_flat(j, g))
          m.add_to(t.basis * n + t.elem, j * n + g, t.coeff);
    return m;
  }

 private:
  std::shared_ptr<const FiniteGroup> group_;
  int target_ = 0;
  std::vector<std::vector<std::pair<int, GroupRingElement>>> cols_;
};

}  // namespace m3link
