#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "m3link/errors.hpp"
#include "m3link/snf.hpp"

namespace m3link {

/// Exact rational residue mod 1, kept reduced in [0, 1).
/// The order of a/b (reduced) in Q/Z is b.
class QmodZ {
 public:
  QmodZ() : v_(0) {}
  explicit QmodZ(const Rat& r) : v_(rat_frac(r)) {}
  QmodZ(const Int& num, const Int& den) : v_(rat_frac(make_rat(num, den))) {}

  const Rat& value() const { return v_; }
  bool is_zero() const { return v_ == 0; }
  Int order() const { return rat_den(v_); }

  QmodZ operator+(const QmodZ& o) const { return QmodZ(v_ + o.v_); }
  QmodZ operator-(const QmodZ& o) const { return QmodZ(v_ - o.v_); }
  QmodZ operator-() const { return QmodZ(-v_); }
  QmodZ operator*(const Int& n) const { return QmodZ(v_ * Rat(n)); }

  bool operator==(const QmodZ& o) const { return v_ == o.v_; }
  bool operator!=(const QmodZ& o) const { return v_ != o.v_; }
  bool operator<(const QmodZ& o) const { return v_ < o.v_; }

  std::string str() const {
    if (rat_den(v_) == 1) return rat_num(v_).str();
    return rat_num(v_).str() + "/" + rat_den(v_).str();
  }

 private:
  Rat v_;
};

/// Finite abelian group in invariant-factor form: factors d_1 | d_2 | ...,
/// every d_i >= 2. The empty list is the trivial group.
class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() = default;
  explicit FiniteAbelianGroup(std::vector<Int> factors) : factors_(std::move(factors)) {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (factors_[i] < 2) throw Error("FiniteAbelianGroup: factor < 2");
      if (i + 1 < factors_.size() && factors_[i + 1] % factors_[i] != 0)
        throw Error("FiniteAbelianGroup: divisibility chain violated");
    }
  }

  const std::vector<Int>& factors() const { return factors_; }
  int num_generators() const { return static_cast<int>(factors_.size()); }
  bool is_trivial() const { return factors_.empty(); }
  bool is_cyclic() const { return factors_.size() <= 1; }

  Int order() const {
    Int n = 1;
    for (const auto& d : factors_) n *= d;
    return n;
  }

  /// Largest invariant factor; 1 for the trivial group.
  Int exponent() const { return factors_.empty() ? Int(1) : factors_.back(); }

  bool operator==(const FiniteAbelianGroup& o) const { return factors_ == o.factors_; }
  bool operator!=(const FiniteAbelianGroup& o) const { return factors_ != o.factors_; }

 private:
  std::vector<Int> factors_;
};

/// Element of a FiniteAbelianGroup, coordinates reduced mod the factors.
class AbElement {
 public:
  AbElement() = default;
  AbElement(FiniteAbelianGroup g, std::vector<Int> coords)
      : group_(std::move(g)), coords_(std::move(coords)) {
    if (coords_.size() != static_cast<std::size_t>(group_.num_generators()))
      throw DimensionError("AbElement: coordinate count mismatch");
    reduce();
  }

  static AbElement zero(const FiniteAbelianGroup& g) {
    return AbElement(g, std::vector<Int>(g.num_generators(), Int(0)));
  }
  static AbElement generator(const FiniteAbelianGroup& g, int i) {
    std::vector<Int> c(g.num_generators(), Int(0));
    c.at(i) = 1;
    return AbElement(g, std::move(c));
  }

  const FiniteAbelianGroup& group() const { return group_; }
  const std::vector<Int>& coords() const { return coords_; }

  bool is_zero() const {
    for (const auto& c : coords_)
      if (c != 0) return false;
    return true;
  }

  AbElement operator+(const AbElement& o) const {
    require_same_group(o);
    std::vector<Int> c(coords_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coords_[i];
    return AbElement(group_, std::move(c));
  }

  AbElement operator-(const AbElement& o) const {
    require_same_group(o);
    std::vector<Int> c(coords_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.coords_[i];
    return AbElement(group_, std::move(c));
  }

  AbElement operator*(const Int& n) const {
    std::vector<Int> c(coords_);
    for (auto& x : c) x *= n;
    return AbElement(group_, std::move(c));
  }

  bool operator==(const AbElement& o) const {
    return group_ == o.group_ && coords_ == o.coords_;
  }
  bool operator!=(const AbElement& o) const { return !(*this == o); }
  bool operator<(const AbElement& o) const { return coords_ < o.coords_; }

  /// Least n >= 1 with n * g = 0: lcm over coordinates of d_i / gcd(d_i, c_i).
  Int order() const {
    Int n = 1;
    const auto& d = group_.factors();
    for (std::size_t i = 0; i < coords_.size(); ++i)
      n = lcm_int(n, d[i] / gcd_int(d[i], coords_[i]));
    return n;
  }

 private:
  void reduce() {
    const auto& d = group_.factors();
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] = mod_floor(coords_[i], d[i]);
  }
  void require_same_group(const AbElement& o) const {
    if (group_ != o.group_) throw GroupMismatchError("AbElement: group mismatch");
  }

  FiniteAbelianGroup group_;
  std::vector<Int> coords_;
};

/// Homomorphism between finite abelian groups, stored as the images of the
/// source generators (target coordinates in the columns).
class AbHom {
 public:
  AbHom() = default;
  AbHom(FiniteAbelianGroup source, FiniteAbelianGroup target, IntMatrix matrix)
      : source_(std::move(source)), target_(std::move(target)), m_(std::move(matrix)) {
    if (m_.rows() != target_.num_generators() || m_.cols() != source_.num_generators())
      throw DimensionError("AbHom: matrix shape mismatch");
    if (!is_well_defined())
      throw Error("AbHom: generator image order does not divide generator order");
  }

  static AbHom identity(const FiniteAbelianGroup& g) {
    return AbHom(g, g, IntMatrix::identity(g.num_generators()));
  }

  const FiniteAbelianGroup& source() const { return source_; }
  const FiniteAbelianGroup& target() const { return target_; }
  const IntMatrix& matrix() const { return m_; }

  AbElement apply(const AbElement& x) const {
    if (x.group() != source_) throw GroupMismatchError("AbHom::apply: wrong source group");
    return AbElement(target_, m_.apply(x.coords()));
  }

  AbHom compose_after(const AbHom& first) const {  // this o first
    if (first.target() != source_) throw GroupMismatchError("AbHom compose: chain mismatch");
    return AbHom(first.source(), target_, m_ * first.matrix());
  }

  /// Surjective == bijective for maps between groups of equal finite order;
  /// surjectivity holds iff [M | diag(target factors)] has trivial cokernel.
  bool is_invertible() const {
    if (source_.order() != target_.order()) return false;
    int k = target_.num_generators();
    IntMatrix aug(k, m_.cols() + k);
    m_.for_each_nonzero([&](int i, int j, const Int& v) { aug.set(i, j, v); });
    for (int i = 0; i < k; ++i) aug.set(i, m_.cols() + i, target_.factors()[i]);
    return cokernel_presentation(aug).factors.empty();
  }

  bool operator==(const AbHom& o) const {
    return source_ == o.source_ && target_ == o.target_ && reduced_matrix() == o.reduced_matrix();
  }

  IntMatrix reduced_matrix() const {
    IntMatrix r(m_.rows(), m_.cols());
    m_.for_each_nonzero([&](int i, int j, const Int& v) {
      r.set(i, j, mod_floor(v, target_.factors()[i]));
    });
    return r;
  }

 private:
  bool is_well_defined() const {
    // d_j * (image of generator j) must vanish in the target
    for (int j = 0; j < source_.num_generators(); ++j) {
      const Int& dj = source_.factors()[j];
      for (int i = 0; i < target_.num_generators(); ++i)
        if (mod_floor(dj * m_.at(i, j), target_.factors()[i]) != 0) return false;
    }
    return true;
  }

  FiniteAbelianGroup source_, target_;
  IntMatrix m_;
};

/// Cokernel of an integer matrix as a group object: torsion part in
/// invariant-factor form, free rank reported separately, plus the projection
/// from the ambient lattice and lifts of the torsion generators.
struct CokernelGroup {
  FiniteAbelianGroup group;
  int free_rank = 0;
  CokernelPresentation pres;

  AbElement project(const std::vector<Int>& ambient) const {
    return AbElement(group, pres.project_torsion(ambient));
  }
  std::vector<Int> lift_generator(int i) const { return pres.gen_lifts.col_vector(i); }
};

inline CokernelGroup from_cokernel(const IntMatrix& a) {
  CokernelGroup out;
  out.pres = cokernel_presentation(a);
  out.group = FiniteAbelianGroup(out.pres.factors);
  out.free_rank = out.pres.free_rank;
  return out;
}

/// Change of presentation: the abstract group ⊕ Z/d_i for an arbitrary factor
/// list (no chain condition), renormalized to invariant-factor form. old_to_new
/// maps old coordinates to canonical ones; new_gens_in_old lifts canonical
/// generators to old coordinates.
struct FactorNormalization {
  FiniteAbelianGroup group;
  IntMatrix old_to_new;      // k_new x k_old (apply then reduce)
  IntMatrix new_gens_in_old; // k_old x k_new
};

inline FactorNormalization normalize_factors(const std::vector<Int>& ds) {
  for (const auto& d : ds)
    if (d < 1) throw Error("normalize_factors: factor < 1");
  CokernelGroup ck = from_cokernel(IntMatrix::diagonal(ds));
  FactorNormalization out;
  out.group = ck.group;
  out.old_to_new = ck.pres.proj_factor;
  out.new_gens_in_old = ck.pres.gen_lifts;
  return out;
}

/// All elements, in odometer order. Guarded by the enumeration bound.
inline std::vector<AbElement> all_elements(const FiniteAbelianGroup& g, const Int& bound = 4096) {
  if (g.order() > bound) throw BoundExceededError("all_elements: group order exceeds bound");
  std::vector<AbElement> out;
  std::vector<Int> c(g.num_generators(), Int(0));
  for (;;) {
    out.emplace_back(g, c);
    int i = g.num_generators() - 1;
    while (i >= 0) {
      if (++c[i] < g.factors()[i]) break;
      c[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

/// Character G -> Q/Z determined by generator images c_i / d_i.
class Character {
 public:
  Character() = default;
  Character(FiniteAbelianGroup g, std::vector<QmodZ> images)
      : group_(std::move(g)), images_(std::move(images)) {
    if (images_.size() != static_cast<std::size_t>(group_.num_generators()))
      throw DimensionError("Character: image count mismatch");
    for (int i = 0; i < group_.num_generators(); ++i)
      if (!(images_[i] * group_.factors()[i]).is_zero())
        throw Error("Character: image order does not divide generator order");
  }

  const FiniteAbelianGroup& group() const { return group_; }
  const std::vector<QmodZ>& images() const { return images_; }

  QmodZ apply(const AbElement& x) const {
    if (x.group() != group_) throw GroupMismatchError("Character::apply: wrong group");
    QmodZ v;
    for (std::size_t i = 0; i < images_.size(); ++i) v = v + images_[i] * x.coords()[i];
    return v;
  }

  bool is_zero() const {
    for (const auto& v : images_)
      if (!v.is_zero()) return false;
    return true;
  }

  bool operator==(const Character& o) const {
    return group_ == o.group_ && images_ == o.images_;
  }

 private:
  FiniteAbelianGroup group_;
  std::vector<QmodZ> images_;
};

/// All |G| characters, generator i running over c_i/d_i.
inline std::vector<Character> dual_characters(const FiniteAbelianGroup& g,
                                              const Int& bound = 256) {
  if (g.order() > bound) throw BoundExceededError("dual_characters: group order exceeds bound");
  std::vector<Character> out;
  int k = g.num_generators();
  std::vector<Int> c(k, Int(0));
  for (;;) {
    std::vector<QmodZ> imgs;
    imgs.reserve(k);
    for (int i = 0; i < k; ++i) imgs.emplace_back(c[i], g.factors()[i]);
    out.emplace_back(g, std::move(imgs));
    int i = k - 1;
    while (i >= 0) {
      if (++c[i] < g.factors()[i]) break;
      c[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

namespace detail {

/// Odometer over candidate generator images with order-compatibility pruning:
/// the image of a generator of order d must itself have order dividing d.
inline std::vector<std::vector<AbElement>> endomorphism_image_candidates(
    const FiniteAbelianGroup& g) {
  std::vector<std::vector<AbElement>> cands(g.num_generators());
  std::vector<AbElement> elems = all_elements(g);
  for (int i = 0; i < g.num_generators(); ++i) {
    const Int& d = g.factors()[i];
    for (const auto& e : elems)
      if (d % e.order() == 0) cands[i].push_back(e);
  }
  return cands;
}

}  // namespace detail

/// Lazily enumerates Aut(G), each automorphism exactly once. Re-creatable and
/// independent of any other iterator instance.
class AutomorphismRange {
 public:
  explicit AutomorphismRange(FiniteAbelianGroup g, const Int& bound = 256) : group_(std::move(g)) {
    if (group_.order() > bound)
      throw BoundExceededError("automorphisms: group order exceeds bound");
    cands_ = detail::endomorphism_image_candidates(group_);
  }

  class iterator {
   public:
    using value_type = AbHom;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const AutomorphismRange* r, bool at_end) : r_(r) {
      if (at_end || r_->group_.num_generators() == 0) {
        // the trivial group has exactly one automorphism
        if (!at_end && r_->group_.num_generators() == 0) {
          current_ = AbHom::identity(r_->group_);
          done_ = false;
          trivial_pending_ = true;
          return;
        }
        done_ = true;
        return;
      }
      idx_.assign(r_->group_.num_generators(), 0);
      done_ = false;
      if (!load_current()) advance();
    }

    const AbHom& operator*() const { return current_; }
    const AbHom* operator->() const { return &current_; }

    iterator& operator++() {
      if (trivial_pending_) {
        trivial_pending_ = false;
        done_ = true;
        return *this;
      }
      advance();
      return *this;
    }
    iterator operator++(int) {
      iterator t = *this;
      ++(*this);
      return t;
    }

    bool operator==(const iterator& o) const { return done_ == o.done_ && (done_ || idx_ == o.idx_); }
    bool operator!=(const iterator& o) const { return !(*this == o); }

   private:
    bool load_current() {
      int k = r_->group_.num_generators();
      IntMatrix m(k, k);
      for (int j = 0; j < k; ++j) {
        const AbElement& img = r_->cands_[j][idx_[j]];
        for (int i = 0; i < k; ++i)
          if (img.coords()[i] != 0) m.set(i, j, img.coords()[i]);
      }
      AbHom h(r_->group_, r_->group_, std::move(m));
      if (!h.is_invertible()) return false;
      current_ = std::move(h);
      return true;
    }

    void advance() {
      int k = r_->group_.num_generators();
      for (;;) {
        int j = k - 1;
        while (j >= 0) {
          if (++idx_[j] < r_->cands_[j].size()) break;
          idx_[j] = 0;
          --j;
        }
        if (j < 0) {
          done_ = true;
          return;
        }
        if (load_current()) return;
      }
    }

    const AutomorphismRange* r_ = nullptr;
    std::vector<std::size_t> idx_;
    AbHom current_;
    bool done_ = true;
    bool trivial_pending_ = false;
  };

  iterator begin() const { return iterator(this, false); }
  iterator end() const { return iterator(this, true); }

 private:
  friend class iterator;
  FiniteAbelianGroup group_;
  std::vector<std::vector<AbElement>> cands_;
};

inline AutomorphismRange automorphisms(const FiniteAbelianGroup& g, const Int& bound = 256) {
  return AutomorphismRange(g, bound);
}

}  // namespace m3link
