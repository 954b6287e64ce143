#pragma once

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "m3link/errors.hpp"
#include "m3link/numeric.hpp"

namespace m3link {

/// Exact integer matrix. Matrices with fewer than kDenseLimit cells are stored
/// dense; larger ones as coordinate-sorted triplets (bar-resolution coboundaries
/// have at most a handful of nonzeros per column, so triplets stay small).
class IntMatrix {
 public:
  static constexpr std::size_t kDenseLimit = 10000;

  IntMatrix() : rows_(0), cols_(0), dense_(true) {}

  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw DimensionError("IntMatrix: negative shape");
    dense_ = cells() < kDenseLimit;
    if (dense_) data_.assign(cells(), Int(0));
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  static IntMatrix diagonal(const std::vector<Int>& d) {
    IntMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int i = 0; i < static_cast<int>(d.size()); ++i) m.set(i, i, d[i]);
    return m;
  }

  static IntMatrix column(const std::vector<Int>& v) {
    IntMatrix m(static_cast<int>(v.size()), 1);
    for (int i = 0; i < static_cast<int>(v.size()); ++i) m.set(i, 0, v[i]);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t cells() const {
    return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  }
  bool is_dense() const { return dense_; }

  Int at(int i, int j) const {
    check_bounds(i, j);
    if (dense_) return data_[idx(i, j)];
    auto it = find_triplet(i, j);
    if (it != triplets_.end() && std::get<0>(*it) == i && std::get<1>(*it) == j)
      return std::get<2>(*it);
    return Int(0);
  }

  void set(int i, int j, Int v) {
    check_bounds(i, j);
    if (dense_) {
      data_[idx(i, j)] = std::move(v);
      return;
    }
    auto it = find_triplet(i, j);
    bool present = it != triplets_.end() && std::get<0>(*it) == i && std::get<1>(*it) == j;
    if (v == 0) {
      if (present) triplets_.erase(it);
    } else if (present) {
      std::get<2>(*it) = std::move(v);
    } else {
      triplets_.insert(it, {i, j, std::move(v)});
    }
  }

  void add_to(int i, int j, const Int& v) {
    if (v == 0) return;
    set(i, j, at(i, j) + v);
  }

  /// Visits every nonzero entry in row-major order.
  template <typename F>
  void for_each_nonzero(F&& f) const {
    if (dense_) {
      for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
          if (data_[idx(i, j)] != 0) f(i, j, data_[idx(i, j)]);
    } else {
      for (const auto& [i, j, v] : triplets_) f(i, j, v);
    }
  }

  std::size_t nonzero_count() const {
    std::size_t n = 0;
    for_each_nonzero([&](int, int, const Int&) { ++n; });
    return n;
  }

  bool is_zero() const { return nonzero_count() == 0; }

  bool operator==(const IntMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    // Representations may differ; compare via sorted nonzero streams.
    std::vector<std::tuple<int, int, Int>> a, b;
    for_each_nonzero([&](int i, int j, const Int& v) { a.emplace_back(i, j, v); });
    o.for_each_nonzero([&](int i, int j, const Int& v) { b.emplace_back(i, j, v); });
    return a == b;
  }
  bool operator!=(const IntMatrix& o) const { return !(*this == o); }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for_each_nonzero([&](int i, int j, const Int& v) { t.set(j, i, v); });
    return t;
  }

  IntMatrix operator-() const {
    IntMatrix t(rows_, cols_);
    for_each_nonzero([&](int i, int j, const Int& v) { t.set(i, j, -v); });
    return t;
  }

  IntMatrix operator+(const IntMatrix& o) const {
    require_same_shape(o);
    IntMatrix t = *this;
    o.for_each_nonzero([&](int i, int j, const Int& v) { t.add_to(i, j, v); });
    return t;
  }

  IntMatrix operator-(const IntMatrix& o) const {
    require_same_shape(o);
    IntMatrix t = *this;
    o.for_each_nonzero([&](int i, int j, const Int& v) { t.add_to(i, j, -v); });
    return t;
  }

  IntMatrix operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_)
      throw DimensionError("IntMatrix multiply: inner dimensions differ");
    // Accumulate sparsely: group the right factor by row first.
    std::vector<std::vector<std::pair<int, Int>>> rhs_rows(o.rows_);
    o.for_each_nonzero([&](int i, int j, const Int& v) { rhs_rows[i].emplace_back(j, v); });
    std::map<std::pair<int, int>, Int> acc;
    for_each_nonzero([&](int i, int k, const Int& v) {
      for (const auto& [j, w] : rhs_rows[k]) acc[{i, j}] += v * w;
    });
    IntMatrix t(rows_, o.cols_);
    for (const auto& [ij, v] : acc)
      if (v != 0) t.set(ij.first, ij.second, v);
    return t;
  }

  std::vector<Int> apply(const std::vector<Int>& x) const {
    if (static_cast<int>(x.size()) != cols_)
      throw DimensionError("IntMatrix apply: size mismatch");
    std::vector<Int> y(rows_, Int(0));
    for_each_nonzero([&](int i, int j, const Int& v) { y[i] += v * x[j]; });
    return y;
  }

  std::vector<Int> row_vector(int i) const {
    std::vector<Int> r(cols_, Int(0));
    for (int j = 0; j < cols_; ++j) r[j] = at(i, j);
    return r;
  }

  std::vector<Int> col_vector(int j) const {
    std::vector<Int> c(rows_, Int(0));
    for (int i = 0; i < rows_; ++i) c[i] = at(i, j);
    return c;
  }

  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    bool sym = true;
    for_each_nonzero([&](int i, int j, const Int& v) {
      if (at(j, i) != v) sym = false;
    });
    return sym;
  }

 private:
  void check_bounds(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
      throw DimensionError("IntMatrix: index out of bounds");
  }
  void require_same_shape(const IntMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionError("IntMatrix: shape mismatch");
  }
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * cols_ + j;
  }
  using Triplet = std::tuple<int, int, Int>;
  std::vector<Triplet>::iterator find_triplet(int i, int j) {
    return std::lower_bound(triplets_.begin(), triplets_.end(), std::make_pair(i, j),
                            [](const Triplet& t, const std::pair<int, int>& k) {
                              return std::make_pair(std::get<0>(t), std::get<1>(t)) < k;
                            });
  }
  std::vector<Triplet>::const_iterator find_triplet(int i, int j) const {
    return std::lower_bound(triplets_.begin(), triplets_.end(), std::make_pair(i, j),
                            [](const Triplet& t, const std::pair<int, int>& k) {
                              return std::make_pair(std::get<0>(t), std::get<1>(t)) < k;
                            });
  }

  int rows_, cols_;
  bool dense_;
  std::vector<Int> data_;        // dense storage
  std::vector<Triplet> triplets_;  // sparse storage, (row, col) sorted
};

/// Exact rational matrix (dense; used for inverses and Q-coefficient lifts).
/// cpp_rational keeps entries reduced with positive denominator.
class RatMatrix {
 public:
  RatMatrix() : rows_(0), cols_(0) {}
  RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {
    if (rows < 0 || cols < 0) throw DimensionError("RatMatrix: negative shape");
  }

  static RatMatrix identity(int n) {
    RatMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static RatMatrix from_int(const IntMatrix& a) {
    RatMatrix m(a.rows(), a.cols());
    a.for_each_nonzero([&](int i, int j, const Int& v) { m.at(i, j) = Rat(v); });
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rat& at(int i, int j) { return data_[idx(i, j)]; }
  const Rat& at(int i, int j) const { return data_[idx(i, j)]; }

  bool operator==(const RatMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  RatMatrix operator*(const RatMatrix& o) const {
    if (cols_ != o.rows_) throw DimensionError("RatMatrix multiply: inner dimensions differ");
    RatMatrix t(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        if (at(i, k) == 0) continue;
        for (int j = 0; j < o.cols_; ++j)
          if (o.at(k, j) != 0) t.at(i, j) += at(i, k) * o.at(k, j);
      }
    return t;
  }

  std::vector<Rat> apply(const std::vector<Rat>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw DimensionError("RatMatrix apply: size mismatch");
    std::vector<Rat> y(rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (at(i, j) != 0 && x[j] != 0) y[i] += at(i, j) * x[j];
    return y;
  }

  bool is_integral() const {
    for (const auto& v : data_)
      if (rat_den(v) != 1) return false;
    return true;
  }

  IntMatrix to_int() const {
    if (!is_integral()) throw Error("RatMatrix::to_int: non-integer entry");
    IntMatrix m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (at(i, j) != 0) m.set(i, j, rat_num(at(i, j)));
    return m;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * cols_ + j;
  }
  int rows_, cols_;
  std::vector<Rat> data_;
};

}  // namespace m3link
