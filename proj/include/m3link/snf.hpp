#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "m3link/errors.hpp"
#include "m3link/intmatrix.hpp"
#include "m3link/numeric.hpp"

namespace m3link {

namespace detail {

/// Row-major sparse workspace with a column occupancy index, used by the
/// elimination algorithms. Values are kept nonzero.
struct RowWorkspace {
  int rows = 0, cols = 0;
  std::vector<std::map<int, Int>> row;   // row[i]: col -> value
  std::vector<std::set<int>> col_rows;   // col j -> rows with nonzero

  RowWorkspace() = default;
  RowWorkspace(int r, int c) : rows(r), cols(c), row(r), col_rows(c) {}

  static RowWorkspace from(const IntMatrix& m) {
    RowWorkspace w(m.rows(), m.cols());
    m.for_each_nonzero([&](int i, int j, const Int& v) {
      w.row[i][j] = v;
      w.col_rows[j].insert(i);
    });
    return w;
  }

  static RowWorkspace eye(int n) {
    RowWorkspace w(n, n);
    for (int i = 0; i < n; ++i) {
      w.row[i][i] = 1;
      w.col_rows[i].insert(i);
    }
    return w;
  }

  Int get(int i, int j) const {
    auto it = row[i].find(j);
    return it == row[i].end() ? Int(0) : it->second;
  }

  void put(int i, int j, const Int& v) {
    if (v == 0) {
      if (row[i].erase(j)) col_rows[j].erase(i);
    } else {
      auto [it, inserted] = row[i].insert_or_assign(j, v);
      (void)it;
      if (inserted) col_rows[j].insert(i);
    }
  }

  void swap_rows(int a, int b) {
    if (a == b) return;
    for (const auto& [j, v] : row[a]) col_rows[j].erase(a);
    for (const auto& [j, v] : row[b]) col_rows[j].erase(b);
    std::swap(row[a], row[b]);
    for (const auto& [j, v] : row[a]) col_rows[j].insert(a);
    for (const auto& [j, v] : row[b]) col_rows[j].insert(b);
  }

  void swap_cols(int a, int b) {
    if (a == b) return;
    std::set<int> touched = col_rows[a];
    touched.insert(col_rows[b].begin(), col_rows[b].end());
    for (int i : touched) {
      Int va = get(i, a), vb = get(i, b);
      put(i, a, vb);
      put(i, b, va);
    }
  }

  /// [row_a; row_b] <- [[p,q],[r,s]] * [row_a; row_b]
  void rows_2x2(int a, int b, const Int& p, const Int& q, const Int& r, const Int& s) {
    std::map<int, Int> na, nb;
    for (const auto& [j, v] : row[a]) { if (p != 0) na[j] += p * v; if (r != 0) nb[j] += r * v; }
    for (const auto& [j, v] : row[b]) { if (q != 0) na[j] += q * v; if (s != 0) nb[j] += s * v; }
    replace_row(a, std::move(na));
    replace_row(b, std::move(nb));
  }

  /// [col_a, col_b] <- [col_a, col_b] * [[p,r],[q,s]]
  /// i.e. new col_a = p*col_a + q*col_b, new col_b = r*col_a + s*col_b.
  void cols_2x2(int a, int b, const Int& p, const Int& q, const Int& r, const Int& s) {
    std::set<int> touched = col_rows[a];
    touched.insert(col_rows[b].begin(), col_rows[b].end());
    for (int i : touched) {
      Int va = get(i, a), vb = get(i, b);
      put(i, a, p * va + q * vb);
      put(i, b, r * va + s * vb);
    }
  }

  void scale_row(int a, const Int& u) {  // u = +-1
    std::map<int, Int> na;
    for (const auto& [j, v] : row[a]) na[j] = u * v;
    replace_row(a, std::move(na));
  }

  void scale_col(int a, const Int& u) {
    std::vector<int> rows_here(col_rows[a].begin(), col_rows[a].end());
    for (int i : rows_here) put(i, a, u * get(i, a));
  }

  std::size_t row_nnz(int i) const { return row[i].size(); }
  std::size_t col_nnz(int j) const { return col_rows[j].size(); }

  IntMatrix to_matrix() const {
    IntMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (const auto& [j, v] : row[i]) m.set(i, j, v);
    return m;
  }

 private:
  void replace_row(int i, std::map<int, Int>&& nr) {
    for (const auto& [j, v] : row[i]) col_rows[j].erase(i);
    // drop explicit zeros
    for (auto it = nr.begin(); it != nr.end();) {
      if (it->second == 0) it = nr.erase(it); else ++it;
    }
    row[i] = std::move(nr);
    for (const auto& [j, v] : row[i]) col_rows[j].insert(i);
  }
};

}  // namespace detail

/// U * A * V = D with U, V unimodular and D in Smith form: the diagonal is
/// non-negative and each entry divides the next. Uinv/Vinv are maintained
/// alongside so cokernel generators can be lifted without a separate inversion.
struct SmithDecomposition {
  IntMatrix U, D, V;
  IntMatrix Uinv, Vinv;
  std::vector<Int> diagonal;  // all min(rows, cols) entries, zeros included
  int rank = 0;               // number of nonzero diagonal entries
  Int det_u = 1, det_v = 1;   // each +-1

  std::vector<Int> invariant_factors() const {  // entries > 1 only
    std::vector<Int> out;
    for (const auto& d : diagonal)
      if (d > 1) out.push_back(d);
    return out;
  }
};

namespace detail {

struct SnfState {
  RowWorkspace m, u, uinv, v, vinv;
  Int det_u = 1, det_v = 1;
  bool with_transforms = true;

  void rows_transform(int a, int b, const Int& p, const Int& q, const Int& r, const Int& s) {
    // det(T) must be +-1; companions: U <- T U, Uinv <- Uinv T^{-1}
    Int det = p * s - q * r;
    m.rows_2x2(a, b, p, q, r, s);
    if (with_transforms) {
      u.rows_2x2(a, b, p, q, r, s);
      // T^{-1} = (1/det) [[s,-q],[-r,p]]; right-multiplication mixes columns a,b:
      // new col_a = (s*col_a - r*col_b)/det, new col_b = (-q*col_a + p*col_b)/det
      uinv.cols_2x2(a, b, s * det, -r * det, -q * det, p * det);
    }
    if (det == -1) det_u = -det_u;
  }

  void cols_transform(int a, int b, const Int& p, const Int& q, const Int& r, const Int& s) {
    Int det = p * s - q * r;
    // columns: [col_a, col_b] <- [col_a, col_b] * [[p,r],[q,s]]
    m.cols_2x2(a, b, p, q, r, s);
    if (with_transforms) {
      v.cols_2x2(a, b, p, q, r, s);
      // Vinv <- T^{-1} Vinv with the matching convention
      vinv.rows_2x2(a, b, s * det, -r * det, -q * det, p * det);
    }
    if (det == -1) det_v = -det_v;
  }

  void swap_rows(int a, int b) {
    if (a == b) return;
    m.swap_rows(a, b);
    if (with_transforms) { u.swap_rows(a, b); uinv.swap_cols(a, b); }
    det_u = -det_u;
  }

  void swap_cols(int a, int b) {
    if (a == b) return;
    m.swap_cols(a, b);
    if (with_transforms) { v.swap_cols(a, b); vinv.swap_rows(a, b); }
    det_v = -det_v;
  }

  void negate_row(int a) {
    m.scale_row(a, -1);
    if (with_transforms) { u.scale_row(a, -1); uinv.scale_col(a, -1); }
    det_u = -det_u;
  }
};

}  // namespace detail

/// Smith normal form of an arbitrary (possibly empty) integer matrix.
/// Pivoting: minimal absolute value, Markowitz fill-in tiebreak. Deterministic.
/// with_transforms = false skips the companion matrices (diagonal only).
inline SmithDecomposition smith_normal_form(const IntMatrix& a, bool with_transforms = true) {
  detail::SnfState st;
  st.with_transforms = with_transforms;
  st.m = detail::RowWorkspace::from(a);
  if (with_transforms) {
    st.u = detail::RowWorkspace::eye(a.rows());
    st.uinv = detail::RowWorkspace::eye(a.rows());
    st.v = detail::RowWorkspace::eye(a.cols());
    st.vinv = detail::RowWorkspace::eye(a.cols());
  }

  const int n = std::min(a.rows(), a.cols());
  int t = 0;
  while (t < n) {
    // pivot search over the trailing submatrix
    bool found = false;
    int pi = -1, pj = -1;
    Int best_val;
    std::size_t best_fill = 0;
    for (int i = t; i < a.rows(); ++i) {
      for (const auto& [j, v] : st.m.row[i]) {
        if (j < t) continue;
        Int av = abs_int(v);
        std::size_t fill = (st.m.row_nnz(i) - 1) * (st.m.col_nnz(j) - 1);
        if (!found || av < best_val || (av == best_val && fill < best_fill)) {
          found = true; best_val = av; best_fill = fill; pi = i; pj = j;
        }
      }
    }
    if (!found) break;
    st.swap_rows(t, pi);
    st.swap_cols(t, pj);

    for (;;) {
      // clear column t below the pivot
      bool touched = true;
      while (touched) {
        touched = false;
        std::vector<int> below;
        for (int i : st.m.col_rows[t])
          if (i > t) below.push_back(i);
        for (int i : below) {
          Int b = st.m.get(i, t);
          if (b == 0) continue;
          Int pivot = st.m.get(t, t);
          if (b % pivot == 0) {
            Int q = b / pivot;
            st.rows_transform(t, i, 1, 0, -q, 1);
          } else {
            Int g, s, u;
            egcd(pivot, b, g, s, u);
            st.rows_transform(t, i, s, u, -(b / g), pivot / g);
          }
          touched = true;
        }
        // clear row t right of the pivot
        std::vector<int> right;
        for (const auto& [j, v] : st.m.row[t])
          if (j > t) right.push_back(j);
        for (int j : right) {
          Int b = st.m.get(t, j);
          if (b == 0) continue;
          Int pivot = st.m.get(t, t);
          if (b % pivot == 0) {
            Int q = b / pivot;
            st.cols_transform(t, j, 1, 0, -q, 1);
          } else {
            Int g, s, u;
            egcd(pivot, b, g, s, u);
            st.cols_transform(t, j, s, u, -(b / g), pivot / g);
          }
          touched = true;
        }
      }
      // divisibility fix: pivot must divide the whole trailing block
      Int d = st.m.get(t, t);
      int bad_row = -1;
      for (int i = t + 1; i < a.rows() && bad_row < 0; ++i)
        for (const auto& [j, v] : st.m.row[i]) {
          if (j <= t) continue;
          if (v % d != 0) { bad_row = i; break; }
        }
      if (bad_row < 0) break;
      st.rows_transform(t, bad_row, 1, 1, 0, 1);  // row_t += row_bad
    }
    if (st.m.get(t, t) < 0) st.negate_row(t);
    ++t;
  }

  SmithDecomposition out;
  if (with_transforms) {
    out.U = st.u.to_matrix();
    out.V = st.v.to_matrix();
    out.Uinv = st.uinv.to_matrix();
    out.Vinv = st.vinv.to_matrix();
  }
  out.D = st.m.to_matrix();
  out.det_u = st.det_u;
  out.det_v = st.det_v;
  out.diagonal.resize(n);
  for (int i = 0; i < n; ++i) {
    out.diagonal[i] = out.D.at(i, i);
    if (out.diagonal[i] != 0) ++out.rank;
  }
  return out;
}

/// det(A) for square A, via the Smith form and the transform signs.
inline Int det(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("det: matrix not square");
  SmithDecomposition s = smith_normal_form(a);
  Int d = 1;
  for (const auto& x : s.diagonal) d *= x;
  return d * s.det_u * s.det_v;  // A = Uinv D Vinv, det(Uinv) = det(U)
}

/// Column echelon form A * V = H, pivot rows strictly increasing per pivot
/// column. Supports repeated exact solves against the same matrix.
class ColumnEchelon {
 public:
  explicit ColumnEchelon(const IntMatrix& a) : rows_(a.rows()), cols_(a.cols()) {
    detail::RowWorkspace m = detail::RowWorkspace::from(a);
    detail::RowWorkspace v = detail::RowWorkspace::eye(a.cols());
    int pivot_col = 0;
    for (int r = 0; r < rows_ && pivot_col < cols_; ++r) {
      // gather active columns with a nonzero in row r
      std::vector<int> active;
      for (const auto& [j, val] : m.row[r])
        if (j >= pivot_col) active.push_back(j);
      if (active.empty()) continue;
      // fold all of them into one column holding gcd
      while (active.size() > 1) {
        // pick the two smallest absolute values
        std::sort(active.begin(), active.end(), [&](int x, int y) {
          Int ax = abs_int(m.get(r, x)), ay = abs_int(m.get(r, y));
          if (ax != ay) return ax < ay;
          return x < y;
        });
        int c1 = active[0], c2 = active[1];
        Int x = m.get(r, c1), y = m.get(r, c2);
        if (y % x == 0) {
          Int q = y / x;
          m.cols_2x2(c1, c2, 1, 0, -q, 1);
          v.cols_2x2(c1, c2, 1, 0, -q, 1);
        } else {
          Int g, s, u;
          egcd(x, y, g, s, u);
          m.cols_2x2(c1, c2, s, u, -(y / g), x / g);
          v.cols_2x2(c1, c2, s, u, -(y / g), x / g);
        }
        active.clear();
        for (const auto& [j, val] : m.row[r])
          if (j >= pivot_col) active.push_back(j);
      }
      int c = active[0];
      if (m.get(r, c) < 0) { m.scale_col(c, -1); v.scale_col(c, -1); }
      m.swap_cols(pivot_col, c);
      v.swap_cols(pivot_col, c);
      pivots_.emplace_back(r, pivot_col);
      ++pivot_col;
    }
    rank_ = pivot_col;
    h_ = std::move(m);
    v_ = std::move(v);
  }

  int rank() const { return rank_; }

  /// Solves A x = b over the integers; std::nullopt when no integral solution.
  std::optional<std::vector<Int>> solve(const std::vector<Int>& b) const {
    if (static_cast<int>(b.size()) != rows_)
      throw DimensionError("ColumnEchelon::solve: rhs size mismatch");
    std::vector<Int> y(cols_, Int(0));
    std::map<int, Int> residual;
    for (int i = 0; i < rows_; ++i)
      if (b[i] != 0) residual[i] = b[i];
    std::size_t next_pivot = 0;
    while (!residual.empty()) {
      auto it = residual.begin();
      int r = it->first;
      // skip pivots above the current residual row; their coordinate is 0
      while (next_pivot < pivots_.size() && pivots_[next_pivot].first < r) ++next_pivot;
      if (next_pivot >= pivots_.size() || pivots_[next_pivot].first != r)
        return std::nullopt;  // nonzero residual in a pivot-free row
      int c = pivots_[next_pivot].second;
      Int piv = h_.get(r, c);
      if (it->second % piv != 0) return std::nullopt;
      Int q = it->second / piv;
      y[c] = q;
      for (int i : h_.col_rows[c]) {
        Int nv = (residual.count(i) ? residual[i] : Int(0)) - q * h_.get(i, c);
        if (nv == 0) residual.erase(i); else residual[i] = nv;
      }
      ++next_pivot;
    }
    // x = V y
    std::vector<Int> x(cols_, Int(0));
    for (int i = 0; i < cols_; ++i)
      for (const auto& [j, val] : v_.row[i])
        if (y[j] != 0) x[i] += val * y[j];
    return x;
  }

  /// Basis of the integer kernel of A (columns of the result).
  IntMatrix kernel() const {
    // non-pivot columns of H are zero columns; kernel basis = matching V columns
    std::vector<int> free_cols;
    for (int j = rank_; j < cols_; ++j) free_cols.push_back(j);
    IntMatrix k(cols_, static_cast<int>(free_cols.size()));
    for (int out = 0; out < static_cast<int>(free_cols.size()); ++out) {
      int j = free_cols[out];
      for (int i = 0; i < cols_; ++i) {
        Int val = v_.get(i, j);
        if (val != 0) k.set(i, out, val);
      }
    }
    return k;
  }

 private:
  int rows_, cols_, rank_ = 0;
  detail::RowWorkspace h_, v_;
  std::vector<std::pair<int, int>> pivots_;  // (row, col), rows increasing
};

/// Integral solution of A x = b, or absence as a value.
inline std::optional<std::vector<Int>> solve_integer(const IntMatrix& a,
                                                     const std::vector<Int>& b) {
  return ColumnEchelon(a).solve(b);
}

/// Basis of the lattice generated by the columns of A: the nonzero columns of
/// a column echelon form.
inline IntMatrix lattice_column_basis(const IntMatrix& a) {
  detail::RowWorkspace w = detail::RowWorkspace::from(a);
  int pivot_col = 0;
  for (int row = 0; row < a.rows() && pivot_col < a.cols(); ++row) {
    std::vector<int> active;
    for (const auto& [j, val] : w.row[row])
      if (j >= pivot_col) active.push_back(j);
    if (active.empty()) continue;
    while (active.size() > 1) {
      std::sort(active.begin(), active.end(), [&](int x, int y) {
        Int ax = abs_int(w.get(row, x)), ay = abs_int(w.get(row, y));
        if (ax != ay) return ax < ay;
        return x < y;
      });
      int c1 = active[0], c2 = active[1];
      Int x = w.get(row, c1), y = w.get(row, c2);
      if (y % x == 0) {
        w.cols_2x2(c1, c2, 1, 0, -(y / x), 1);
      } else {
        Int g, s, t;
        egcd(x, y, g, s, t);
        w.cols_2x2(c1, c2, s, t, -(y / g), x / g);
      }
      active.clear();
      for (const auto& [j, val] : w.row[row])
        if (j >= pivot_col) active.push_back(j);
    }
    w.swap_cols(pivot_col, active[0]);
    ++pivot_col;
  }
  IntMatrix basis(a.rows(), pivot_col);
  for (int i = 0; i < a.rows(); ++i)
    for (const auto& [j, val] : w.row[i])
      if (j < pivot_col) basis.set(i, j, val);
  return basis;
}

/// Basis of { x : A x = 0 } as matrix columns.
inline IntMatrix kernel_basis(const IntMatrix& a) { return ColumnEchelon(a).kernel(); }

/// coker(A) = Z^rows / col-space(A) presented as invariant factors plus free
/// rank, with an explicit projection and generator lifts.
struct CokernelPresentation {
  std::vector<Int> factors;      // d_1 | d_2 | ..., all > 1
  int free_rank = 0;
  // Projection of an ambient vector: factor coordinates then free coordinates.
  IntMatrix proj_factor;  // (#factors) x rows slice of U
  IntMatrix proj_free;    // free_rank x rows slice of U
  IntMatrix gen_lifts;    // rows x (#factors): Uinv columns for torsion generators

  std::vector<Int> project_torsion(const std::vector<Int>& v) const {
    std::vector<Int> w = proj_factor.apply(v);
    for (std::size_t i = 0; i < factors.size(); ++i) w[i] = mod_floor(w[i], factors[i]);
    return w;
  }
  std::vector<Int> project_free(const std::vector<Int>& v) const {
    return proj_free.apply(v);
  }
  bool maps_to_zero(const std::vector<Int>& v) const {
    for (const auto& x : project_torsion(v))
      if (x != 0) return false;
    for (const auto& x : project_free(v))
      if (x != 0) return false;
    return true;
  }
};

inline CokernelPresentation cokernel_presentation(const IntMatrix& a) {
  SmithDecomposition s = smith_normal_form(a);
  CokernelPresentation out;
  const int rows = a.rows();
  std::vector<int> factor_rows, free_rows;
  for (int i = 0; i < rows; ++i) {
    Int d = i < static_cast<int>(s.diagonal.size()) ? s.diagonal[i] : Int(0);
    if (d == 0) free_rows.push_back(i);
    else if (d > 1) { factor_rows.push_back(i); out.factors.push_back(d); }
    // d == 1 rows contribute nothing
  }
  out.free_rank = static_cast<int>(free_rows.size());
  out.proj_factor = IntMatrix(static_cast<int>(factor_rows.size()), rows);
  for (int k = 0; k < static_cast<int>(factor_rows.size()); ++k)
    for (int j = 0; j < rows; ++j) {
      Int v = s.U.at(factor_rows[k], j);
      if (v != 0) out.proj_factor.set(k, j, v);
    }
  out.proj_free = IntMatrix(out.free_rank, rows);
  for (int k = 0; k < out.free_rank; ++k)
    for (int j = 0; j < rows; ++j) {
      Int v = s.U.at(free_rows[k], j);
      if (v != 0) out.proj_free.set(k, j, v);
    }
  out.gen_lifts = IntMatrix(rows, static_cast<int>(factor_rows.size()));
  for (int k = 0; k < static_cast<int>(factor_rows.size()); ++k)
    for (int i = 0; i < rows; ++i) {
      Int v = s.Uinv.at(i, factor_rows[k]);
      if (v != 0) out.gen_lifts.set(i, k, v);
    }
  return out;
}

/// Exact inverse of a nonsingular square integer matrix, over Q.
inline RatMatrix rational_inverse(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("rational_inverse: matrix not square");
  const int n = a.rows();
  RatMatrix m = RatMatrix::from_int(a);
  RatMatrix inv = RatMatrix::identity(n);
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (m.at(r, c) != 0) { piv = r; break; }
    if (piv < 0) throw SingularMatrixError("rational_inverse: singular matrix");
    if (piv != c)
      for (int j = 0; j < n; ++j) {
        std::swap(m.at(piv, j), m.at(c, j));
        std::swap(inv.at(piv, j), inv.at(c, j));
      }
    Rat p = m.at(c, c);
    for (int j = 0; j < n; ++j) { m.at(c, j) /= p; inv.at(c, j) /= p; }
    for (int r = 0; r < n; ++r) {
      if (r == c || m.at(r, c) == 0) continue;
      Rat f = m.at(r, c);
      for (int j = 0; j < n; ++j) {
        m.at(r, j) -= f * m.at(c, j);
        inv.at(r, j) -= f * inv.at(c, j);
      }
    }
  }
  return inv;
}

/// Solves A x = b over Q (A integer, b rational). Throws when inconsistent;
/// free variables are set to zero.
inline std::vector<Rat> rational_solve(const IntMatrix& a, const std::vector<Rat>& b) {
  if (static_cast<int>(b.size()) != a.rows())
    throw DimensionError("rational_solve: rhs size mismatch");
  RatMatrix m = RatMatrix::from_int(a);
  std::vector<Rat> rhs = b;
  const int rows = a.rows(), cols = a.cols();
  std::vector<int> pivot_col_of_row(rows, -1);
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (m.at(i, c) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r) {
      for (int j = 0; j < cols; ++j) std::swap(m.at(piv, j), m.at(r, j));
      std::swap(rhs[piv], rhs[r]);
    }
    Rat p = m.at(r, c);
    for (int j = 0; j < cols; ++j) m.at(r, j) /= p;
    rhs[r] /= p;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      Rat f = m.at(i, c);
      for (int j = 0; j < cols; ++j) m.at(i, j) -= f * m.at(r, j);
      rhs[i] -= f * rhs[r];
    }
    pivot_col_of_row[r] = c;
    ++r;
  }
  for (int i = r; i < rows; ++i)
    if (rhs[i] != 0) throw Error("rational_solve: inconsistent system");
  std::vector<Rat> x(cols);
  for (int i = 0; i < r; ++i) x[pivot_col_of_row[i]] = rhs[i];
  return x;
}

/// Integer inverse of a unimodular matrix; rejects non-unimodular input.
inline IntMatrix unimodular_inverse(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("unimodular_inverse: matrix not square");
  SmithDecomposition s = smith_normal_form(a);
  for (const auto& d : s.diagonal)
    if (d != 1) throw Error("unimodular_inverse: matrix is not unimodular");
  return s.V * s.U;  // U A V = I  =>  A^{-1} = V U
}

}  // namespace m3link
