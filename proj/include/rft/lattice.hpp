#pragma once

// Small exact integer linear algebra over Z: column echelon form with the
// unimodular transform, integer kernels and integer solving.

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <utility>
#include <vector>

namespace rft::lattice {

  using Vector = std::vector<std::int64_t>;
  using Matrix = std::vector<Vector>;  // row major

  inline std::size_t cols(Matrix const& m, std::size_t fallback = 0) {
    return m.empty() ? fallback : m.front().size();
  }

  struct ColumnEchelon {
    Matrix                   h;       // m * u
    Matrix                   u;       // unimodular, n x n
    std::vector<std::size_t> pivot_row;  // pivot_row[c] for c < rank
    std::size_t              rank = 0;
  };

  namespace detail {
    inline void col_axpy(Matrix& m, std::size_t dst, std::size_t src, std::int64_t k) {
      for (auto& row : m) {
        row[dst] += k * row[src];
      }
    }
    inline void col_swap(Matrix& m, std::size_t a, std::size_t b) {
      for (auto& row : m) {
        std::swap(row[a], row[b]);
      }
    }
    inline void col_negate(Matrix& m, std::size_t a) {
      for (auto& row : m) {
        row[a] = -row[a];
      }
    }
  }  // namespace detail

  // n is the column count, needed when m has no rows.
  inline ColumnEchelon column_echelon(Matrix m, std::size_t n) {
    ColumnEchelon e;
    e.u.assign(n, Vector(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      e.u[i][i] = 1;
    }
    std::size_t c = 0;
    for (std::size_t r = 0; r < m.size() && c < n; ++r) {
      while (true) {
        // smallest nonzero |entry| in row r among columns >= c moved to c
        std::size_t best = n;
        for (std::size_t j = c; j < n; ++j) {
          if (m[r][j] != 0 && (best == n || std::llabs(m[r][j]) < std::llabs(m[r][best]))) {
            best = j;
          }
        }
        if (best == n) {
          break;
        }
        if (best != c) {
          detail::col_swap(m, best, c);
          detail::col_swap(e.u, best, c);
        }
        bool done = true;
        for (std::size_t j = c + 1; j < n; ++j) {
          if (m[r][j] != 0) {
            std::int64_t q = m[r][j] / m[r][c];
            detail::col_axpy(m, j, c, -q);
            detail::col_axpy(e.u, j, c, -q);
            if (m[r][j] != 0) {
              done = false;
            }
          }
        }
        if (done) {
          if (m[r][c] < 0) {
            detail::col_negate(m, c);
            detail::col_negate(e.u, c);
          }
          e.pivot_row.push_back(r);
          ++c;
          break;
        }
      }
    }
    e.rank = c;
    e.h    = std::move(m);
    return e;
  }

  inline std::size_t rank(Matrix const& m, std::size_t n) { return column_echelon(m, n).rank; }

  // Basis of {x in Z^n : m x = 0}.
  inline Matrix integer_kernel(Matrix const& m, std::size_t n) {
    auto   e = column_echelon(m, n);
    Matrix basis;
    for (std::size_t c = e.rank; c < n; ++c) {
      Vector v(n);
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = e.u[i][c];
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  // Some x in Z^n with m x = b, if one exists.
  inline std::optional<Vector> solve(Matrix const& m, Vector const& b, std::size_t n) {
    auto   e = column_echelon(m, n);
    Vector y(n, 0);
    for (std::size_t c = 0; c < e.rank; ++c) {
      std::size_t  r   = e.pivot_row[c];
      std::int64_t rhs = b[r];
      for (std::size_t j = 0; j < c; ++j) {
        rhs -= e.h[r][j] * y[j];
      }
      if (rhs % e.h[r][c] != 0) {
        return std::nullopt;
      }
      y[c] = rhs / e.h[r][c];
    }
    for (std::size_t r = 0; r < m.size(); ++r) {
      std::int64_t acc = 0;
      for (std::size_t j = 0; j < e.rank; ++j) {
        acc += e.h[r][j] * y[j];
      }
      if (acc != b[r]) {
        return std::nullopt;
      }
    }
    Vector x(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        x[i] += e.u[i][j] * y[j];
      }
    }
    return x;
  }

  // Columns of the result are given as rows: gens[i] is the i-th vector.
  inline Matrix columns_to_matrix(std::vector<Vector> const& gens, std::size_t dim) {
    Matrix m(dim, Vector(gens.size(), 0));
    for (std::size_t j = 0; j < gens.size(); ++j) {
      for (std::size_t i = 0; i < dim; ++i) {
        m[i][j] = gens[j][i];
      }
    }
    return m;
  }

  // Coefficients c with sum c_j gens[j] == target, if target lies in the span.
  inline std::optional<Vector> express(std::vector<Vector> const& gens, Vector const& target) {
    return solve(columns_to_matrix(gens, target.size()), target, gens.size());
  }

  // Basis of span(a) ∩ span(b) in Z^dim.
  inline std::vector<Vector> intersect(std::vector<Vector> const& a, std::vector<Vector> const& b,
                                       std::size_t dim) {
    std::vector<Vector> joined = a;
    for (auto const& v : b) {
      Vector neg(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        neg[i] = -v[i];
      }
      joined.push_back(std::move(neg));
    }
    auto                kernel = integer_kernel(columns_to_matrix(joined, dim), joined.size());
    std::vector<Vector> out;
    for (auto const& k : kernel) {
      Vector v(dim, 0);
      for (std::size_t j = 0; j < a.size(); ++j) {
        for (std::size_t i = 0; i < dim; ++i) {
          v[i] += k[j] * a[j][i];
        }
      }
      out.push_back(std::move(v));
    }
    // drop dependent vectors: keep an echelon basis of the span
    auto e = column_echelon(columns_to_matrix(out, dim), out.size());
    std::vector<Vector> basis;
    for (std::size_t c = 0; c < e.rank; ++c) {
      Vector v(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        v[i] = e.h[i][c];
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  inline bool is_zero(Vector const& v) {
    for (auto x : v) {
      if (x != 0) {
        return false;
      }
    }
    return true;
  }

}  // namespace rft::lattice
