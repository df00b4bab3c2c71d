#pragma once

// Reference Smith normal form by repeated row and column elimination,
// written independently of the library's lattice code.

#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

namespace oracle {

  using Matrix = std::vector<std::vector<std::int64_t>>;

  // Diagonal of the Smith normal form (nonzero entries only).
  inline std::vector<std::int64_t> smith_diagonal(Matrix m, std::size_t cols) {
    std::size_t const rows = m.size();
    std::vector<std::int64_t> diag;
    std::size_t       t = 0;
    while (t < rows && t < cols) {
      // pivot: smallest nonzero absolute value in the remaining block
      std::size_t pr = rows, pc = cols;
      for (std::size_t i = t; i < rows; ++i) {
        for (std::size_t j = t; j < cols; ++j) {
          if (m[i][j] != 0 && (pr == rows || std::llabs(m[i][j]) < std::llabs(m[pr][pc]))) {
            pr = i;
            pc = j;
          }
        }
      }
      if (pr == rows) {
        break;
      }
      std::swap(m[t], m[pr]);
      for (auto& row : m) {
        std::swap(row[t], row[pc]);
      }
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        std::int64_t q = m[i][t] / m[t][t];
        for (std::size_t j = t; j < cols; ++j) {
          m[i][j] -= q * m[t][j];
        }
        clean = clean && m[i][t] == 0;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        std::int64_t q = m[t][j] / m[t][t];
        for (std::size_t i = t; i < rows; ++i) {
          m[i][j] -= q * m[i][t];
        }
        clean = clean && m[t][j] == 0;
      }
      if (!clean) {
        continue;
      }
      // divisibility of the remaining block
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i) {
        for (std::size_t j = t + 1; j < cols && divides; ++j) {
          if (m[i][j] % m[t][t] != 0) {
            for (std::size_t k = t; k < cols; ++k) {
              m[t][k] += m[i][k];
            }
            divides = false;
          }
        }
      }
      if (!divides) {
        continue;
      }
      diag.push_back(std::llabs(m[t][t]));
      ++t;
    }
    return diag;
  }

  inline std::size_t free_rank_of_abelianization(Matrix const& relations, std::size_t gens) {
    return gens - smith_diagonal(relations, gens).size();
  }

}  // namespace oracle
