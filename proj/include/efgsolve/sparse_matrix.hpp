#pragma once

// Coordinate-built sparse matrix with both row-major and column-major
// layouts, since A*y and A^T*x are equally hot in the solvers. Summation
// order is fixed (sorted triples) so products are bit-reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace efgsolve {

struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  // CSR
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> csr_values;
  // CSC mirror
  std::vector<int> col_ptr;
  std::vector<int> row_idx;
  std::vector<double> csc_values;

  static SparseMatrix from_triples(int rows, int cols,
                                   std::vector<std::tuple<int, int, double>> triples) {
    SparseMatrix m;
    m.rows = rows;
    m.cols = cols;
    std::sort(triples.begin(), triples.end(),
              [](const auto& a, const auto& b) {
                return std::tie(std::get<0>(a), std::get<1>(a)) <
                       std::tie(std::get<0>(b), std::get<1>(b));
              });
    // Merge duplicates in sorted order.
    std::vector<std::tuple<int, int, double>> merged;
    merged.reserve(triples.size());
    for (const auto& tr : triples) {
      if (!merged.empty() && std::get<0>(merged.back()) == std::get<0>(tr) &&
          std::get<1>(merged.back()) == std::get<1>(tr)) {
        std::get<2>(merged.back()) += std::get<2>(tr);
      } else {
        merged.push_back(tr);
      }
    }
    m.row_ptr.assign(rows + 1, 0);
    for (const auto& tr : merged) ++m.row_ptr[std::get<0>(tr) + 1];
    for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    m.col_idx.reserve(merged.size());
    m.csr_values.reserve(merged.size());
    for (const auto& tr : merged) {
      m.col_idx.push_back(std::get<1>(tr));
      m.csr_values.push_back(std::get<2>(tr));
    }
    // Column-major mirror.
    std::stable_sort(merged.begin(), merged.end(),
                     [](const auto& a, const auto& b) { return std::get<1>(a) < std::get<1>(b); });
    m.col_ptr.assign(cols + 1, 0);
    for (const auto& tr : merged) ++m.col_ptr[std::get<1>(tr) + 1];
    for (int c = 0; c < cols; ++c) m.col_ptr[c + 1] += m.col_ptr[c];
    m.row_idx.reserve(merged.size());
    m.csc_values.reserve(merged.size());
    for (const auto& tr : merged) {
      m.row_idx.push_back(std::get<0>(tr));
      m.csc_values.push_back(std::get<2>(tr));
    }
    return m;
  }

  std::int64_t nnz() const { return static_cast<std::int64_t>(csr_values.size()); }

  // out = A y
  void multiply(std::span<const double> y, std::span<double> out) const {
    if (static_cast<int>(y.size()) != cols || static_cast<int>(out.size()) != rows) {
      throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
    }
    for (int r = 0; r < rows; ++r) {
      double acc = 0;
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += csr_values[k] * y[col_idx[k]];
      out[r] = acc;
    }
  }

  // out = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> out) const {
    if (static_cast<int>(x.size()) != rows || static_cast<int>(out.size()) != cols) {
      throw std::invalid_argument("SparseMatrix::multiply_transpose: dimension mismatch");
    }
    for (int c = 0; c < cols; ++c) {
      double acc = 0;
      for (int k = col_ptr[c]; k < col_ptr[c + 1]; ++k) acc += csc_values[k] * x[row_idx[k]];
      out[c] = acc;
    }
  }

  double max_abs() const {
    double m = 0;
    for (double v : csr_values) m = std::max(m, std::abs(v));
    return m;
  }
};

}  // namespace efgsolve
