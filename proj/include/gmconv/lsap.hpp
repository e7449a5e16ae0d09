#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gmconv {

/// Square cost matrix for the linear sum assignment problem. Rows/columns at
/// or beyond `real_rows()` / `real_cols()` are zero-cost padding added to
/// square up a rectangular problem.
class CostMatrix {
 public:
  explicit CostMatrix(std::size_t n) : CostMatrix(n, n, n) {}
  /// Square matrix of size max(rows, cols) with zero-filled padding.
  CostMatrix(std::size_t rows, std::size_t cols)
      : CostMatrix(rows > cols ? rows : cols, rows, cols) {}

  /// Throws std::domain_error if `rows` is not square.
  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  std::size_t real_rows() const { return real_rows_; }
  std::size_t real_cols() const { return real_cols_; }
  bool is_padding(std::size_t r, std::size_t c) const {
    return r >= real_rows_ || c >= real_cols_;
  }

  double operator()(std::size_t r, std::size_t c) const { return entries_[r * n_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return entries_[r * n_ + c]; }
  std::span<const double> entries() const { return entries_; }

 private:
  CostMatrix(std::size_t n, std::size_t rows, std::size_t cols)
      : n_(n), real_rows_(rows), real_cols_(cols), entries_(n * n, 0.0) {}

  std::size_t n_;
  std::size_t real_rows_;
  std::size_t real_cols_;
  std::vector<double> entries_;
};

struct LsapSolution {
  /// Column assigned to each row.
  std::vector<std::size_t> row_to_col;
  /// Sum of C(r, row_to_col[r]) in row order.
  double cost = 0.0;
};

/// Minimum-cost perfect assignment (Hungarian / Munkres method). Among
/// assignments that are co-optimal on the solver's reduced costs, returns the
/// lexicographically smallest row_to_col. Throws std::domain_error on
/// non-finite entries.
LsapSolution solve_lsap(const CostMatrix& costs);

}  // namespace gmconv
