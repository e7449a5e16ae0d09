#include "gmconv/lsap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gmconv {

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  CostMatrix m(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) throw std::domain_error("cost matrix is not square");
    for (std::size_t c = 0; c < rows.size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Munkres' method on an explicit reduced-cost matrix. Reductions only ever
// subtract the minimum of a set from its members (or add it to doubly
// covered cells), so a cell that reaches zero is exactly zero and singly
// covered cells are never touched. The final zero pattern is the equality
// subgraph of an optimal dual solution.
class Munkres {
 public:
  explicit Munkres(const CostMatrix& costs)
      : n_(costs.size()),
        reduced_(costs.entries().begin(), costs.entries().end()),
        star_in_row_(n_, kNone),
        star_in_col_(n_, kNone),
        prime_in_row_(n_, kNone),
        row_cov_(n_, false),
        col_cov_(n_, false) {}

  std::vector<std::size_t> solve() {
    reduce();
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (at(r, c) == 0.0 && star_in_row_[r] == kNone && star_in_col_[c] == kNone) {
          star_in_row_[r] = c;
          star_in_col_[c] = r;
        }
      }
    }
    while (cover_starred_columns() < n_) {
      auto [r, c] = find_prime_without_star();
      augment(r, c);
    }
    lexicographic_min();
    return star_in_row_;
  }

 private:
  double& at(std::size_t r, std::size_t c) { return reduced_[r * n_ + c]; }

  void reduce() {
    for (std::size_t r = 0; r < n_; ++r) {
      double lo = at(r, 0);
      for (std::size_t c = 1; c < n_; ++c) lo = std::min(lo, at(r, c));
      for (std::size_t c = 0; c < n_; ++c) at(r, c) -= lo;
    }
    for (std::size_t c = 0; c < n_; ++c) {
      double lo = at(0, c);
      for (std::size_t r = 1; r < n_; ++r) lo = std::min(lo, at(r, c));
      for (std::size_t r = 0; r < n_; ++r) at(r, c) -= lo;
    }
  }

  std::size_t cover_starred_columns() {
    std::fill(row_cov_.begin(), row_cov_.end(), false);
    std::size_t covered = 0;
    for (std::size_t c = 0; c < n_; ++c) {
      col_cov_[c] = star_in_col_[c] != kNone;
      covered += col_cov_[c];
    }
    std::fill(prime_in_row_.begin(), prime_in_row_.end(), kNone);
    return covered;
  }

  std::pair<std::size_t, std::size_t> find_prime_without_star() {
    while (true) {
      std::size_t zr = kNone, zc = kNone;
      for (std::size_t r = 0; r < n_ && zr == kNone; ++r) {
        if (row_cov_[r]) continue;
        for (std::size_t c = 0; c < n_; ++c) {
          if (!col_cov_[c] && at(r, c) == 0.0) {
            zr = r;
            zc = c;
            break;
          }
        }
      }
      if (zr == kNone) {
        adjust();
        continue;
      }
      prime_in_row_[zr] = zc;
      if (star_in_row_[zr] == kNone) return {zr, zc};
      row_cov_[zr] = true;
      col_cov_[star_in_row_[zr]] = false;
    }
  }

  void adjust() {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n_; ++r) {
      if (row_cov_[r]) continue;
      for (std::size_t c = 0; c < n_; ++c) {
        if (!col_cov_[c]) lo = std::min(lo, at(r, c));
      }
    }
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (row_cov_[r] && col_cov_[c]) {
          at(r, c) += lo;
        } else if (!row_cov_[r] && !col_cov_[c]) {
          at(r, c) -= lo;
        }
      }
    }
  }

  void augment(std::size_t r, std::size_t c) {
    // Alternating path prime -> star (same column) -> prime (same row) ...
    std::vector<std::pair<std::size_t, std::size_t>> path{{r, c}};
    while (true) {
      const std::size_t sr = star_in_col_[path.back().second];
      if (sr == kNone) break;
      path.emplace_back(sr, path.back().second);
      path.emplace_back(sr, prime_in_row_[sr]);
    }
    for (std::size_t k = 1; k < path.size(); k += 2) {
      star_in_row_[path[k].first] = kNone;
      star_in_col_[path[k].second] = kNone;
    }
    for (std::size_t k = 0; k < path.size(); k += 2) {
      star_in_row_[path[k].first] = path[k].second;
      star_in_col_[path[k].second] = path[k].first;
    }
  }

  // Rewrites the current zero-cost perfect matching into the lexicographically
  // smallest one. Row r tries each smaller zero column c; the swap is legal
  // iff an alternating path over later rows lets c's owner move away and ends
  // in a row that can take r's current column.
  void lexicographic_min() {
    std::vector<bool> locked(n_, false);
    std::vector<std::size_t> via(n_);
    std::vector<bool> seen_row(n_);
    std::vector<std::size_t> queue;
    queue.reserve(n_);
    for (std::size_t r = 0; r < n_; ++r) {
      const std::size_t target = star_in_row_[r];
      for (std::size_t c = 0; c < target; ++c) {
        if (locked[c] || at(r, c) != 0.0) continue;
        std::fill(seen_row.begin(), seen_row.end(), false);
        queue.clear();
        const std::size_t start = star_in_col_[c];
        queue.push_back(start);
        seen_row[start] = true;
        via[start] = kNone;
        std::size_t end_row = kNone;
        for (std::size_t head = 0; head < queue.size() && end_row == kNone; ++head) {
          const std::size_t row = queue[head];
          for (std::size_t col = 0; col < n_; ++col) {
            if (locked[col] || col == c || col == star_in_row_[row] || at(row, col) != 0.0) {
              continue;
            }
            if (col == target) {
              end_row = row;
              break;
            }
            const std::size_t owner = star_in_col_[col];
            if (owner <= r || seen_row[owner]) continue;
            seen_row[owner] = true;
            via[owner] = row;
            queue.push_back(owner);
          }
        }
        if (end_row == kNone) continue;
        // Each row on the path takes the column of the row it reached.
        std::size_t take = target;
        for (std::size_t row = end_row; row != kNone; row = via[row]) {
          const std::size_t old = star_in_row_[row];
          star_in_row_[row] = take;
          star_in_col_[take] = row;
          take = old;
        }
        star_in_row_[r] = c;
        star_in_col_[c] = r;
        break;
      }
      locked[star_in_row_[r]] = true;
    }
  }

  std::size_t n_;
  std::vector<double> reduced_;
  std::vector<std::size_t> star_in_row_;
  std::vector<std::size_t> star_in_col_;
  std::vector<std::size_t> prime_in_row_;
  std::vector<bool> row_cov_;
  std::vector<bool> col_cov_;
};

}  // namespace

LsapSolution solve_lsap(const CostMatrix& costs) {
  for (double x : costs.entries()) {
    if (!std::isfinite(x)) throw std::domain_error("cost matrix has a non-finite entry");
  }
  LsapSolution out;
  if (costs.size() == 0) return out;
  out.row_to_col = Munkres(costs).solve();
  for (std::size_t r = 0; r < costs.size(); ++r) out.cost += costs(r, out.row_to_col[r]);
  return out;
}

}  // namespace gmconv
