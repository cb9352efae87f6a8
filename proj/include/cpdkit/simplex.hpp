#pragma once

// Phase-I simplex for the feasibility problem  A w = b, w >= 0.
//
// Rows are sign-normalized so b >= 0 and an artificial identity basis is
// appended; the tableau keeps B^{-1} in the artificial columns, so columns
// can be appended between solves (column generation). At the optimum the
// artificial reduced costs give a dual vector y with
//   y^T a_j <= 0 for every column,  b^T y = sum of artificials,
// which is a Farkas certificate whenever the optimum is positive.

#include <cstddef>
#include <span>
#include <vector>

namespace cpdkit {

class PhaseOneSimplex {
 public:
  explicit PhaseOneSimplex(std::vector<double> rhs);

  std::size_t rows() const noexcept { return m_; }
  std::size_t columns() const noexcept { return cols_; }

  // Appends column a (length rows()); returns its index.
  std::size_t add_column(std::span<const double> a);

  // Pivots to optimality of the phase-I objective. Returns false if the
  // iteration limit was hit.
  bool solve(std::size_t max_pivots = 200000);

  double objective() const noexcept;
  // Duals in the original (un-normalized) row space.
  std::vector<double> duals() const;
  // Values of the structural columns.
  std::vector<double> primal() const;

 private:
  // Column layout: artificials [0, m), structural [m, m + capacity).
  double& at(std::size_t r, std::size_t c) { return tab_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return tab_[r * width_ + c]; }
  void widen(std::size_t new_capacity);
  void pivot(std::size_t row, std::size_t col);

  std::size_t m_ = 0;
  std::size_t cols_ = 0;
  std::size_t width_ = 0;
  std::vector<double> sign_;
  std::vector<double> tab_;
  std::vector<double> rhs_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;
};

}  // namespace cpdkit
