#include "cpdkit/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpdkit/error.hpp"

namespace cpdkit {

namespace {
constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr std::size_t kDegenerateBeforeBland = 50;
}  // namespace

PhaseOneSimplex::PhaseOneSimplex(std::vector<double> rhs)
    : m_(rhs.size()), width_(rhs.size()), sign_(rhs.size()), rhs_(std::move(rhs)) {
  if (m_ == 0) throw DimensionError("feasibility problem needs at least one row");
  tab_.assign(m_ * width_, 0.0);
  cost_.assign(width_, 0.0);
  basis_.resize(m_);
  for (std::size_t r = 0; r < m_; ++r) {
    if (!std::isfinite(rhs_[r])) throw ValidationError("right-hand side is not finite");
    sign_[r] = rhs_[r] < 0.0 ? -1.0 : 1.0;
    rhs_[r] *= sign_[r];
    at(r, r) = 1.0;
    basis_[r] = r;
  }
}

void PhaseOneSimplex::widen(std::size_t new_capacity) {
  const std::size_t new_width = m_ + new_capacity;
  std::vector<double> tab(m_ * new_width, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    std::copy_n(tab_.begin() + r * width_, width_, tab.begin() + r * new_width);
  }
  tab_ = std::move(tab);
  cost_.resize(new_width, 0.0);
  width_ = new_width;
}

std::size_t PhaseOneSimplex::add_column(std::span<const double> a) {
  if (a.size() != m_) throw DimensionError("column length does not match row count");
  if (m_ + cols_ == width_) widen(std::max<std::size_t>(16, 2 * cols_));
  const std::size_t col = m_ + cols_;
  ++cols_;
  // tableau column = B^{-1} S a, with B^{-1} held in the artificial block
  double reduced = 0.0;
  for (std::size_t r = 0; r < m_; ++r) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m_; ++k) acc += at(r, k) * sign_[k] * a[k];
    at(r, col) = acc;
  }
  for (std::size_t k = 0; k < m_; ++k) reduced -= (1.0 - cost_[k]) * sign_[k] * a[k];
  cost_[col] = reduced;
  return cols_ - 1;
}

void PhaseOneSimplex::pivot(std::size_t row, std::size_t col) {
  const std::size_t used = m_ + cols_;
  const double p = at(row, col);
  for (std::size_t c = 0; c < used; ++c) at(row, c) /= p;
  rhs_[row] /= p;
  at(row, col) = 1.0;
  for (std::size_t r = 0; r < m_; ++r) {
    if (r == row) continue;
    const double f = at(r, col);
    if (f == 0.0) continue;
    for (std::size_t c = 0; c < used; ++c) at(r, c) -= f * at(row, c);
    at(r, col) = 0.0;
    rhs_[r] -= f * rhs_[row];
    if (rhs_[r] < 0.0 && rhs_[r] > -1e-13) rhs_[r] = 0.0;
  }
  const double f = cost_[col];
  for (std::size_t c = 0; c < used; ++c) cost_[c] -= f * at(row, c);
  cost_[col] = 0.0;
  basis_[row] = col;
}

bool PhaseOneSimplex::solve(std::size_t max_pivots) {
  std::size_t degenerate = 0;
  for (std::size_t iter = 0; iter < max_pivots; ++iter) {
    const bool bland = degenerate >= kDegenerateBeforeBland;
    std::size_t enter = width_;
    double best = -kCostTol;
    for (std::size_t c = m_; c < m_ + cols_; ++c) {
      if (cost_[c] < best) {
        enter = c;
        if (bland) break;
        best = cost_[c];
      }
    }
    if (enter == width_) return true;

    std::size_t leave = m_;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m_; ++r) {
      const double a = at(r, enter);
      if (a <= kPivotTol) continue;
      const double q = rhs_[r] / a;
      if (q < ratio || (q == ratio && basis_[r] < basis_[leave])) {
        ratio = q;
        leave = r;
      }
    }
    // Phase I is bounded below by zero, so an unbounded ray cannot occur;
    // treat it as optimal at the current precision.
    if (leave == m_) {
      cost_[enter] = 0.0;
      continue;
    }
    degenerate = (ratio == 0.0) ? degenerate + 1 : 0;
    pivot(leave, enter);
  }
  return false;
}

double PhaseOneSimplex::objective() const noexcept {
  double total = 0.0;
  for (std::size_t r = 0; r < m_; ++r) {
    if (basis_[r] < m_) total += rhs_[r];
  }
  return total;
}

std::vector<double> PhaseOneSimplex::duals() const {
  std::vector<double> y(m_);
  for (std::size_t r = 0; r < m_; ++r) y[r] = sign_[r] * (1.0 - cost_[r]);
  return y;
}

std::vector<double> PhaseOneSimplex::primal() const {
  std::vector<double> x(cols_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    if (basis_[r] >= m_) x[basis_[r] - m_] = std::max(0.0, rhs_[r]);
  }
  return x;
}

}  // namespace cpdkit
