#pragma once

// Dense symmetric matrices, sign/lattice points and quadratic-form
// evaluation. Everything here is a value type; all functions are pure.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cpdkit {

using RowMatrix = std::vector<std::vector<double>>;

enum class AsymmetryPolicy {
  reject,      // throw ValidationError when |a_ij - a_ji| > 1e-12
  symmetrize,  // replace by (A + A^T) / 2
};

inline constexpr double kSymmetryTolerance = 1e-12;

class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n);

  static SymmetricMatrix from_rows(const RowMatrix& rows,
                                   AsymmetryPolicy policy = AsymmetryPolicy::reject);
  static SymmetricMatrix from_row_major(std::size_t n, std::vector<double> data,
                                        AsymmetryPolicy policy = AsymmetryPolicy::reject);
  static SymmetricMatrix identity(std::size_t n);
  static SymmetricMatrix diagonal(std::span<const double> diag);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  // Writes (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * n_, n_};
  }
  const std::vector<double>& data() const noexcept { return data_; }
  RowMatrix to_rows() const;

  double trace() const noexcept;
  double max_abs() const noexcept;
  // True when every entry is an integer small enough that sums over
  // sign/lattice points stay exact in double precision.
  bool is_integral() const noexcept;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Zero-diagonal part of the symmetrized matrix plus the trace it carried.
/// On the hypercube x^T C x == x^T e x + trace_offset.
struct SymmetricSplit {
  SymmetricMatrix e;
  double trace_offset = 0.0;
};

// Point of {+1, -1}^n.
class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(std::size_t n) : bits_(n, 1) {}
  explicit SignVector(std::vector<int> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  int operator[](std::size_t i) const noexcept { return bits_[i]; }
  void flip(std::size_t i) noexcept { bits_[i] = -bits_[i]; }
  void set(std::size_t i, int value);
  std::span<const int> values() const noexcept { return bits_; }
  // Representative of {x, -x} with a leading +1.
  SignVector canonical() const;

  friend auto operator<=>(const SignVector&, const SignVector&) = default;

 private:
  std::vector<int> bits_;
};

// Point of {-M..-1, 1..M}^n.
class LatticeVector {
 public:
  LatticeVector() = default;
  LatticeVector(std::vector<int> vals, int m_bound);

  std::size_t size() const noexcept { return vals_.size(); }
  int m_bound() const noexcept { return m_bound_; }
  int operator[](std::size_t i) const noexcept { return vals_[i]; }
  void set(std::size_t i, int value);
  std::span<const int> values() const noexcept { return vals_; }
  LatticeVector canonical() const;

  friend auto operator<=>(const LatticeVector&, const LatticeVector&) = default;

 private:
  std::vector<int> vals_;
  int m_bound_ = 1;
};

/// Symmetric Toeplitz matrix with entry (i, j) = rho[|i - j|].
class ToeplitzMatrix {
 public:
  explicit ToeplitzMatrix(std::vector<double> rho);

  const std::vector<double>& rho() const noexcept { return rho_; }
  const SymmetricMatrix& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return matrix_.size(); }

 private:
  std::vector<double> rho_;
  SymmetricMatrix matrix_;
};

SymmetricSplit symmetrize_zero_diag(const RowMatrix& c);
SymmetricSplit symmetrize_zero_diag(const SymmetricMatrix& c);

// x^T a x, summed row by row left to right.
double qf_value(const SymmetricMatrix& a, std::span<const double> x);
double qf_value(const SymmetricMatrix& a, std::span<const int> x);
inline double qf_value(const SymmetricMatrix& a, const SignVector& x) {
  return qf_value(a, x.values());
}
inline double qf_value(const SymmetricMatrix& a, const LatticeVector& x) {
  return qf_value(a, x.values());
}

// (a x)_i with the same summation order as qf_value.
double local_field(const SymmetricMatrix& a, std::span<const int> x, std::size_t i);

ToeplitzMatrix build_toeplitz(std::span<const double> rho);

// Trace(a b) for symmetric a, b, i.e. the entrywise inner product.
double trace_product(const SymmetricMatrix& a, const SymmetricMatrix& b);

}  // namespace cpdkit
