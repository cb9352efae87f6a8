#include "cpdkit/quadform.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "cpdkit/error.hpp"

namespace cpdkit {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("matrix entry is not finite");
  }
}

void apply_policy(std::size_t n, std::vector<double>& data, AsymmetryPolicy policy) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double& a = data[i * n + j];
      double& b = data[j * n + i];
      if (policy == AsymmetryPolicy::reject) {
        if (std::abs(a - b) > kSymmetryTolerance) {
          throw ValidationError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
        }
        b = a;
      } else {
        const double mean = 0.5 * (a + b);
        a = mean;
        b = mean;
      }
    }
  }
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {
  if (n == 0) throw DimensionError("matrix order must be at least 1");
}

SymmetricMatrix SymmetricMatrix::from_rows(const RowMatrix& rows, AsymmetryPolicy policy) {
  const std::size_t n = rows.size();
  if (n == 0) throw DimensionError("matrix order must be at least 1");
  std::vector<double> data;
  data.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw DimensionError("matrix is not square");
    data.insert(data.end(), r.begin(), r.end());
  }
  return from_row_major(n, std::move(data), policy);
}

SymmetricMatrix SymmetricMatrix::from_row_major(std::size_t n, std::vector<double> data,
                                                AsymmetryPolicy policy) {
  if (n == 0) throw DimensionError("matrix order must be at least 1");
  if (data.size() != n * n) throw DimensionError("row-major data does not match n*n");
  require_finite(data);
  apply_policy(n, data, policy);
  SymmetricMatrix m;
  m.n_ = n;
  m.data_ = std::move(data);
  return m;
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) {
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1.0;
  return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> diag) {
  SymmetricMatrix m(diag.size());
  require_finite(diag);
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * m.n_ + i] = diag[i];
  return m;
}

void SymmetricMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= n_ || j >= n_) throw DimensionError("matrix index out of range");
  if (!std::isfinite(value)) throw ValidationError("matrix entry is not finite");
  data_[i * n_ + j] = value;
  data_[j * n_ + i] = value;
}

RowMatrix SymmetricMatrix::to_rows() const {
  RowMatrix rows(n_);
  for (std::size_t i = 0; i < n_; ++i) rows[i].assign(row(i).begin(), row(i).end());
  return rows;
}

double SymmetricMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += data_[i * n_ + i];
  return t;
}

double SymmetricMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool SymmetricMatrix::is_integral() const noexcept {
  for (double v : data_) {
    if (v != std::nearbyint(v) || std::abs(v) > 1048576.0) return false;
  }
  return true;
}

SignVector::SignVector(std::vector<int> bits) : bits_(std::move(bits)) {
  for (int b : bits_) {
    if (b != 1 && b != -1) throw ValidationError("sign vector component must be +1 or -1");
  }
}

void SignVector::set(std::size_t i, int value) {
  if (value != 1 && value != -1) throw ValidationError("sign vector component must be +1 or -1");
  bits_.at(i) = value;
}

SignVector SignVector::canonical() const {
  SignVector out = *this;
  if (!out.bits_.empty() && out.bits_[0] < 0) {
    for (int& b : out.bits_) b = -b;
  }
  return out;
}

LatticeVector::LatticeVector(std::vector<int> vals, int m_bound)
    : vals_(std::move(vals)), m_bound_(m_bound) {
  if (m_bound_ < 1) throw ValidationError("lattice bound M must be >= 1");
  for (int v : vals_) {
    if (v == 0 || std::abs(v) > m_bound_) {
      throw ValidationError("lattice component must be nonzero with |v| <= M");
    }
  }
}

void LatticeVector::set(std::size_t i, int value) {
  if (value == 0 || std::abs(value) > m_bound_) {
    throw ValidationError("lattice component must be nonzero with |v| <= M");
  }
  vals_.at(i) = value;
}

LatticeVector LatticeVector::canonical() const {
  LatticeVector out = *this;
  if (!out.vals_.empty() && out.vals_[0] < 0) {
    for (int& v : out.vals_) v = -v;
  }
  return out;
}

ToeplitzMatrix::ToeplitzMatrix(std::vector<double> rho) : rho_(std::move(rho)) {
  if (rho_.empty()) throw DimensionError("autocorrelation sequence is empty");
  require_finite(rho_);
  const std::size_t n = rho_.size();
  std::vector<double> data(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) data[i * n + j] = rho_[i > j ? i - j : j - i];
  }
  matrix_ = SymmetricMatrix::from_row_major(n, std::move(data));
}

SymmetricSplit symmetrize_zero_diag(const RowMatrix& c) {
  const std::size_t n = c.size();
  if (n == 0) throw DimensionError("matrix order must be at least 1");
  std::vector<double> data;
  data.reserve(n * n);
  for (const auto& r : c) {
    if (r.size() != n) throw DimensionError("matrix is not square");
    data.insert(data.end(), r.begin(), r.end());
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += data[i * n + i];
  auto d = SymmetricMatrix::from_row_major(n, std::move(data), AsymmetryPolicy::symmetrize);
  return {symmetrize_zero_diag(d).e, trace};
}

SymmetricSplit symmetrize_zero_diag(const SymmetricMatrix& c) {
  const std::size_t n = c.size();
  std::vector<double> data = c.data();
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = 0.0;
  return {SymmetricMatrix::from_row_major(n, std::move(data)), c.trace()};
}

namespace {

template <typename T>
double qf_impl(const SymmetricMatrix& a, std::span<const T> x) {
  const std::size_t n = a.size();
  if (x.size() != n) throw DimensionError("vector length does not match matrix order");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += r[j] * static_cast<double>(x[j]);
    total += static_cast<double>(x[i]) * acc;
  }
  return total;
}

}  // namespace

double qf_value(const SymmetricMatrix& a, std::span<const double> x) { return qf_impl(a, x); }
double qf_value(const SymmetricMatrix& a, std::span<const int> x) { return qf_impl(a, x); }

double local_field(const SymmetricMatrix& a, std::span<const int> x, std::size_t i) {
  const auto r = a.row(i);
  double acc = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * static_cast<double>(x[j]);
  return acc;
}

ToeplitzMatrix build_toeplitz(std::span<const double> rho) {
  return ToeplitzMatrix(std::vector<double>(rho.begin(), rho.end()));
}

double trace_product(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.size() != b.size()) throw DimensionError("matrix orders differ");
  const std::size_t n = a.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) total += a(i, k) * b(k, i);
  }
  return total;
}

}  // namespace cpdkit
