#include <doctest.h>

#include <cmath>

#include "cpdkit/error.hpp"
#include "cpdkit/quadform.hpp"
#include "support.hpp"

using namespace cpdkit;
using cpdkit::testing::sign_bits;

TEST_CASE("symmetrize_zero_diag examples") {
  auto s = symmetrize_zero_diag(RowMatrix{{1, 0}, {0, 1}});
  CHECK(s.e == SymmetricMatrix(2));
  CHECK(s.trace_offset == 2.0);

  s = symmetrize_zero_diag(RowMatrix{{0, 1}, {1, 0}});
  CHECK(s.e == SymmetricMatrix::from_rows({{0, 1}, {1, 0}}));
  CHECK(s.trace_offset == 0.0);

  const RowMatrix c{{1, 3}, {-1, 2}};
  s = symmetrize_zero_diag(c);
  CHECK(s.e == SymmetricMatrix::from_rows({{0, 1}, {1, 0}}));
  CHECK(s.trace_offset == 3.0);
  const auto sym = SymmetricMatrix::from_rows(c, AsymmetryPolicy::symmetrize);
  for (std::uint64_t code = 0; code < 4; ++code) {
    const auto x = sign_bits(code, 2);
    const double direct = c[0][0] * x[0] * x[0] + c[0][1] * x[0] * x[1] +
                          c[1][0] * x[1] * x[0] + c[1][1] * x[1] * x[1];
    CHECK(direct == qf_value(s.e, x) + 3.0);
    CHECK(direct == qf_value(sym, x));
  }
}

TEST_CASE("symmetrize_zero_diag errors") {
  CHECK_THROWS_AS(symmetrize_zero_diag(RowMatrix{{1, 2}}), DimensionError);
  CHECK_THROWS_AS(symmetrize_zero_diag(RowMatrix{{1, NAN}, {0, 1}}), ValidationError);
  CHECK_THROWS_AS(symmetrize_zero_diag(RowMatrix{{1, INFINITY}, {0, 1}}), ValidationError);
}

TEST_CASE("SymmetricMatrix rejects asymmetry unless asked to symmetrize") {
  CHECK_THROWS_AS(SymmetricMatrix::from_rows({{1, 2}, {0, 1}}), ValidationError);
  CHECK_NOTHROW(SymmetricMatrix::from_rows({{1, 2}, {2 + 1e-13, 1}}));
  const auto a = SymmetricMatrix::from_rows({{1, 2}, {0, 1}}, AsymmetryPolicy::symmetrize);
  CHECK(a(0, 1) == 1.0);
  CHECK(a(1, 0) == 1.0);
}

TEST_CASE("qf_value examples") {
  const std::vector<int> pm{1, -1};
  CHECK(qf_value(SymmetricMatrix::identity(2), pm) == 2.0);
  const auto swap = SymmetricMatrix::from_rows({{0, 1}, {1, 0}});
  CHECK(qf_value(swap, std::vector<int>{1, 1}) == 2.0);
  CHECK(qf_value(swap, pm) == -2.0);
  const auto r = SymmetricMatrix::from_rows({{1, -0.6, 0}, {-0.6, 1, -0.6}, {0, -0.6, 1}});
  CHECK(qf_value(r, std::vector<int>{1, 1, 1}) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK_THROWS_AS(qf_value(r, std::vector<int>{1, 1}), DimensionError);
}

TEST_CASE("build_toeplitz examples") {
  const std::vector<double> r1{1.0};
  CHECK(build_toeplitz(r1).matrix() == SymmetricMatrix::identity(1));
  const std::vector<double> r2{1.0, 0.5};
  CHECK(build_toeplitz(r2).matrix() == SymmetricMatrix::from_rows({{1, 0.5}, {0.5, 1}}));
  const std::vector<double> r3{1.0, -0.6, 0.0};
  CHECK(build_toeplitz(r3).matrix() ==
        SymmetricMatrix::from_rows({{1, -0.6, 0}, {-0.6, 1, -0.6}, {0, -0.6, 1}}));
  CHECK_THROWS(build_toeplitz(std::vector<double>{}));
}

TEST_CASE("sign and lattice vectors validate their entries") {
  CHECK_THROWS_AS(SignVector(std::vector<int>{1, 0}), ValidationError);
  CHECK_THROWS_AS(LatticeVector({1, 3}, 2), ValidationError);
  CHECK_THROWS_AS(LatticeVector({1, 0}, 2), ValidationError);
  CHECK_NOTHROW(LatticeVector({-2, 1}, 2));
  CHECK(SignVector(std::vector<int>{-1, 1}).canonical() == SignVector(std::vector<int>{1, -1}));
}

TEST_CASE("property: hypercube identity holds exhaustively") {
  SplitMixStream rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const auto c = cpdkit::testing::random_square(n, rng);
    const auto split = symmetrize_zero_diag(c);
    const auto sym = SymmetricMatrix::from_rows(c, AsymmetryPolicy::symmetrize);
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
      const auto x = sign_bits(code, n);
      REQUIRE(std::abs(qf_value(sym, x) - (qf_value(split.e, x) + split.trace_offset)) <= 1e-12);
    }
  }
}

TEST_CASE("property: trace identity for symmetric R and zero-diagonal X") {
  SplitMixStream rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    const auto r = cpdkit::testing::random_symmetric(n, rng);
    const auto x = symmetrize_zero_diag(cpdkit::testing::random_symmetric(n, rng)).e;
    CHECK(std::abs(trace_product(r, x) - trace_product(x, r)) <= 1e-12);
  }
}

TEST_CASE("property: toeplitz output is symmetric with constant diagonals") {
  SplitMixStream rng(303);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> rho(1 + rng.below(12));
    for (auto& v : rho) v = cpdkit::testing::uniform(rng, -1, 1);
    const auto t = build_toeplitz(rho).matrix();
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t j = 0; j < t.size(); ++j) {
        CHECK(t(i, j) == rho[i > j ? i - j : j - i]);
      }
    }
  }
}
