#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "phasesync/distances.hpp"
#include "phasesync/phase_vector.hpp"

using namespace phasesync;

namespace {

CVector random_phases(int n, Xoshiro256pp& rng) {
  CVector z(n);
  for (int j = 0; j < n; ++j) z(j) = rng.unit_phase();
  return z;
}

CVector random_gaussian(int n, Xoshiro256pp& rng, double scale = 1.0) {
  CVector w(n);
  for (int j = 0; j < n; ++j) w(j) = scale * rng.complex_normal();
  return w;
}

}  // namespace

TEST(PhaseVector, RejectsNonUnitEntries) {
  CVector v(2);
  v << Complex(1, 0), Complex(0.5, 0);
  EXPECT_THROW(PhaseVector{v}, NumericalError);
  EXPECT_THROW(PhaseVector{CVector(0)}, DimensionError);
}

TEST(DistL2, IdentityAndGlobalPhase) {
  Xoshiro256pp rng(7);
  for (int n : {1, 3, 17}) {
    const CVector z = random_phases(n, rng);
    EXPECT_NEAR(dist_l2(z, z).value, 0.0, 1e-12);
    const Complex rot = std::polar(1.0, 1.234);
    EXPECT_NEAR(dist_l2(CVector(rot * z), z).value, 0.0, 1e-7);
  }
}

TEST(DistL2, OrthogonalPairHitsTwo) {
  CVector w(2), z(2);
  w << Complex(1, 0), Complex(1, 0);
  z << Complex(1, 0), Complex(-1, 0);
  const QuotientDistance d = dist_l2(w, z);
  EXPECT_NEAR(d.value, 2.0, 1e-12);
  // w^H z = 0, so theta defaults to 0 and the grid oracle agrees.
  EXPECT_NEAR(oracles::grid_quotient_distance(w, z, 2.0, 1000000), 2.0, 1e-9);
}

TEST(DistL2, ClosedFormMatchesGridOracle) {
  Xoshiro256pp rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    // n >= 2: at n = 1 the distance is exactly zero and the grid's own error
    // is linear rather than quadratic in the grid step.
    const int n = 2 + static_cast<int>(rng.next() % 11);
    const CVector w = random_phases(n, rng);
    const CVector z = random_phases(n, rng);
    const double closed = dist_l2(w, z).value;
    const double grid = oracles::grid_quotient_distance(w, z, 2.0, 100000);
    EXPECT_LE(closed, grid + 1e-12);  // closed form is a true minimum
    EXPECT_NEAR(closed, grid, 1e-8);
  }
}

TEST(DistL2, ValueAttainedAtReportedTheta) {
  Xoshiro256pp rng(13);
  const CVector w = random_gaussian(6, rng);
  const CVector z = random_phases(6, rng);
  const QuotientDistance d = dist_l2(w, z);
  const Complex rot = std::polar(1.0, d.minimizing_theta);
  EXPECT_NEAR((w - rot * z).norm(), d.value, 1e-9);
  EXPECT_GE(d.minimizing_theta, 0.0);
  EXPECT_LT(d.minimizing_theta, 2.0 * std::numbers::pi);
}

TEST(DistL2, DimensionErrors) {
  CVector a(2), b(3);
  a.setOnes();
  b.setOnes();
  EXPECT_THROW(dist_l2(a, b), DimensionError);
  EXPECT_THROW(dist_l2(CVector(0), CVector(0)), DimensionError);
}

TEST(DistLinf, IdentityAndGlobalPhase) {
  Xoshiro256pp rng(17);
  const CVector z = random_phases(9, rng);
  EXPECT_NEAR(dist_linf(z, z).value, 0.0, 1e-10);
  const Complex rot = std::polar(1.0, 2.5);
  EXPECT_NEAR(dist_linf(CVector(rot * z), z).value, 0.0, 1e-10);
}

TEST(DistLinf, BalancedPairHitsSqrtTwo) {
  CVector w(2), z(2);
  w << Complex(1, 0), Complex(1, 0);
  z << Complex(1, 0), Complex(-1, 0);
  EXPECT_NEAR(dist_linf(w, z).value, std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(oracles::grid_quotient_distance(
                  w, z, std::numeric_limits<double>::infinity(), 1000000),
              std::sqrt(2.0), 1e-6);
}

TEST(DistLinf, MatchesDenseGridOracle) {
  Xoshiro256pp rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 10);
    const CVector w = random_phases(n, rng);
    const CVector z = random_phases(n, rng);
    const double lib = dist_linf(w, z).value;
    const double grid = oracles::grid_quotient_distance(
        w, z, std::numeric_limits<double>::infinity(), 200000);
    // The dense grid is itself only accurate to ~pi/grid.
    EXPECT_LE(lib, grid + 1e-9);
    EXPECT_GE(lib, grid - 1e-4);
  }
}

TEST(Distances, SymmetricAndPhaseInvariant) {
  Xoshiro256pp rng(23);
  const CVector w = random_phases(8, rng);
  const CVector z = random_phases(8, rng);
  EXPECT_NEAR(dist_l2(w, z).value, dist_l2(z, w).value, 1e-10);
  EXPECT_NEAR(dist_linf(w, z).value, dist_linf(z, w).value, 1e-9);
  const Complex rot = std::polar(1.0, 0.77);
  EXPECT_NEAR(dist_l2(CVector(rot * w), z).value, dist_l2(w, z).value, 1e-10);
  EXPECT_NEAR(dist_l2(w, CVector(rot * z)).value, dist_l2(w, z).value, 1e-10);
  EXPECT_NEAR(dist_linf(CVector(rot * w), z).value, dist_linf(w, z).value,
              1e-9);
}

TEST(Distances, QuotientNeverExceedsPlainNorm) {
  Xoshiro256pp rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const CVector w = random_gaussian(7, rng);
    const CVector z = random_phases(7, rng);
    EXPECT_LE(dist_l2(w, z).value, (w - z).norm() + 1e-12);
  }
}

TEST(Normalize, ModulusDivision) {
  CVector w(2);
  w << Complex(2, 0), Complex(0, -3);
  const PhaseVector out = normalize_entrywise(w);
  EXPECT_NEAR(std::abs(out(0) - Complex(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(1) - Complex(0, -1)), 0.0, 1e-15);
}

TEST(Normalize, ZeroPolicies) {
  CVector w(2);
  w << Complex(0, 0), Complex(5, 0);
  CVector prev(2);
  prev << Complex(0, 1), Complex(1, 0);

  const PhaseVector unit = normalize_entrywise(w, ZeroPolicy::kUnitOne);
  EXPECT_EQ(unit(0), Complex(1, 0));
  EXPECT_EQ(unit(1), Complex(1, 0));

  const PhaseVector prev_pol =
      normalize_entrywise(w, ZeroPolicy::kPreviousIterate, &prev);
  EXPECT_EQ(prev_pol(0), Complex(0, 1));
  EXPECT_EQ(prev_pol(1), Complex(1, 0));

  EXPECT_THROW(normalize_entrywise(w, ZeroPolicy::kPreviousIterate),
               ConfigError);
  EXPECT_THROW(normalize_entrywise(w, ZeroPolicy::kRandomUnit), ConfigError);

  Xoshiro256pp rng(5);
  const PhaseVector rand_pol =
      normalize_entrywise(w, ZeroPolicy::kRandomUnit, nullptr, &rng);
  EXPECT_NEAR(std::abs(rand_pol(0)), 1.0, 1e-12);
}

// ||w/|w| - z||_q <= 2 ||w - z||_q for z on the torus and any w.
TEST(Normalize, ContractionProperty) {
  Xoshiro256pp rng(31);
  const QNorm qs[] = {QNorm::kOne, QNorm::kTwo, QNorm::kInf};
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 16);
    const CVector w = random_gaussian(n, rng, 2.0);
    const CVector z = random_phases(n, rng);
    const CVector v = normalize_entrywise(w).vec();
    for (QNorm q : qs) {
      EXPECT_LE(vector_norm(CVector(v - z), q),
                2.0 * vector_norm(CVector(w - z), q) + 1e-12);
    }
  }
  // Explicit zero entries under the unit-one policy.
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 8);
    CVector w = random_gaussian(n, rng);
    w(static_cast<Eigen::Index>(rng.next() % n)) = Complex(0, 0);
    const CVector z = random_phases(n, rng);
    const CVector v = normalize_entrywise(w, ZeroPolicy::kUnitOne).vec();
    for (QNorm q : qs) {
      EXPECT_LE(vector_norm(CVector(v - z), q),
                2.0 * vector_norm(CVector(w - z), q) + 1e-12);
    }
  }
}

TEST(Objective, RankOneAtTruth) {
  Xoshiro256pp rng(37);
  const int n = 12;
  const PhaseVector z(random_phases(n, rng));
  const HermitianMatrix c =
      HermitianMatrix::from_upper(z.vec() * z.vec().adjoint());
  EXPECT_NEAR(objective(c, z), static_cast<double>(n) * n, 1e-9 * n * n);
}

TEST(Objective, IdentityMatrix) {
  Xoshiro256pp rng(41);
  const int n = 9;
  const PhaseVector z(random_phases(n, rng));
  EXPECT_NEAR(objective(HermitianMatrix::identity(n), z),
              static_cast<double>(n), 1e-10 * n);
}

TEST(Objective, MatchesNaiveDoubleSum) {
  Xoshiro256pp rng(43);
  const int n = 4;
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) m(j, l) = rng.complex_normal();
  }
  const HermitianMatrix c = HermitianMatrix::from_upper(m);
  const PhaseVector z(random_phases(n, rng));
  EXPECT_NEAR(objective(c, z), oracles::naive_objective(c.mat(), z.vec()),
              1e-10 * n * n);
}

TEST(Objective, GlobalPhaseInvariant) {
  Xoshiro256pp rng(47);
  const int n = 10;
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) m(j, l) = rng.complex_normal();
  }
  const HermitianMatrix c = HermitianMatrix::from_upper(m);
  const PhaseVector z(random_phases(n, rng));
  const PhaseVector zr(CVector(std::polar(1.0, 1.9) * z.vec()));
  const double f0 = objective(c, z);
  EXPECT_NEAR(objective(c, zr), f0, 1e-9 * std::max(1.0, std::abs(f0)));
}

TEST(Objective, DimensionMismatch) {
  const PhaseVector z = PhaseVector::ones(3);
  EXPECT_THROW(objective(HermitianMatrix::identity(4), z), DimensionError);
}

TEST(HermitianMatrix, MirrorsUpperTriangleExactly) {
  Xoshiro256pp rng(53);
  CMatrix m(5, 5);
  for (int j = 0; j < 5; ++j) {
    for (int l = 0; l < 5; ++l) m(j, l) = rng.complex_normal();
  }
  const HermitianMatrix h = HermitianMatrix::from_upper(m);
  for (int j = 0; j < 5; ++j) {
    EXPECT_EQ(h.mat()(j, j).imag(), 0.0);
    for (int l = 0; l < 5; ++l) {
      EXPECT_EQ(h.mat()(j, l), std::conj(h.mat()(l, j)));
    }
  }
}
