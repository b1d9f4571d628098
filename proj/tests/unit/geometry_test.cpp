/*
 Copyright 2026 The ompath Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "ompath/geometry.hpp"
#include "ompath/systems.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace ompath {
namespace {

using testing::rel_err;
using testing::uniform_point;

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

// σ = (1 + |x|²)/2 · I, the round unit sphere in stereographic coordinates.
SystemModel sphere_system() {
  CustomSystemSpec spec;
  spec.dim = 2;
  spec.drift = [](const Vector& x) { return Vector(-x); };
  spec.diffusion = [](const Vector& x) {
    return Matrix(0.5 * (1.0 + x.squaredNorm()) * Matrix::Identity(2, 2));
  };
  spec.label = "sphere";
  return make_custom(spec);
}

// σ = diag(1 + 0.3 sin x, 1 + 0.2 y², 2 + cos z) with analytic partials when asked.
SystemModel diagonal_system(bool analytic) {
  CustomSystemSpec spec;
  spec.dim = 3;
  spec.drift = [](const Vector& x) { return vec({x[1] - x[0], -x[2], x[0] * x[1]}); };
  spec.diffusion = [](const Vector& x) {
    Matrix s = Matrix::Zero(3, 3);
    s(0, 0) = 1.0 + 0.3 * std::sin(x[0]);
    s(1, 1) = 1.0 + 0.2 * x[1] * x[1];
    s(2, 2) = 2.0 + std::cos(x[2]);
    return s;
  };
  if (analytic) {
    spec.diffusion_partials = [](const Vector& x) {
      Tensor3 t(3);
      t(0, 0, 0) = 0.3 * std::cos(x[0]);
      t(1, 1, 1) = 0.4 * x[1];
      t(2, 2, 2) = -std::sin(x[2]);
      return t;
    };
  }
  return make_custom(spec);
}

TEST(Metric, DoubleWellUnitNoiseIsOne) {
  const SystemModel s = make_double_well(1.0);
  for (double x : {-2.0, 0.0, 0.7}) EXPECT_DOUBLE_EQ(metric(s, vec({x}))(0, 0), 1.0);
}

TEST(Metric, MaierSteinClosedForm) {
  const SystemModel s = make_maier_stein(1.0, 0.3);
  const Vector z = vec({0.8, -0.4});
  EXPECT_LT((metric(s, z) - testing::maier_stein::metric(0.3, z)).norm(), 1e-14);
}

TEST(Metric, ConstantDiagonalInverts) {
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(0, 0) = 2.0;
  sigma(1, 1) = 1.0;
  const SystemModel s = make_linear(-Matrix::Identity(2, 2), Vector::Zero(2), sigma);
  const Matrix v = metric(s, vec({0.3, 0.1}));
  EXPECT_NEAR(v(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(v(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(v(0, 1), 0.0, 1e-15);
}

TEST(Christoffel, MaierSteinAtUnitX) {
  const SystemModel s = make_maier_stein(1.0, 0.5);
  const Tensor3 g = christoffel(s, vec({1.0, 0.5}));
  EXPECT_NEAR(g(0, 0, 0), -2.0 / 3.0, 1e-9);
  for (int i = 0; i < 2; ++i)
    for (int l = 0; l < 2; ++l)
      for (int j = 0; j < 2; ++j)
        if (i + l + j > 0) EXPECT_NEAR(g(i, l, j), 0.0, 1e-12);
}

TEST(Christoffel, ConstantNoiseVanishes) {
  const SystemModel s = make_linear(-Matrix::Identity(2, 2), Vector::Zero(2), 0.7 * Matrix::Identity(2, 2));
  EXPECT_EQ(christoffel(s, vec({1.0, -2.0})).max_abs(), 0.0);
}

TEST(Christoffel, AnalyticPartialsMatchDifferences) {
  const SystemModel a = diagonal_system(true);
  const SystemModel f = diagonal_system(false);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const Vector x = uniform_point(rng, 3, -1.5, 1.5);
    const Tensor3 ga = christoffel(a, x);
    const Tensor3 gf = christoffel(f, x);
    const double scale = std::max(1.0, ga.max_abs());
    for (int i = 0; i < 3; ++i)
      for (int l = 0; l < 3; ++l)
        for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(ga(i, l, j) - gf(i, l, j)) / scale, 1e-5);
  }
}

TEST(Christoffel, SymmetricInLowerIndices) {
  const SystemModel s = sphere_system();
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Tensor3 g = christoffel(s, uniform_point(rng, 2, -2, 2));
    for (int i = 0; i < 2; ++i)
      for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(g(i, l, j), g(i, j, l));
  }
}

TEST(ModifiedDrift, MaierSteinClosedForm) {
  std::mt19937_64 rng(11);
  for (double e : {0.0, 0.1, 0.5, 1.0}) {
    const SystemModel s = make_maier_stein(2.0, e);
    for (int k = 0; k < 20; ++k) {
      const Vector z = uniform_point(rng, 2, -2, 2);
      EXPECT_LT(rel_err(modified_drift(s, z), testing::maier_stein::modified_drift(2.0, e, z)), 1e-8);
    }
  }
}

TEST(ModifiedDrift, AdditiveNoiseKeepsDrift) {
  const SystemModel s = make_double_well(0.4);
  const Vector x = vec({0.3});
  EXPECT_NEAR(modified_drift(s, x)[0], s.drift(x)[0], 1e-15);
}

TEST(ModifiedDrift, MaierSteinPlugIn) {
  const SystemModel s = make_maier_stein(1.0, 0.1);
  EXPECT_NEAR(modified_drift(s, vec({1.0, 0.0}))[0], 0.11, 1e-10);
}

TEST(Divergence, MaierSteinClosedForm) {
  std::mt19937_64 rng(5);
  for (double e : {0.0, 0.1, 0.5, 1.0}) {
    const SystemModel s = make_maier_stein(1.0, e);
    for (int k = 0; k < 20; ++k) {
      const Vector z = uniform_point(rng, 2, -2, 2);
      EXPECT_LT(rel_err(riemannian_divergence(s, z), testing::maier_stein::divergence(1.0, e, z)), 1e-8);
    }
  }
}

TEST(Divergence, DoubleWellAtOrigin) {
  EXPECT_NEAR(riemannian_divergence(make_double_well(1.0), vec({0.0})), 1.0, 1e-9);
}

TEST(Divergence, NpzUpperBranchPlugIn) {
  const NpzParams p;
  const Vector x = vec({5.0, 1.0, 1.0});
  const double expected = -p.D + p.alpha * p.b - p.D1 - 1.0 * p.c / std::pow(1 + p.d, 2) +
                          p.beta * p.c / (1 + p.d) - p.D2;
  EXPECT_NEAR(riemannian_divergence(make_npz(p), x), expected, 1e-8);
}

TEST(Curvature, MaierSteinIsFlat) {
  std::mt19937_64 rng(2);
  for (double e : {0.1, 0.5, 1.0}) {
    const SystemModel s = make_maier_stein(1.0, e);
    for (int k = 0; k < 10; ++k) EXPECT_LT(std::abs(scalar_curvature(s, uniform_point(rng, 2, -2, 2))), 1e-6);
  }
}

TEST(Curvature, ConstantNoiseIsExactlyZero) {
  const SystemModel s = make_linear(-Matrix::Identity(3, 3), Vector::Zero(3), 1.5 * Matrix::Identity(3, 3));
  EXPECT_EQ(scalar_curvature(s, vec({0.1, 0.2, 0.3})), 0.0);
}

TEST(Curvature, OneDimensionIsFlat) {
  CustomSystemSpec spec;
  spec.dim = 1;
  spec.drift = [](const Vector& x) { return Vector(-x); };
  spec.diffusion = [](const Vector& x) { return Matrix::Constant(1, 1, 1.0 + 0.5 * std::sin(x[0])); };
  const SystemModel s = make_custom(spec);
  for (double x : {-1.0, 0.2, 0.9}) EXPECT_LT(std::abs(scalar_curvature(s, vec({x}))), 1e-6);
}

TEST(Curvature, UnitSphereHasTwo) {
  const SystemModel s = sphere_system();
  std::mt19937_64 rng(13);
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(scalar_curvature(s, uniform_point(rng, 2, -1, 1)), 2.0, 1e-5);
}

TEST(Curvature, HyperbolicPlaneHasMinusTwo) {
  // Poincaré half-plane: V = I / y², so σ = y·I.
  CustomSystemSpec spec;
  spec.dim = 2;
  spec.drift = [](const Vector& x) { return Vector(-x); };
  spec.diffusion = [](const Vector& x) { return Matrix(x[1] * Matrix::Identity(2, 2)); };
  spec.probe_center = vec({0.0, 3.0});
  const SystemModel s = make_custom(spec);
  for (double y : {0.5, 1.0, 2.0}) EXPECT_NEAR(scalar_curvature(s, vec({0.3, y})), -2.0, 1e-5);
}

TEST(FlatMetric, DegeneratesToEuclidean) {
  Matrix sigma(2, 2);
  sigma << 1.2, 0.3, -0.4, 0.9;
  CustomSystemSpec spec;
  spec.dim = 2;
  spec.drift = [](const Vector& x) { return vec({std::sin(x[1]) - x[0] * x[0] * x[0], x[0] * x[1]}); };
  spec.drift_jacobian = [](const Vector& x) {
    Matrix j(2, 2);
    j << -3 * x[0] * x[0], std::cos(x[1]), x[1], x[0];
    return j;
  };
  spec.diffusion = [sigma](const Vector&) { return sigma; };
  const SystemModel s = make_custom(spec);
  std::mt19937_64 rng(17);
  for (int k = 0; k < 100; ++k) {
    const Vector x = uniform_point(rng, 2, -2, 2);
    EXPECT_EQ(christoffel(s, x).max_abs(), 0.0);
    EXPECT_LT(rel_err(modified_drift(s, x), s.drift(x)), 1e-12);
    EXPECT_EQ(scalar_curvature(s, x), 0.0);
    EXPECT_LT(rel_err(riemannian_divergence(s, x), s.drift_jacobian(x).trace()), 1e-8);
  }
}

TEST(Lagrangian, VelocityAlongDriftLeavesPotentialTerms) {
  const SystemModel s = make_maier_stein(1.0, 0.4);
  const Vector z = vec({0.6, -0.3});
  const double expected = 0.5 * (riemannian_divergence(s, z) - scalar_curvature(s, z) / 6.0);
  EXPECT_NEAR(lagrangian_velocity(s, z, modified_drift(s, z)), expected, 1e-8);
}

TEST(Lagrangian, DoubleWellAtRest) {
  EXPECT_NEAR(lagrangian_velocity(make_double_well(1.0), vec({0.0}), vec({0.0})), 0.5, 1e-12);
}

TEST(Lagrangian, VelocityAndControlFormsAgree) {
  const SystemModel s = make_maier_stein(1.0, 0.5);
  std::mt19937_64 rng(23);
  for (int k = 0; k < 50; ++k) {
    const Vector z = uniform_point(rng, 2, -2, 2);
    const Vector v = uniform_point(rng, 2, -3, 3);
    const Vector theta = s.diffusion(z).inverse() * (v - s.drift(z));
    EXPECT_LT(rel_err(lagrangian_velocity(s, z, v), lagrangian_control(s, z, theta)), 1e-10);
  }
}

TEST(Lagrangian, AdditiveNoiseZeroControl) {
  const SystemModel s = make_double_well(1.0);
  const Vector x = vec({0.4});
  EXPECT_NEAR(lagrangian_control(s, x, vec({0.0})), 0.5 * (1 - 3 * 0.16), 1e-12);
}

TEST(Lagrangian, MaierSteinClosedForm) {
  std::mt19937_64 rng(29);
  for (double e : {0.0, 0.1, 0.5, 1.0}) {
    const SystemModel s = make_maier_stein(1.0, e);
    for (int k = 0; k < 20; ++k) {
      const Vector z = uniform_point(rng, 2, -2, 2);
      const Vector th = uniform_point(rng, 2, -2, 2);
      EXPECT_LT(rel_err(lagrangian_control(s, z, th), testing::maier_stein::lagrangian(1.0, e, z, th)), 1e-8);
    }
  }
}

TEST(Lagrangian, GenericSystemIdentity) {
  const SystemModel s = sphere_system();
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    const Vector x = uniform_point(rng, 2, -1, 1);
    const Vector th = uniform_point(rng, 2, -2, 2);
    const Vector v = s.drift(x) + s.diffusion(x) * th;
    EXPECT_LT(rel_err(lagrangian_control(s, x, th), lagrangian_velocity(s, x, v)), 1e-10);
  }
}

Trajectory line_path(double a, double b, double t0, double tf, int n) {
  Trajectory t;
  t.times = uniform_grid(t0, tf, n);
  t.states.resize(n, 1);
  for (int i = 0; i < n; ++i) t.states(i, 0) = a + (b - a) * i / std::max(1, n - 1);
  return t;
}

TEST(Action, CoincidentNodesGiveZero) {
  EXPECT_EQ(om_action(make_double_well(1.0), line_path(0.0, 0.0, 1.0, 1.0, 2)), 0.0);
}

TEST(Action, ConstantPathAtWell) {
  EXPECT_NEAR(om_action(make_double_well(1.0), line_path(1.0, 1.0, 0.0, 1.0, 101)), -1.0, 1e-12);
}

TEST(Action, StraightLineMatchesFineQuadrature) {
  // L(z, 2) along z = −1 + 2t, Simpson on 2·10⁵ panels.
  auto integrand = [](double t) {
    const double z = -1 + 2 * t;
    const double w = 2 - (z - z * z * z);
    return 0.5 * (w * w + 1 - 3 * z * z);
  };
  const int m = 200000;
  double simpson = integrand(0) + integrand(1);
  for (int i = 1; i < m; ++i) simpson += (i % 2 ? 4 : 2) * integrand(static_cast<double>(i) / m);
  simpson /= 3.0 * m;
  EXPECT_NEAR(om_action(make_double_well(1.0), line_path(-1, 1, 0, 1, 1000)), simpson, 1e-4);
}

}  // namespace
}  // namespace ompath
