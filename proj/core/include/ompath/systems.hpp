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

#pragma once

#include "ompath/system_model.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace ompath {

/// Nutrient-phytoplankton-zooplankton parameters. Defaults are the
/// bistable set (coexisting equilibrium plus a stable limit cycle).
struct NpzParams {
  double D = 0.1;
  double N0 = 9.96;
  double a = 1.0;
  double b = 1.0;
  double alpha = 1.0;
  double c = 5.0;
  double d = 0.1;
  double D1 = 0.2;
  double beta = 0.5;
  double D2 = 2.1;
  std::array<double, 3> sigma{1.0, 1.0, 1.0};

  /// Throws InvalidParams unless all rates are positive and sigma >= 0.
  void validate() const;
};

/// dx = (x − x³)dt + σ dW. Throws NonpositiveNoise for sigma <= 0.
SystemModel make_double_well(double sigma);

/// Maier-Stein drift (x − x³ − γxy², −(1 + x²)y) with multiplicative noise
/// diag(1 + εx², 1). Throws InvalidParams for epsilon < 0.
SystemModel make_maier_stein(double gamma, double epsilon);

/// NPZ drift with piecewise uptake f(N) = (b/a)N for N <= a, b for N > a,
/// grazing g(P) = cP/(1 + dP) and constant noise diag(σ₁, σ₂, σ₃). At the
/// kink N = a the lower branch is used for all derivatives. A zero sigma
/// component is accepted by validate() but rejected here as
/// SingularDiffusion, since the metric needs invertible noise.
SystemModel make_npz(const NpzParams& params);

/// Nutrient uptake f(N) and its one-sided derivative (lower branch at N = a).
double npz_uptake(const NpzParams& p, double n);
double npz_uptake_derivative(const NpzParams& p, double n);

/// Euclidean divergence of the NPZ drift (closed form, branch-wise).
double npz_divergence(const NpzParams& p, const Vector& x);

struct CustomSystemSpec {
  int dim = 0;
  VectorField drift;
  MatrixField diffusion;
  MatrixField drift_jacobian;      // optional
  TensorField diffusion_partials;  // optional
  std::string label = "custom";
  // Box [center − radius, center + radius]^d holding the verification probes.
  Vector probe_center;
  double probe_radius = 1.0;
  std::uint64_t probe_seed = 20260101;
};

/// Builds a validated model from callbacks. σσᵀ is checked at 20 random
/// probes (SingularDiffusion) and any analytic derivative is compared with
/// central differences there; a disagreement beyond 1e-4 relative raises
/// DerivativeMismatch.
SystemModel make_custom(const CustomSystemSpec& spec);

/// Linear drift A x + b₀ with constant diffusion S.
SystemModel make_linear(const Matrix& drift_matrix, const Vector& drift_offset,
                        const Matrix& diffusion, std::string label = "linear");

}  // namespace ompath
