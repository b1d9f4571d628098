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
#include "ompath/trajectory.hpp"

#include <vector>

namespace ompath {

/// Riemannian quantities of the metric V = (σσᵀ)⁻¹ at one state.
struct GeometryPoint {
  Vector x;
  Matrix metric_V;
  Matrix metric_inverse;
  Tensor3 christoffel;  // (i, l, j) = Γⁱ_{lj}
  Vector modified_drift_b;
  double divergence_b = 0.0;
  double scalar_curvature_R = 0.0;
};

// The functions below always run the generic engine: metric partials come
// from the analytic diffusion partials when present (central differences
// otherwise), and every further derivative is a central difference. Analytic
// OmTerms attached to the system are ignored here; see om_terms().

/// V(x) = (σσᵀ)⁻¹, symmetric positive definite. Throws SingularDiffusion.
Matrix metric(const SystemModel& system, const Vector& x);

/// ∂V/∂xₗ for l = 0..d-1.
std::vector<Matrix> metric_partials(const SystemModel& system, const Vector& x);

/// Γⁱ_{lj} = ½ Σₘ gⁱᵐ(∂ⱼ g_{lm} + ∂ₗ g_{jm} − ∂ₘ g_{lj}); exactly symmetric in (l, j).
Tensor3 christoffel(const SystemModel& system, const Vector& x);

/// bⁱ = b̃ⁱ − ½ Σ_{l,j} (V⁻¹)^{lj} Γⁱ_{lj}.
Vector modified_drift(const SystemModel& system, const Vector& x);

/// div b = |V|^{-1/2} Σᵢ ∂ᵢ(bⁱ |V|^{1/2}), by central differences of the product.
double riemannian_divergence(const SystemModel& system, const Vector& x);

/// Scalar curvature R = gⁱᵏ R_{ik} of the metric V, with
/// R_{ik} = ∂ₘΓᵐ_{ik} − ∂ₖΓᵐ_{im} + Γᵐ_{ma}Γᵃ_{ik} − Γᵐ_{ka}Γᵃ_{im}
/// (positive on round spheres). Christoffel derivatives use a nested
/// central stencil of step 1e-4.
double scalar_curvature(const SystemModel& system, const Vector& x);

GeometryPoint evaluate_geometry(const SystemModel& system, const Vector& x);

/// Correction, divergence and curvature entering the Lagrangian. Uses the
/// system's analytic OmTerms when attached, the generic engine otherwise.
OmTerms om_terms(const SystemModel& system, const Vector& x);

/// Same quantities, always from the generic engine.
OmTerms om_terms_generic(const SystemModel& system, const Vector& x);

/// L(z, ż) = ½[(ż − b)ᵀV(ż − b) + div b − R/6].
double lagrangian_velocity(const SystemModel& system, const Vector& x, const Vector& v);

/// L(x, θ) = ½[(σθ + Δ)ᵀV(σθ + Δ) + div b − R/6] with Δ = b̃ − b, i.e. the
/// velocity form evaluated at ż = b̃ + σθ.
double lagrangian_control(const SystemModel& system, const Vector& x, const Vector& theta);

/// Trapezoidal Onsager-Machlup action of `traj.states`, with ż from centered
/// differences inside the grid and one-sided differences at both ends.
/// Throws DegenerateGrid for fewer than 2 nodes or nonuniform spacing.
double om_action(const SystemModel& system, const Trajectory& traj);

/// Finite-difference velocities used by om_action (n x d).
Matrix path_velocities(const Trajectory& traj);

}  // namespace ompath
