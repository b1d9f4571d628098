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

#include "ompath/types.hpp"

#include <functional>
#include <memory>
#include <string>

namespace ompath {

using VectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;
using TensorField = std::function<Tensor3(const Vector&)>;

/// Noise-induced terms of the control-form Lagrangian
///
///   L(x, θ) = ½[|θ + c(x)|² + div b(x) − R(x)/6],
///
/// where c = σ⁻¹(b̃ − b) is the drift correction expressed in noise
/// coordinates, div b the Riemannian divergence of the modified drift and R
/// the scalar curvature of V = (σσᵀ)⁻¹.
struct OmTerms {
  Vector drift_correction;
  double divergence = 0.0;
  double curvature = 0.0;
};

struct OmTermGradients {
  Matrix drift_correction_jacobian;  // ∂cᵢ/∂xⱼ
  Vector divergence_gradient;
  Vector curvature_gradient;
};

/// Closed forms a system may attach for the terms above. Both callbacks must
/// be set together; the generic geometry engine is used otherwise.
struct AnalyticOmTerms {
  std::function<OmTerms(const Vector&)> values;
  std::function<OmTermGradients(const Vector&)> gradients;

  explicit operator bool() const { return values && gradients; }
};

/// Everything needed to define dX = b̃(X)dt + σ(X)dB in ℝ^d.
struct SystemDefinition {
  int dim = 0;
  int noise_dim = 0;
  VectorField drift;
  MatrixField diffusion;
  MatrixField drift_jacobian;     // optional, ∂b̃ⁱ/∂xʲ
  TensorField diffusion_partials;  // optional, (i, j, l) = ∂σᵢⱼ/∂xₗ
  AnalyticOmTerms om_terms;        // optional
  std::string label;
};

/// Central-difference step used for all first derivatives of model callbacks.
inline double fd_step(double xi) { return std::max(1e-5, 1e-5 * std::abs(xi)); }

/// Immutable SDE model. Cheap to copy; copies share the same callbacks.
///
/// Only square diffusion (noise_dim == dim) is accepted, since the
/// Onsager-Machlup metric needs σσᵀ invertible.
class SystemModel {
 public:
  explicit SystemModel(SystemDefinition definition);

  int dim() const noexcept { return def_->dim; }
  const std::string& label() const noexcept { return def_->label; }

  Vector drift(const Vector& x) const;
  Matrix diffusion(const Vector& x) const;

  /// Analytic when supplied, central differences of `drift` otherwise.
  Matrix drift_jacobian(const Vector& x) const;
  /// Analytic when supplied, central differences of `diffusion` otherwise.
  Tensor3 diffusion_partials(const Vector& x) const;

  bool has_analytic_drift_jacobian() const noexcept { return static_cast<bool>(def_->drift_jacobian); }
  bool has_analytic_diffusion_partials() const noexcept {
    return static_cast<bool>(def_->diffusion_partials);
  }
  const AnalyticOmTerms* analytic_om_terms() const noexcept {
    return def_->om_terms ? &def_->om_terms : nullptr;
  }

  /// Central-difference reference derivatives, ignoring analytic callbacks.
  Matrix drift_jacobian_fd(const Vector& x) const;
  Tensor3 diffusion_partials_fd(const Vector& x) const;

  /// Throws SingularDiffusion unless the smallest eigenvalue of σσᵀ at x
  /// exceeds 1e-12.
  void check_diffusion(const Vector& x) const;

 private:
  void check_dim(const Vector& x) const;

  std::shared_ptr<const SystemDefinition> def_;
};

}  // namespace ompath
