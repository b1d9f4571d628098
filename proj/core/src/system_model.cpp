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

#include "ompath/system_model.hpp"

#include "ompath/error.hpp"

#include <sstream>

namespace ompath {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularDiffusion: return "SingularDiffusion";
    case ErrorCode::kDegenerateGrid: return "DegenerateGrid";
    case ErrorCode::kInvalidHorizon: return "InvalidHorizon";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNumericalBlowup: return "NumericalBlowup";
    case ErrorCode::kAscentStall: return "AscentStall";
    case ErrorCode::kNonpositiveNoise: return "NonpositiveNoise";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kDerivativeMismatch: return "DerivativeMismatch";
    case ErrorCode::kEmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

SystemModel::SystemModel(SystemDefinition definition) {
  if (definition.dim <= 0) {
    throw Error(ErrorCode::kDimensionMismatch, "state dimension must be positive");
  }
  if (definition.noise_dim == 0) definition.noise_dim = definition.dim;
  if (definition.noise_dim != definition.dim) {
    std::ostringstream os;
    os << "noise dimension " << definition.noise_dim << " differs from state dimension "
       << definition.dim << "; only square diffusion is supported";
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
  if (!definition.drift || !definition.diffusion) {
    throw Error(ErrorCode::kInvalidArgument, "drift and diffusion callbacks are required");
  }
  if (static_cast<bool>(definition.om_terms.values) !=
      static_cast<bool>(definition.om_terms.gradients)) {
    throw Error(ErrorCode::kInvalidArgument,
                "analytic Onsager-Machlup terms need both values and gradients");
  }
  def_ = std::make_shared<const SystemDefinition>(std::move(definition));
}

void SystemModel::check_dim(const Vector& x) const {
  if (x.size() != def_->dim) {
    std::ostringstream os;
    os << "state has dimension " << x.size() << ", system '" << def_->label << "' expects "
       << def_->dim;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

Vector SystemModel::drift(const Vector& x) const {
  check_dim(x);
  return def_->drift(x);
}

Matrix SystemModel::diffusion(const Vector& x) const {
  check_dim(x);
  Matrix s = def_->diffusion(x);
  if (s.rows() != def_->dim || s.cols() != def_->dim) {
    std::ostringstream os;
    os << "diffusion returned " << s.rows() << "x" << s.cols() << ", expected " << def_->dim
       << "x" << def_->dim;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
  return s;
}

Matrix SystemModel::drift_jacobian(const Vector& x) const {
  if (def_->drift_jacobian) {
    check_dim(x);
    return def_->drift_jacobian(x);
  }
  return drift_jacobian_fd(x);
}

Tensor3 SystemModel::diffusion_partials(const Vector& x) const {
  if (def_->diffusion_partials) {
    check_dim(x);
    return def_->diffusion_partials(x);
  }
  return diffusion_partials_fd(x);
}

Matrix SystemModel::drift_jacobian_fd(const Vector& x) const {
  check_dim(x);
  const int d = def_->dim;
  Matrix jac(d, d);
  Vector xp = x;
  Vector xm = x;
  for (int j = 0; j < d; ++j) {
    const double h = fd_step(x[j]);
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    jac.col(j) = (def_->drift(xp) - def_->drift(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return jac;
}

Tensor3 SystemModel::diffusion_partials_fd(const Vector& x) const {
  check_dim(x);
  const int d = def_->dim;
  Tensor3 out(d);
  Vector xp = x;
  Vector xm = x;
  for (int l = 0; l < d; ++l) {
    const double h = fd_step(x[l]);
    xp[l] = x[l] + h;
    xm[l] = x[l] - h;
    const Matrix ds = (def_->diffusion(xp) - def_->diffusion(xm)) / (2.0 * h);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out(i, j, l) = ds(i, j);
    xp[l] = x[l];
    xm[l] = x[l];
  }
  return out;
}

void SystemModel::check_diffusion(const Vector& x) const {
  const Matrix s = diffusion(x);
  const Matrix a = s * s.transpose();
  const double smallest = Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff();
  if (!(smallest > 1e-12)) {
    std::ostringstream os;
    os << "smallest eigenvalue of sigma*sigma^T is " << smallest << " at x = ["
       << x.transpose() << "] in system '" << def_->label << "'";
    throw Error(ErrorCode::kSingularDiffusion, os.str());
  }
}

}  // namespace ompath
