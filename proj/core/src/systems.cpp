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

#include "ompath/systems.hpp"

#include "ompath/error.hpp"

#include <random>
#include <sstream>

namespace ompath {

namespace {

AnalyticOmTerms flat_om_terms(int dim, std::function<double(const Vector&)> divergence,
                              std::function<Vector(const Vector&)> divergence_gradient) {
  AnalyticOmTerms terms;
  terms.values = [dim, divergence](const Vector& x) {
    OmTerms t;
    t.drift_correction = Vector::Zero(dim);
    t.divergence = divergence(x);
    t.curvature = 0.0;
    return t;
  };
  terms.gradients = [dim, divergence_gradient](const Vector& x) {
    OmTermGradients g;
    g.drift_correction_jacobian = Matrix::Zero(dim, dim);
    g.divergence_gradient = divergence_gradient(x);
    g.curvature_gradient = Vector::Zero(dim);
    return g;
  };
  return terms;
}

}  // namespace

SystemModel make_double_well(double sigma) {
  if (!(sigma > 0.0)) {
    std::ostringstream os;
    os << "double-well noise intensity must be positive, got " << sigma;
    throw Error(ErrorCode::kNonpositiveNoise, os.str());
  }
  SystemDefinition def;
  def.dim = 1;
  def.noise_dim = 1;
  def.label = "double_well";
  def.drift = [](const Vector& x) {
    Vector f(1);
    f[0] = x[0] - x[0] * x[0] * x[0];
    return f;
  };
  def.diffusion = [sigma](const Vector&) { return Matrix::Constant(1, 1, sigma); };
  def.drift_jacobian = [](const Vector& x) { return Matrix::Constant(1, 1, 1.0 - 3.0 * x[0] * x[0]); };
  def.diffusion_partials = [](const Vector&) { return Tensor3(1); };
  def.om_terms = flat_om_terms(
      1, [](const Vector& x) { return 1.0 - 3.0 * x[0] * x[0]; },
      [](const Vector& x) { return Vector::Constant(1, -6.0 * x[0]); });
  return SystemModel(std::move(def));
}

SystemModel make_maier_stein(double gamma, double epsilon) {
  if (!(epsilon >= 0.0)) {
    std::ostringstream os;
    os << "Maier-Stein epsilon must be nonnegative, got " << epsilon;
    throw Error(ErrorCode::kInvalidParams, os.str());
  }
  SystemDefinition def;
  def.dim = 2;
  def.noise_dim = 2;
  def.label = "maier_stein";
  def.drift = [gamma](const Vector& z) {
    const double x = z[0];
    const double y = z[1];
    Vector f(2);
    f[0] = x - x * x * x - gamma * x * y * y;
    f[1] = -(1.0 + x * x) * y;
    return f;
  };
  def.diffusion = [epsilon](const Vector& z) {
    Matrix s = Matrix::Identity(2, 2);
    s(0, 0) = 1.0 + epsilon * z[0] * z[0];
    return s;
  };
  def.drift_jacobian = [gamma](const Vector& z) {
    const double x = z[0];
    const double y = z[1];
    Matrix j(2, 2);
    j << 1.0 - 3.0 * x * x - gamma * y * y, -2.0 * gamma * x * y,
        -2.0 * x * y, -(1.0 + x * x);
    return j;
  };
  def.diffusion_partials = [epsilon](const Vector& z) {
    Tensor3 t(2);
    t(0, 0, 0) = 2.0 * epsilon * z[0];
    return t;
  };

  // c = σ⁻¹(b̃ − b) = (−εx, 0); R = 0 for this diagonal metric.
  AnalyticOmTerms terms;
  terms.values = [gamma, epsilon](const Vector& z) {
    const double x = z[0];
    const double y = z[1];
    const double q = 1.0 + epsilon * x * x;
    const double b1 = x - x * x * x - gamma * x * y * y + epsilon * x + epsilon * epsilon * x * x * x;
    OmTerms t;
    t.drift_correction = Vector::Zero(2);
    t.drift_correction[0] = -epsilon * x;
    t.divergence = -4.0 * x * x - gamma * y * y + epsilon + 3.0 * epsilon * epsilon * x * x -
                   2.0 * epsilon * x * b1 / q;
    t.curvature = 0.0;
    return t;
  };
  terms.gradients = [gamma, epsilon](const Vector& z) {
    const double x = z[0];
    const double y = z[1];
    const double q = 1.0 + epsilon * x * x;
    const double b1 = x - x * x * x - gamma * x * y * y + epsilon * x + epsilon * epsilon * x * x * x;
    const double b1_x = 1.0 - 3.0 * x * x - gamma * y * y + epsilon + 3.0 * epsilon * epsilon * x * x;
    const double b1_y = -2.0 * gamma * x * y;
    const double tail_x = 2.0 * epsilon * b1 / q + 2.0 * epsilon * x * b1_x / q -
                          4.0 * epsilon * epsilon * x * x * b1 / (q * q);
    const double tail_y = 2.0 * epsilon * x * b1_y / q;
    OmTermGradients g;
    g.drift_correction_jacobian = Matrix::Zero(2, 2);
    g.drift_correction_jacobian(0, 0) = -epsilon;
    g.divergence_gradient = Vector(2);
    g.divergence_gradient[0] = -8.0 * x + 6.0 * epsilon * epsilon * x - tail_x;
    g.divergence_gradient[1] = -2.0 * gamma * y - tail_y;
    g.curvature_gradient = Vector::Zero(2);
    return g;
  };
  def.om_terms = std::move(terms);
  return SystemModel(std::move(def));
}

void NpzParams::validate() const {
  const std::array<std::pair<const char*, double>, 10> rates{{{"D", D},
                                                               {"N0", N0},
                                                               {"a", a},
                                                               {"b", b},
                                                               {"alpha", alpha},
                                                               {"c", c},
                                                               {"d", d},
                                                               {"D1", D1},
                                                               {"beta", beta},
                                                               {"D2", D2}}};
  for (const auto& [name, value] : rates) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      std::ostringstream os;
      os << "NPZ parameter " << name << " must be positive and finite, got " << value;
      throw Error(ErrorCode::kInvalidParams, os.str());
    }
  }
  for (double s : sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidParams, "NPZ noise intensities must be nonnegative");
    }
  }
}

double npz_uptake(const NpzParams& p, double n) { return n <= p.a ? p.b / p.a * n : p.b; }

double npz_uptake_derivative(const NpzParams& p, double n) { return n <= p.a ? p.b / p.a : 0.0; }

double npz_divergence(const NpzParams& p, const Vector& x) {
  const double phyto = x[1];
  const double zoo = x[2];
  const double q = 1.0 + p.d * phyto;
  return -p.D - npz_uptake_derivative(p, x[0]) * phyto + p.alpha * npz_uptake(p, x[0]) - p.D1 -
         zoo * p.c / (q * q) + p.beta * p.c * phyto / q - p.D2;
}

SystemModel make_npz(const NpzParams& params) {
  params.validate();
  const NpzParams p = params;
  auto grazing = [p](double phyto) { return p.c * phyto / (1.0 + p.d * phyto); };
  auto grazing_derivative = [p](double phyto) {
    const double q = 1.0 + p.d * phyto;
    return p.c / (q * q);
  };

  SystemDefinition def;
  def.dim = 3;
  def.noise_dim = 3;
  def.label = "npz";
  def.drift = [p, grazing](const Vector& x) {
    const double f = npz_uptake(p, x[0]);
    const double g = grazing(x[1]);
    Vector out(3);
    out[0] = p.D * (p.N0 - x[0]) - f * x[1];
    out[1] = p.alpha * f * x[1] - g * x[2] - p.D1 * x[1];
    out[2] = p.beta * g * x[2] - p.D2 * x[2];
    return out;
  };
  def.diffusion = [p](const Vector&) {
    Matrix s = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) s(i, i) = p.sigma[i];
    return s;
  };
  def.drift_jacobian = [p, grazing, grazing_derivative](const Vector& x) {
    const double f = npz_uptake(p, x[0]);
    const double df = npz_uptake_derivative(p, x[0]);
    const double g = grazing(x[1]);
    const double dg = grazing_derivative(x[1]);
    Matrix j(3, 3);
    j << -p.D - df * x[1], -f, 0.0,
        p.alpha * df * x[1], p.alpha * f - dg * x[2] - p.D1, -g,
        0.0, p.beta * dg * x[2], p.beta * g - p.D2;
    return j;
  };
  def.diffusion_partials = [](const Vector&) { return Tensor3(3); };
  def.om_terms = flat_om_terms(
      3, [p](const Vector& x) { return npz_divergence(p, x); },
      [p](const Vector& x) {
        const double q = 1.0 + p.d * x[1];
        Vector g(3);
        g[0] = x[0] <= p.a ? p.alpha * p.b / p.a : 0.0;
        g[1] = -npz_uptake_derivative(p, x[0]) + 2.0 * x[2] * p.c * p.d / (q * q * q) +
               p.beta * p.c / (q * q);
        g[2] = -p.c / (q * q);
        return g;
      });

  SystemModel model(std::move(def));
  for (int i = 0; i < 3; ++i) {
    if (!(params.sigma[i] > 0.0)) {
      std::ostringstream os;
      os << "NPZ noise component " << i + 1 << " is zero; sigma*sigma^T is singular";
      throw Error(ErrorCode::kSingularDiffusion, os.str());
    }
  }
  return model;
}

namespace {

double relative_gap(double analytic, double reference) {
  return std::abs(analytic - reference) / std::max(1.0, std::abs(reference));
}

}  // namespace

SystemModel make_custom(const CustomSystemSpec& spec) {
  SystemDefinition def;
  def.dim = spec.dim;
  def.noise_dim = spec.dim;
  def.drift = spec.drift;
  def.diffusion = spec.diffusion;
  def.drift_jacobian = spec.drift_jacobian;
  def.diffusion_partials = spec.diffusion_partials;
  def.label = spec.label;
  SystemModel model(std::move(def));

  const int d = spec.dim;
  const Vector center = spec.probe_center.size() == d ? spec.probe_center : Vector::Zero(d);
  std::mt19937_64 rng(spec.probe_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  constexpr int kProbes = 20;
  constexpr double kTolerance = 1e-4;

  for (int probe = 0; probe < kProbes; ++probe) {
    Vector x(d);
    for (int i = 0; i < d; ++i) x[i] = center[i] + spec.probe_radius * unit(rng);
    model.check_diffusion(x);

    if (model.has_analytic_drift_jacobian()) {
      const Matrix a = model.drift_jacobian(x);
      const Matrix f = model.drift_jacobian_fd(x);
      if (a.rows() != d || a.cols() != d) {
        throw Error(ErrorCode::kDimensionMismatch, "drift Jacobian has the wrong shape");
      }
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          if (relative_gap(a(i, j), f(i, j)) > kTolerance) {
            std::ostringstream os;
            os << "drift Jacobian entry (" << i << "," << j << ") is " << a(i, j)
               << " but finite differences give " << f(i, j) << " at x = [" << x.transpose()
               << "]";
            throw Error(ErrorCode::kDerivativeMismatch, os.str());
          }
        }
      }
    }
    if (model.has_analytic_diffusion_partials()) {
      const Tensor3 a = model.diffusion_partials(x);
      const Tensor3 f = model.diffusion_partials_fd(x);
      if (a.size() != d) {
        throw Error(ErrorCode::kDimensionMismatch, "diffusion partials have the wrong shape");
      }
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          for (int l = 0; l < d; ++l) {
            if (relative_gap(a(i, j, l), f(i, j, l)) > kTolerance) {
              std::ostringstream os;
              os << "diffusion partial d sigma_" << i << j << "/dx_" << l << " is " << a(i, j, l)
                 << " but finite differences give " << f(i, j, l);
              throw Error(ErrorCode::kDerivativeMismatch, os.str());
            }
          }
        }
      }
    }
  }
  return model;
}

SystemModel make_linear(const Matrix& drift_matrix, const Vector& drift_offset,
                        const Matrix& diffusion, std::string label) {
  const int d = static_cast<int>(drift_matrix.rows());
  if (drift_matrix.cols() != d || drift_offset.size() != d || diffusion.rows() != d ||
      diffusion.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "linear system blocks must be d x d, d and d x d");
  }
  CustomSystemSpec spec;
  spec.dim = d;
  spec.label = std::move(label);
  spec.drift = [drift_matrix, drift_offset](const Vector& x) -> Vector {
    return drift_matrix * x + drift_offset;
  };
  spec.diffusion = [diffusion](const Vector&) -> Matrix { return diffusion; };
  spec.drift_jacobian = [drift_matrix](const Vector&) -> Matrix { return drift_matrix; };
  spec.diffusion_partials = [d](const Vector&) { return Tensor3(d); };
  return make_custom(spec);
}

}  // namespace ompath
