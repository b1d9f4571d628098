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

#include "ompath/error.hpp"

namespace ompath {

namespace {

constexpr double kCurvatureStep = 1e-4;

double curvature_step(double xi) { return std::max(kCurvatureStep, kCurvatureStep * std::abs(xi)); }

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// σσᵀ is the inverse metric gⁱʲ; no inversion needed.
Matrix inverse_metric(const SystemModel& system, const Vector& x) {
  system.check_diffusion(x);
  const Matrix s = system.diffusion(x);
  return s * s.transpose();
}

double sqrt_det_metric(const SystemModel& system, const Vector& x) {
  return 1.0 / std::sqrt(inverse_metric(system, x).determinant());
}

Tensor3 christoffel_from(const Matrix& g_inv, const std::vector<Matrix>& dg) {
  const int d = static_cast<int>(g_inv.rows());
  Tensor3 gamma(d);
  for (int i = 0; i < d; ++i) {
    for (int l = 0; l < d; ++l) {
      for (int j = l; j < d; ++j) {
        double acc = 0.0;
        for (int m = 0; m < d; ++m) {
          acc += g_inv(i, m) * (dg[j](l, m) + dg[l](j, m) - dg[m](l, j));
        }
        gamma(i, l, j) = 0.5 * acc;
        gamma(i, j, l) = 0.5 * acc;
      }
    }
  }
  return gamma;
}

Vector modified_drift_from(const Vector& drift, const Matrix& g_inv, const Tensor3& gamma) {
  const int d = static_cast<int>(drift.size());
  Vector b = drift;
  for (int i = 0; i < d; ++i) {
    double acc = 0.0;
    for (int l = 0; l < d; ++l)
      for (int j = 0; j < d; ++j) acc += g_inv(l, j) * gamma(i, l, j);
    b[i] -= 0.5 * acc;
  }
  return b;
}

double curvature_from(const SystemModel& system, const Vector& x, const Matrix& g_inv,
                      const Tensor3& gamma) {
  const int d = system.dim();
  // dgamma[m](i, l, j) = ∂ₘ Γⁱ_{lj}
  std::vector<Tensor3> dgamma;
  dgamma.reserve(d);
  Vector xp = x;
  Vector xm = x;
  for (int m = 0; m < d; ++m) {
    const double h = curvature_step(x[m]);
    xp[m] = x[m] + h;
    xm[m] = x[m] - h;
    const Tensor3 gp = christoffel(system, xp);
    const Tensor3 gm = christoffel(system, xm);
    Tensor3 dg(d);
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l)
        for (int j = 0; j < d; ++j) dg(i, l, j) = (gp(i, l, j) - gm(i, l, j)) / (2.0 * h);
    dgamma.push_back(std::move(dg));
    xp[m] = x[m];
    xm[m] = x[m];
  }

  double r = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      if (g_inv(i, k) == 0.0) continue;
      double ricci = 0.0;
      for (int m = 0; m < d; ++m) {
        ricci += dgamma[m](m, i, k) - dgamma[k](m, i, m);
        for (int a = 0; a < d; ++a) {
          ricci += gamma(m, m, a) * gamma(a, i, k) - gamma(m, k, a) * gamma(a, i, m);
        }
      }
      r += g_inv(i, k) * ricci;
    }
  }
  return r;
}

}  // namespace

Matrix metric(const SystemModel& system, const Vector& x) {
  const Matrix g_inv = inverse_metric(system, x);
  return symmetrized(g_inv.inverse());
}

std::vector<Matrix> metric_partials(const SystemModel& system, const Vector& x) {
  const int d = system.dim();
  std::vector<Matrix> out;
  out.reserve(d);
  if (system.has_analytic_diffusion_partials()) {
    const Matrix s = system.diffusion(x);
    const Matrix v = metric(system, x);
    const Tensor3 ds = system.diffusion_partials(x);
    for (int l = 0; l < d; ++l) {
      Matrix dsl(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) dsl(i, j) = ds(i, j, l);
      const Matrix da = dsl * s.transpose() + s * dsl.transpose();
      out.push_back(symmetrized(-v * da * v));
    }
    return out;
  }
  Vector xp = x;
  Vector xm = x;
  for (int l = 0; l < d; ++l) {
    const double h = fd_step(x[l]);
    xp[l] = x[l] + h;
    xm[l] = x[l] - h;
    out.push_back((metric(system, xp) - metric(system, xm)) / (2.0 * h));
    xp[l] = x[l];
    xm[l] = x[l];
  }
  return out;
}

Tensor3 christoffel(const SystemModel& system, const Vector& x) {
  return christoffel_from(inverse_metric(system, x), metric_partials(system, x));
}

Vector modified_drift(const SystemModel& system, const Vector& x) {
  const Matrix g_inv = inverse_metric(system, x);
  return modified_drift_from(system.drift(x), g_inv,
                             christoffel_from(g_inv, metric_partials(system, x)));
}

double riemannian_divergence(const SystemModel& system, const Vector& x) {
  const int d = system.dim();
  double acc = 0.0;
  Vector xp = x;
  Vector xm = x;
  for (int i = 0; i < d; ++i) {
    const double h = fd_step(x[i]);
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fp = modified_drift(system, xp)[i] * sqrt_det_metric(system, xp);
    const double fm = modified_drift(system, xm)[i] * sqrt_det_metric(system, xm);
    acc += (fp - fm) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return acc / sqrt_det_metric(system, x);
}

double scalar_curvature(const SystemModel& system, const Vector& x) {
  const Matrix g_inv = inverse_metric(system, x);
  return curvature_from(system, x, g_inv, christoffel_from(g_inv, metric_partials(system, x)));
}

GeometryPoint evaluate_geometry(const SystemModel& system, const Vector& x) {
  GeometryPoint gp;
  gp.x = x;
  gp.metric_inverse = inverse_metric(system, x);
  gp.metric_V = symmetrized(gp.metric_inverse.inverse());
  gp.christoffel = christoffel_from(gp.metric_inverse, metric_partials(system, x));
  gp.modified_drift_b = modified_drift_from(system.drift(x), gp.metric_inverse, gp.christoffel);
  gp.divergence_b = riemannian_divergence(system, x);
  gp.scalar_curvature_R = curvature_from(system, x, gp.metric_inverse, gp.christoffel);
  return gp;
}

OmTerms om_terms_generic(const SystemModel& system, const Vector& x) {
  const GeometryPoint gp = evaluate_geometry(system, x);
  OmTerms t;
  const Matrix s = system.diffusion(x);
  t.drift_correction = s.partialPivLu().solve(system.drift(x) - gp.modified_drift_b);
  t.divergence = gp.divergence_b;
  t.curvature = gp.scalar_curvature_R;
  return t;
}

OmTerms om_terms(const SystemModel& system, const Vector& x) {
  if (const AnalyticOmTerms* analytic = system.analytic_om_terms()) {
    if (x.size() != system.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "state dimension does not match system");
    }
    system.check_diffusion(x);
    return analytic->values(x);
  }
  return om_terms_generic(system, x);
}

double lagrangian_velocity(const SystemModel& system, const Vector& x, const Vector& v) {
  const OmTerms t = om_terms(system, x);
  const Matrix s = system.diffusion(x);
  const Vector b = system.drift(x) - s * t.drift_correction;
  const Vector w = v - b;
  return 0.5 * (w.dot(metric(system, x) * w) + t.divergence - t.curvature / 6.0);
}

double lagrangian_control(const SystemModel& system, const Vector& x, const Vector& theta) {
  if (theta.size() != system.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "control dimension does not match system");
  }
  const OmTerms t = om_terms(system, x);
  const Matrix s = system.diffusion(x);
  const Vector u = s * (theta + t.drift_correction);
  return 0.5 * (u.dot(metric(system, x) * u) + t.divergence - t.curvature / 6.0);
}

Matrix path_velocities(const Trajectory& traj) {
  const int n = traj.nodes();
  const double h = traj.spacing();
  Matrix v(n, traj.dim());
  if (h == 0.0) {
    v.setZero();
    return v;
  }
  v.row(0) = (traj.states.row(1) - traj.states.row(0)) / h;
  v.row(n - 1) = (traj.states.row(n - 1) - traj.states.row(n - 2)) / h;
  for (int i = 1; i + 1 < n; ++i) {
    v.row(i) = (traj.states.row(i + 1) - traj.states.row(i - 1)) / (2.0 * h);
  }
  return v;
}

double om_action(const SystemModel& system, const Trajectory& traj) {
  traj.validate();
  const double h = traj.spacing();
  if (h == 0.0) return 0.0;
  const Matrix v = path_velocities(traj);
  const int n = traj.nodes();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * lagrangian_velocity(system, traj.states.row(i).transpose(), v.row(i).transpose());
  }
  return acc * h;
}

}  // namespace ompath
