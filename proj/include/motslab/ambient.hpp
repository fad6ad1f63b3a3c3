#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "motslab/core.hpp"

namespace motslab::ambient {

/// Chart domain: a coordinate box with periodicity flags, optionally
/// excluding a ball around the coordinate origin (isotropic-type charts).
struct ChartDomain {
  Vec3 lo = Vec3::Constant(-1e9);
  Vec3 hi = Vec3::Constant(1e9);
  std::array<bool, 3> periodic = {false, false, false};
  double radial_min = 0.0;

  bool contains(const Vec3& p, double margin = 0.0) const {
    for (int i = 0; i < 3; ++i) {
      if (periodic[i]) continue;
      if (p[i] < lo[i] + margin || p[i] > hi[i] - margin) return false;
    }
    if (radial_min > 0.0 && p.norm() < radial_min + margin) return false;
    return true;
  }
};

/// An analytic Riemannian chart (M, g, K): metric and extrinsic-curvature
/// evaluators plus optional closed-form derivative/curvature data. Immutable
/// after construction; all evaluators are pure.
struct AmbientModel {
  std::string name;
  int dim = 3;
  ChartDomain chart_domain;
  std::string description;

  std::function<Mat3(const Vec3&)> metric_eval;
  std::function<Mat3(const Vec3&)> extrinsic_eval;  // K_ij; nullptr means 0

  // Closed forms; when absent the finite-difference pipeline is used.
  std::function<std::array<Mat3, 3>(const Vec3&)> metric_deriv_eval;
  std::function<std::array<Mat3, 3>(const Vec3&)> extrinsic_deriv_eval;
  std::function<void(const Vec3&, Mat3& ricci, double& scalar)> closed_form_curvature;

  double fd_step = 1e-2;  // centered 4th-order stencil step

  // Brane potential form Lambda = (lambda_coefficient(t) + lambda_offset)
  // dx^1 ^ dx^2 for models that register one (hyperbolic g1 / cusp).
  std::function<double(double)> lambda_coefficient;
  double lambda_offset = 0.0;

  // Sampling box for validation draws.
  Vec3 sample_lo = Vec3::Constant(-2.0), sample_hi = Vec3::Constant(2.0);

  bool time_symmetric() const { return !extrinsic_eval; }
};

struct CurvatureSample {
  Vec3 point;
  std::array<Mat3, 3> christoffel;  // christoffel[k](i,j) = Gamma^k_ij
  Mat3 ricci;
  double scalar = 0.0;

  /// Ric(v, v) for a chart-component vector v (typically a g-unit normal).
  double ric_nn(const Vec3& v) const { return v.dot(ricci * v); }
};

/// Everything the surface pipeline needs at one chart point.
struct AmbientPointData {
  Mat3 g, g_inv;
  std::array<Mat3, 3> gamma;
  Mat3 K = Mat3::Zero();
  std::array<Mat3, 3> dK = {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  Mat3 ricci = Mat3::Zero();
  double scalar = 0.0;
};

enum EvalFlags : unsigned {
  kEvalBase = 0,             // g, g_inv, Gamma, K
  kEvalCurvature = 1u << 0,  // + Ricci, scalar
  kEvalKDerivs = 1u << 1,    // + dK
};

/// Model specification: a catalog name plus numeric parameters; custom
/// conformally flat models additionally carry expression strings
/// (variables x, y, z, r) for psi and the K components.
struct ModelSpec {
  std::string name;
  std::map<std::string, double> params;
  std::map<std::string, std::string> exprs;
};

std::shared_ptr<const AmbientModel> builtin_model(
    const std::string& name, const std::map<std::string, double>& params = {});
std::shared_ptr<const AmbientModel> build_model(const ModelSpec& spec);

std::array<Mat3, 3> metric_derivs(const AmbientModel& model, const Vec3& p);
std::array<Mat3, 3> christoffels(const AmbientModel& model, const Vec3& p);

CurvatureSample curvature_at(const AmbientModel& model, const Vec3& p);

AmbientPointData ambient_at(const AmbientModel& model, const Vec3& p,
                            unsigned flags = kEvalBase);

struct ValidationReport {
  int sample_count = 0;
  unsigned seed = 0;
  double max_metric_asymmetry = 0.0;
  double max_extrinsic_asymmetry = 0.0;
  double min_metric_eigenvalue = 0.0;
  double max_curvature_discrepancy = 0.0;  // closed form vs finite differences
  bool has_closed_form = false;
  bool positive_definite = true;

  bool ok(double tol = 1e-6) const {
    return positive_definite && max_metric_asymmetry <= tol &&
           max_extrinsic_asymmetry <= tol &&
           (!has_closed_form || max_curvature_discrepancy <= tol);
  }
};

/// Randomized symmetry / positivity / closed-vs-FD checks; failures are
/// reported, not thrown. Deterministic for a fixed seed.
ValidationReport validate_model(const AmbientModel& model, int sample_count,
                                unsigned seed);

}  // namespace motslab::ambient
