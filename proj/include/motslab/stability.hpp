#pragma once

#include "motslab/constraint.hpp"
#include "motslab/surface.hpp"

namespace motslab::stability {

enum class OperatorKind { L_minimal, L0_symmetrized, L_bar_mots, L_brane };

const char* to_string(OperatorKind k);

/// Discretized stability operator acting on nodal functions.
///
/// All kinds share the quadrature-weak Laplace-Beltrami block, which is
/// exactly self-adjoint in the inner product <u, v> = sum_k mass_k u_k v_k;
/// L_bar additionally carries the first-order drift 2 <X, grad phi>.
struct OperatorMatrix {
  OperatorKind kind;
  Eigen::MatrixXd matrix;
  bool symmetric_flag = true;
  Field potential;           // zeroth-order coefficient
  VecField drift;            // X (frame components; zero unless L_bar)
  Field mass;                // quadrature mass diagonal
  std::shared_ptr<const surface::SurfaceGeometry> surface_ref;

  Field apply(const Field& f) const { return (matrix * f.matrix()).array(); }
};

struct Spectrum {
  double lambda1 = 0.0;       // real part of the principal eigenvalue
  double imag_residual = 0.0; // |imaginary part|
  Field eigenfunction;        // scaled so the entry of largest magnitude is +1
  bool positivity_ok = false; // strictly one-signed after normalization
  double solver_residual = 0.0;
  std::string method = "dense_full_spectrum";
};

OperatorMatrix assemble(OperatorKind kind,
                        std::shared_ptr<const surface::SurfaceGeometry> geom);

/// Eigenvalue of smallest real part with a one-signed eigenfunction.
/// Throws if no such eigenpair exists (Krein-Rutman selection).
Spectrum principal_eigenvalue(const OperatorMatrix& op);

double rayleigh_quotient(const OperatorMatrix& op, const Field& psi);

/// Randomized band-limited trials plus Rayleigh-Ritz descent; the returned
/// value is a rigorous upper bound for lambda1 of the discrete operator.
double rayleigh_minimize(const OperatorMatrix& op, int trials, unsigned seed);

struct ComparisonReport {
  double lambda1_L0 = 0.0;
  double lambda1_Lbar = 0.0;
  double gap = 0.0;  // lambda1_L0 - lambda1_Lbar
  Spectrum spectrum_L0, spectrum_Lbar;
};

/// Prop.-style eigenvalue comparison of the symmetrized operator against the
/// full drift operator on the same surface.
ComparisonReport eigenvalue_comparison(
    std::shared_ptr<const surface::SurfaceGeometry> geom);

struct DivergenceIdentityReport {
  double lambda1 = 0.0;
  double sup_residual = 0.0;
  Field residual;  // Q + div(X - grad ln phi) - |X - grad ln phi|^2 - lambda1
};

DivergenceIdentityReport divergence_identity_check(
    std::shared_ptr<const surface::SurfaceGeometry> geom);

struct ConformalReport {
  Field s_tilde_formula;
  Field s_tilde_direct;
  double residual = 0.0;  // sup |formula - direct|
};

/// Scalar curvature of the conformally rescaled surface metric
/// h~ = phi^{2/(n-2)} h, once from the transformation formula and once by
/// recomputing the intrinsic curvature of the rescaled nodal metric.
ConformalReport conformal_scalar(const surface::SurfaceGeometry& geom,
                                 const Field& phi, int n = 3);

}  // namespace motslab::stability
