#pragma once

#include "motslab/surface.hpp"

namespace motslab::constraint {

/// Null second forms and expansions of a two-sided surface in initial data:
/// theta_pm = tr_h K +- H, chi_pm = K|_Sigma +- B, with the outward normal
/// fixing signs.
struct NullGeometry {
  Field theta_plus, theta_minus;
  Field chi_plus_norm2, chi_minus_norm2;
  Field tr_h_K;
  VecField X;       // tangent dual of K(nu, .)|_TSigma, frame components
  Field div_X, X_norm2;
};

/// Energy and momentum densities of the initial data along the surface:
/// mu = (S + (tr K)^2 - |K|^2)/2 with the ambient scalar curvature S,
/// J = div K - d(tr K) taken with the ambient connection.
struct EnergyMomentum {
  Field mu;
  Field J_nu;       // J(nu)
  Field J_norm;     // |J|_g
  Field dec_margin; // mu - |J|
};

enum class TrappedClass { trapped, outer_trapped, mots, untrapped, mixed };

NullGeometry null_expansions(const surface::SurfaceGeometry& geom);
EnergyMomentum energy_momentum(const surface::SurfaceGeometry& geom);

/// tr_h (nabla_nu K) along the surface: the K contribution to the exact
/// linearization of theta_plus under normal deformations.
Field normal_deriv_K_trace(const surface::SurfaceGeometry& geom);

TrappedClass classify(const NullGeometry& null_geom, double tol);

const char* to_string(TrappedClass c);

}  // namespace motslab::constraint
