#pragma once

#include "motslab/surface.hpp"

namespace motslab::brane {

/// Brane action B = A - (n-1) V of a torus graph in a hyperbolic model with
/// a registered potential form Lambda; V is the pullback integral of Lambda.
struct BraneEvaluation {
  double area = 0.0;
  double volume_term = 0.0;
  double action = 0.0;
  double reference_offset = 0.0;  // additive Lambda gauge in use
};

BraneEvaluation brane_action(const surface::SurfaceGeometry& geom);

double brane_first_variation(const surface::SurfaceGeometry& geom,
                             const Field& phi);

struct BraneVariations {
  double first = 0.0;
  double second = 0.0;
};

/// Both variations; the second requires sup |H - (n-1)| <= stationary_tol.
BraneVariations brane_variations(const surface::SurfaceGeometry& geom,
                                 const Field& phi,
                                 double stationary_tol = 1e-6);

/// Mass-aspect tensor on the unit round boundary sphere, components in
/// standard spherical coordinates.
struct MassAspectInput {
  Field k_tt, k_tp, k_pp;
  Field k_pt;  // optional; empty means symmetric by construction
};

enum class SignClass { negative, zero, positive, mixed };

const char* to_string(SignClass s);

struct MassAspect {
  Field trace;        // tr_{h0} k
  double mass = 0.0;  // integral of the trace over (S^2, h0)
  SignClass sign_class = SignClass::zero;
};

MassAspect mass_aspect(const surface::SurfaceMesh& sphere_mesh,
                       const MassAspectInput& k, double tol = 1e-10);

}  // namespace motslab::brane
