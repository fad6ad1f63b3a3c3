#include "motslab/brane.hpp"

#include "motslab/stability.hpp"

namespace motslab::brane {

using surface::SurfaceGeometry;

BraneEvaluation brane_action(const SurfaceGeometry& geom) {
  const auto& model = *geom.surface.model;
  if (!model.lambda_coefficient)
    throw std::invalid_argument("model '" + model.name +
                                "' has no registered brane potential form");
  if (geom.surface.graph_kind != surface::GraphKind::level_graph_over_torus)
    throw std::invalid_argument("brane action needs a torus graph");

  BraneEvaluation out;
  out.area = surface::area(geom);
  out.reference_offset = model.lambda_offset;
  double v = 0.0;
  const auto& mesh = geom.mesh();
  for (Eigen::Index k = 0; k < geom.nodes(); ++k)
    v += mesh.quad_weights[k] *
         (model.lambda_coefficient(geom.surface.height[k]) + model.lambda_offset);
  out.volume_term = v;
  out.action = out.area - (model.dim - 1) * v;
  return out;
}

double brane_first_variation(const SurfaceGeometry& geom, const Field& phi) {
  const double n1 = geom.surface.model->dim - 1;
  return surface::integrate(geom, (geom.mean_curvature - n1) * phi);
}

BraneVariations brane_variations(const SurfaceGeometry& geom, const Field& phi,
                                 double stationary_tol) {
  BraneVariations out;
  out.first = brane_first_variation(geom, phi);
  const double n1 = geom.surface.model->dim - 1;
  if (sup_norm(geom.mean_curvature - n1) > stationary_tol)
    throw std::invalid_argument(
        "second brane variation requires a stationary surface (H = n-1)");
  auto gptr = std::make_shared<const SurfaceGeometry>(geom);
  const auto op = stability::assemble(stability::OperatorKind::L_brane, gptr);
  out.second = surface::integrate(geom, phi * op.apply(phi));
  return out;
}

const char* to_string(SignClass s) {
  switch (s) {
    case SignClass::negative: return "negative";
    case SignClass::zero: return "zero";
    case SignClass::positive: return "positive";
    case SignClass::mixed: return "mixed";
  }
  return "?";
}

MassAspect mass_aspect(const surface::SurfaceMesh& mesh,
                       const MassAspectInput& k, double tol) {
  if (mesh.topology != surface::Topology::sphere)
    throw std::invalid_argument("mass aspect lives on the boundary sphere");
  const Eigen::Index n = mesh.num_nodes;
  if (k.k_tt.size() != n || k.k_pp.size() != n || k.k_tp.size() != n)
    throw std::invalid_argument("mass aspect components do not match the mesh");
  if (k.k_pt.size() != 0 && sup_norm(k.k_pt - k.k_tp) > tol)
    throw std::invalid_argument("mass aspect tensor is not symmetric");

  MassAspect out;
  // h0 = dtheta^2 + sin^2 theta dphi^2: trace = k_tt + k_pp / sin^2 theta
  out.trace = k.k_tt + k.k_pp / mesh.sin_theta.square();
  out.mass = (mesh.quad_weights * out.trace).sum();
  const double lo = out.trace.minCoeff(), hi = out.trace.maxCoeff();
  if (std::abs(lo) <= tol && std::abs(hi) <= tol)
    out.sign_class = SignClass::zero;
  else if (lo > tol)
    out.sign_class = SignClass::positive;
  else if (hi < -tol)
    out.sign_class = SignClass::negative;
  else
    out.sign_class = SignClass::mixed;
  return out;
}

}  // namespace motslab::brane
