#pragma once

#include "motslab/ambient.hpp"
#include "motslab/mesh.hpp"

namespace motslab::surface {

enum class GraphKind { radial_over_sphere, level_graph_over_torus };
enum class NormalOrientation { outward, inward };

/// A closed 2-surface embedded as a graph in an ambient chart: radial graph
/// r = F(theta, phi) over a sphere mesh, or height graph t = F(x, y) over a
/// torus mesh. Immutable once built.
struct EmbeddedSurface {
  std::shared_ptr<const SurfaceMesh> mesh;
  std::shared_ptr<const ambient::AmbientModel> model;
  GraphKind graph_kind = GraphKind::radial_over_sphere;
  Field height;  // F per node
  NormalOrientation orientation = NormalOrientation::outward;
  Vec3 center = Vec3::Zero();  // radial graphs: chart center

  Vec3 position(Eigen::Index k) const {
    if (graph_kind == GraphKind::radial_over_sphere)
      return center + height[k] * vec_at(mesh->nhat, k);
    return Vec3(height[k], mesh->u1[k], mesh->u2[k]);
  }

  // Chart direction of a unit height increase at node k.
  Vec3 height_direction(Eigen::Index k) const {
    if (graph_kind == GraphKind::radial_over_sphere)
      return vec_at(mesh->nhat, k);
    return Vec3(1, 0, 0);
  }

  EmbeddedSurface displaced(const Field& delta) const {
    EmbeddedSurface s = *this;
    s.height = height + delta;
    return s;
  }
};

EmbeddedSurface make_surface(std::shared_ptr<const SurfaceMesh> mesh,
                             std::shared_ptr<const ambient::AmbientModel> model,
                             Field height,
                             NormalOrientation orientation = NormalOrientation::outward,
                             const Vec3& center = Vec3::Zero());

/// Difference tensor between the Levi-Civita connections of a nodal metric
/// and the round/flat background of the parameter domain, in frame slots.
struct ConnectionDiff {
  std::array<SymField, 3> c;  // c[e] = C^e_{ab}, symmetric in (a, b)
  VecField trace;             // C^a_{ae}
};

/// Full induced geometry of an embedded surface.
///
/// Frame-slot tensors (metric, second fundamental form, ...) live in the
/// mesh's tangential frame; all contractions use the tangential
/// pseudo-inverse metric hh_inv.
struct SurfaceGeometry {
  EmbeddedSurface surface;

  VecField chart_x;                        // node positions
  std::array<VecField, 3> tangent;         // tangent[a][i] = E_a^i
  SymField hh, hh_inv;                     // induced metric and pseudo-inverse
  Field area_density;                      // dA relative to base quadrature
  VecField nu_up, nu_down;                 // unit normal nu^i and nu_i
  SymField second_form;                    // B_ab (tangential slots)
  Field mean_curvature;                    // H
  Field b_norm2;                           // |B|^2
  Field b0_norm2;                          // |B - h|^2
  Field intrinsic_scalar;                  // S_Sigma (from h alone)
  ConnectionDiff connection;

  // Ambient data along the surface.
  SymField amb_g, amb_g_inv, amb_K, amb_ricci;
  std::array<SymField, 3> amb_gamma;       // gamma[k](i,j)
  Field amb_scalar;                        // ambient S
  Field ric_nu_nu;                         // Ric(nu, nu)

  // Height-deformation data for Newton solvers: normal speed per unit height
  // and the tangential remainder pulled back to frame slots.
  Field height_lapse;                      // w = g(height_dir, nu)
  VecField height_drift;                   // v^a with E_a v^a = height_dir - w nu

  const SurfaceMesh& mesh() const { return *surface.mesh; }
  Eigen::Index nodes() const { return surface.mesh->num_nodes; }

  // Quadrature mass per node: quad_weights * area_density.
  Field mass() const { return mesh().quad_weights * area_density; }
};

/// Computes all geometry; throws on a degenerate induced metric or when the
/// graph leaves the chart domain.
SurfaceGeometry compute_geometry(const EmbeddedSurface& surface);

// Intrinsic operators of (Sigma, h), nodal versions.
Field laplace_beltrami(const SurfaceGeometry& g, const Field& f);
VecField gradient(const SurfaceGeometry& g, const Field& f);       // (grad f)^a
Field divergence(const SurfaceGeometry& g, const VecField& x);     // div_h X
Field inner(const SurfaceGeometry& g, const VecField& x, const VecField& y);
double integrate(const SurfaceGeometry& g, const Field& f);
double area(const SurfaceGeometry& g);

// Dense operator ingredients shared with the stability module: the strong
// Laplace-Beltrami matrix and the weak (quadrature self-adjoint) pair
// K = grad^T M grad, M = diag(mass).
Eigen::MatrixXd strong_laplacian_matrix(const SurfaceGeometry& g);
Eigen::MatrixXd weak_stiffness_matrix(const SurfaceGeometry& g);

/// Connection difference and intrinsic scalar curvature of an arbitrary
/// nodal frame-slot metric on this mesh (used for conformal rescaling).
ConnectionDiff connection_difference(const SurfaceMesh& mesh, const SymField& hh,
                                     const SymField& hh_inv);
Field intrinsic_scalar_curvature(const SurfaceMesh& mesh, const SymField& hh,
                                 const SymField& hh_inv);
SymField tangential_pseudo_inverse(const SurfaceMesh& mesh, const SymField& hh,
                                   Field* det2 = nullptr);

enum class YamabeType { positive, non_positive };
YamabeType yamabe_type(const SurfaceGeometry& g);

}  // namespace motslab::surface
