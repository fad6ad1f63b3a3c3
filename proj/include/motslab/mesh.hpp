#pragma once

#include <memory>
#include <random>
#include <vector>

#include "motslab/core.hpp"

namespace motslab::surface {

enum class Topology { sphere, torus };

/// Pseudospectral discretization of a closed parameter 2-surface.
///
/// Sphere: Gauss-Legendre nodes in colatitude (no nodes at the poles) times
/// an equispaced periodic longitude grid; differentiation goes through a
/// spherical-harmonic transform. Torus: equispaced periodic tensor grid with
/// Fourier differentiation.
///
/// All derivative machinery is exposed through the "frame" operators
/// dframe[a]: for the sphere these differentiate along the three
/// tangential-Cartesian directions of the unit parameter sphere (the
/// projected derivative of the degree-0 homogeneous extension), so that
/// every differentiated quantity is itself a smooth function on the sphere
/// and retains spectral accuracy; for the torus they are the two coordinate
/// derivatives.
struct SurfaceMesh {
  Topology topology;
  int n1 = 0, n2 = 0;        // nodes per parametric direction
  int num_nodes = 0;         // n1 * n2, node k = i1 * n2 + i2
  int frame_dim = 0;         // 3 (sphere) or 2 (torus)
  int band_limit = 0;        // max resolved harmonic degree / wavenumber

  Field u1, u2;              // parametric coordinates per node
  Field quad_weights;        // base-domain quadrature weights (sum = base area)
  double periods[2] = {0.0, 0.0};  // torus periods (unused for sphere)

  // Frame derivative operators and their symmetrized second products
  // dframe2[sym_index(a,b)] = (dframe[a]*dframe[b] + dframe[b]*dframe[a])/2.
  std::array<Eigen::MatrixXd, 3> dframe;
  std::array<Eigen::MatrixXd, 6> dframe2;

  // Sphere node data (empty for torus): unit radial/tangent frame and the
  // tangential projector P = I - nhat nhat^T.
  VecField nhat, theta_hat, phi_hat;
  Field sin_theta, cos_theta;

  // Orthonormal resolved basis of the base domain (spherical harmonics /
  // Nyquist-free trigonometric products). The grid holds more nodal values
  // than resolved modes; eigenproblems and Newton solves are posed on this
  // band so the aliasing complement never enters.
  int spectral_dim = 0;
  Eigen::MatrixXd analysis;    // coeffs = analysis * nodal (exact on the band)
  Eigen::MatrixXd synthesis;   // nodal  = synthesis * coeffs

  // Projector components P_ab at node k (identity for torus).
  double projector(int a, int b, Eigen::Index k) const {
    if (topology == Topology::torus) return a == b ? 1.0 : 0.0;
    return (a == b ? 1.0 : 0.0) - nhat[a][k] * nhat[b][k];
  }

  // Orthonormal tangent pair of the parameter domain at node k.
  Vec3 tangent1(Eigen::Index k) const {
    if (topology == Topology::torus) return Vec3(1, 0, 0);
    return vec_at(theta_hat, k);
  }
  Vec3 tangent2(Eigen::Index k) const {
    if (topology == Topology::torus) return Vec3(0, 1, 0);
    return vec_at(phi_hat, k);
  }

  Field apply_dframe(int a, const Field& f) const {
    return (dframe[a] * f.matrix()).array();
  }

  // Random real band-limited field: harmonics (Fourier modes) of degree
  // (wavenumber) <= lmax with iid normal coefficients scaled by `amplitude`.
  Field random_band_limited(std::mt19937_64& rng, int lmax,
                            double amplitude) const;

  // Exact parametric-coordinate partials recovered from frame derivatives
  // (sphere: d/dtheta, d/dphi; torus: d/du1, d/du2).
  Field coord_partial(int which, const Field& f) const;
};

/// Build a mesh. Sphere resolution minimum 8x16, torus minimum 8x8.
/// Torus periods default to (2*pi, 2*pi).
std::shared_ptr<const SurfaceMesh> build_mesh(Topology topology, int n1, int n2,
                                              double period1 = 2.0 * kPi,
                                              double period2 = 2.0 * kPi);

namespace detail {
/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Orthonormalized associated Legendre Q_lm(x) = N_lm P_lm(x) with
/// Condon-Shortley phase, N_lm = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!),
/// for all 0 <= m <= l <= lmax. Layout: q[l*(l+1)/2 + m].
void legendre_table(int lmax, double x, std::vector<double>& q);

/// d/dtheta of Q_lm(cos theta), from the same-order recurrence.
void legendre_theta_deriv_table(int lmax, double x, double sin_theta,
                                const std::vector<double>& q,
                                std::vector<double>& dq);

/// Fourier differentiation matrix on n equispaced nodes of period p.
Eigen::MatrixXd fourier_diff_matrix(int n, double p);
}  // namespace detail

}  // namespace motslab::surface
