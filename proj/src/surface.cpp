#include "motslab/surface.hpp"

namespace motslab::surface {

EmbeddedSurface make_surface(std::shared_ptr<const SurfaceMesh> mesh,
                             std::shared_ptr<const ambient::AmbientModel> model,
                             Field height, NormalOrientation orientation,
                             const Vec3& center) {
  EmbeddedSurface s;
  if (!mesh || !model) throw std::invalid_argument("null mesh or model");
  if (height.size() != mesh->num_nodes)
    throw std::invalid_argument("height field size does not match mesh");
  s.mesh = std::move(mesh);
  s.model = std::move(model);
  s.graph_kind = s.mesh->topology == Topology::sphere
                     ? GraphKind::radial_over_sphere
                     : GraphKind::level_graph_over_torus;
  if (s.graph_kind == GraphKind::radial_over_sphere && height.minCoeff() <= 0.0)
    throw std::invalid_argument("radial graph height must be positive");
  s.height = std::move(height);
  s.orientation = orientation;
  s.center = center;
  return s;
}

SymField tangential_pseudo_inverse(const SurfaceMesh& mesh, const SymField& hh,
                                   Field* det2) {
  const Eigen::Index n = mesh.num_nodes;
  SymField inv = make_sym_field(n);
  if (det2) det2->resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec3 t1 = mesh.tangent1(k), t2 = mesh.tangent2(k);
    const Mat3 h = sym_at(hh, k);
    Eigen::Matrix2d m;
    m << t1.dot(h * t1), t1.dot(h * t2), t1.dot(h * t2), t2.dot(h * t2);
    const double det = m.determinant();
    if (det2) (*det2)[k] = det;
    if (det <= 0.0)
      throw std::runtime_error(
          "degenerate induced metric (det h <= 0): collapsed or "
          "self-intersecting graph");
    Eigen::Matrix2d mi;
    mi << m(1, 1), -m(0, 1), -m(0, 1), m(0, 0);
    mi /= det;
    Mat3 up = Mat3::Zero();
    const Vec3 tau[2] = {t1, t2};
    for (int al = 0; al < 2; ++al)
      for (int be = 0; be < 2; ++be)
        up += mi(al, be) * tau[al] * tau[be].transpose();
    sym_set(inv, k, up);
  }
  return inv;
}

ConnectionDiff connection_difference(const SurfaceMesh& mesh, const SymField& hh,
                                     const SymField& hh_inv) {
  const Eigen::Index n = mesh.num_nodes;
  const int nf = mesh.frame_dim;
  ConnectionDiff out;
  for (int e = 0; e < 3; ++e) out.c[e] = make_sym_field(n);
  out.trace = make_vec_field(n);

  // W[c][ab] = projected frame derivative of hh
  std::array<SymField, 3> w;
  for (int c = 0; c < nf; ++c) {
    w[c] = make_sym_field(n);
    for (int a = 0; a < nf; ++a)
      for (int b = a; b < nf; ++b)
        w[c][sym_index(a, b)] = mesh.apply_dframe(c, hh[sym_index(a, b)]);
  }
  if (mesh.topology == Topology::sphere) {
    for (int c = 0; c < nf; ++c)
      for (Eigen::Index k = 0; k < n; ++k) {
        Mat3 p = Mat3::Identity() - vec_at(mesh.nhat, k) * vec_at(mesh.nhat, k).transpose();
        sym_set(w[c], k, Mat3(p * sym_at(w[c], k) * p));
      }
  }

  for (Eigen::Index k = 0; k < n; ++k) {
    Mat3 hi = sym_at(hh_inv, k);
    Mat3 wk[3];
    for (int c = 0; c < nf; ++c) wk[c] = sym_at(w[c], k);
    Mat3 ck[3];
    for (int e = 0; e < nf; ++e) ck[e].setZero();
    for (int a = 0; a < nf; ++a)
      for (int b = a; b < nf; ++b) {
        // C^e_{ab} = hh^{ed} (W_a,db + W_b,da - W_d,ab) / 2
        Vec3 low = Vec3::Zero();
        for (int d = 0; d < nf; ++d)
          low[d] = 0.5 * (wk[a](d, b) + wk[b](d, a) - wk[d](a, b));
        const Vec3 up = hi * low;
        for (int e = 0; e < nf; ++e) {
          ck[e](a, b) = up[e];
          ck[e](b, a) = up[e];
        }
      }
    Vec3 tr = Vec3::Zero();
    for (int e = 0; e < nf; ++e) {
      sym_set(out.c[e], k, ck[e]);
      for (int a = 0; a < nf; ++a) tr[e] += ck[a](a, e);
    }
    vec_set(out.trace, k, tr);
  }
  return out;
}

Field intrinsic_scalar_curvature(const SurfaceMesh& mesh, const SymField& hh,
                                 const SymField& hh_inv) {
  const Eigen::Index n = mesh.num_nodes;
  const int nf = mesh.frame_dim;
  const ConnectionDiff conn = connection_difference(mesh, hh, hh_inv);

  // u[c][e][ab] = projected frame derivative of C^e_{ab}
  std::array<std::array<SymField, 3>, 3> u;
  for (int c = 0; c < nf; ++c)
    for (int e = 0; e < nf; ++e) {
      u[c][e] = make_sym_field(n);
      for (int a = 0; a < nf; ++a)
        for (int b = a; b < nf; ++b)
          u[c][e][sym_index(a, b)] =
              mesh.apply_dframe(c, conn.c[e][sym_index(a, b)]);
    }

  Field s(n);
  const bool sphere = mesh.topology == Topology::sphere;
  for (Eigen::Index k = 0; k < n; ++k) {
    Mat3 proj = Mat3::Identity();
    if (sphere)
      proj -= vec_at(mesh.nhat, k) * vec_at(mesh.nhat, k).transpose();

    // project every slot of u at this node
    double up[3][3][3][3];  // up[c][e][a][b] after projection
    {
      double raw[3][3][3][3];
      for (int c = 0; c < nf; ++c)
        for (int e = 0; e < nf; ++e) {
          const Mat3 m = sym_at(u[c][e], k);
          for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b) raw[c][e][a][b] = m(a, b);
        }
      for (int c = 0; c < nf; ++c)
        for (int e = 0; e < nf; ++e)
          for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b) {
              double acc = 0.0;
              for (int ep = 0; ep < nf; ++ep)
                for (int ap = 0; ap < nf; ++ap)
                  for (int bp = 0; bp < nf; ++bp)
                    acc += proj(e, ep) * proj(a, ap) * proj(b, bp) *
                           raw[c][ep][ap][bp];
              up[c][e][a][b] = acc;
            }
    }

    Mat3 ck[3];
    for (int e = 0; e < nf; ++e) ck[e] = sym_at(conn.c[e], k);
    const Mat3 hi = sym_at(hh_inv, k);

    // Ric_bd = kappa P_bd + div C - d tr C + C C - C C
    Mat3 ric = Mat3::Zero();
    if (sphere) ric = proj;  // unit round background has Ric = q
    for (int b = 0; b < nf; ++b)
      for (int d = 0; d < nf; ++d) {
        double r = 0.0;
        for (int a = 0; a < nf; ++a) r += up[a][a][d][b] - up[d][a][a][b];
        for (int a = 0; a < nf; ++a)
          for (int e = 0; e < nf; ++e)
            r += ck[a](a, e) * ck[e](d, b) - ck[a](d, e) * ck[e](a, b);
        ric(b, d) += r;
      }
    s[k] = (hi * ric).trace();
  }
  return s;
}

SurfaceGeometry compute_geometry(const EmbeddedSurface& surface) {
  SurfaceGeometry g;
  g.surface = surface;
  const SurfaceMesh& mesh = *surface.mesh;
  const ambient::AmbientModel& model = *surface.model;
  const Eigen::Index n = mesh.num_nodes;
  const int nf = mesh.frame_dim;

  if (surface.graph_kind == GraphKind::radial_over_sphere &&
      surface.height.minCoeff() <= 0.0)
    throw std::runtime_error("radial graph height must stay positive");

  g.chart_x = make_vec_field(n);
  for (Eigen::Index k = 0; k < n; ++k) vec_set(g.chart_x, k, surface.position(k));

  for (int a = 0; a < 3; ++a) g.tangent[a] = make_vec_field(n);
  std::array<VecField, 6> d2x;
  for (int a = 0; a < nf; ++a)
    for (int b = a; b < nf; ++b) d2x[sym_index(a, b)] = make_vec_field(n);
  if (surface.graph_kind == GraphKind::radial_over_sphere) {
    // chart components F * nhat_i are smooth sphere scalars
    for (int a = 0; a < nf; ++a)
      for (int i = 0; i < 3; ++i)
        g.tangent[a][i] = mesh.apply_dframe(a, g.chart_x[i]);
    for (int a = 0; a < nf; ++a)
      for (int b = a; b < nf; ++b)
        for (int i = 0; i < 3; ++i)
          d2x[sym_index(a, b)][i] =
              (mesh.dframe2[sym_index(a, b)] * g.chart_x[i].matrix()).array();
  } else {
    // torus graph (F(u), u1, u2): only the height varies, the base is affine
    for (int a = 0; a < nf; ++a) {
      g.tangent[a][0] = mesh.apply_dframe(a, surface.height);
      g.tangent[a][1] = Field::Constant(n, a == 0 ? 1.0 : 0.0);
      g.tangent[a][2] = Field::Constant(n, a == 1 ? 1.0 : 0.0);
    }
    for (int a = 0; a < nf; ++a)
      for (int b = a; b < nf; ++b)
        d2x[sym_index(a, b)][0] =
            (mesh.dframe2[sym_index(a, b)] * surface.height.matrix()).array();
  }

  g.amb_g = make_sym_field(n);
  g.amb_g_inv = make_sym_field(n);
  g.amb_K = make_sym_field(n);
  g.amb_ricci = make_sym_field(n);
  for (int k3 = 0; k3 < 3; ++k3) g.amb_gamma[k3] = make_sym_field(n);
  g.amb_scalar.resize(n);
  g.hh = make_sym_field(n);
  g.nu_up = make_vec_field(n);
  g.nu_down = make_vec_field(n);
  g.second_form = make_sym_field(n);
  g.mean_curvature.resize(n);
  g.b_norm2.resize(n);
  g.b0_norm2.resize(n);
  g.ric_nu_nu.resize(n);
  g.height_lapse.resize(n);
  g.height_drift = make_vec_field(n);

  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec3 p = vec_at(g.chart_x, k);
    const auto amb = ambient::ambient_at(model, p, ambient::kEvalCurvature);
    sym_set(g.amb_g, k, amb.g);
    sym_set(g.amb_g_inv, k, amb.g_inv);
    sym_set(g.amb_K, k, amb.K);
    sym_set(g.amb_ricci, k, amb.ricci);
    for (int k3 = 0; k3 < 3; ++k3) sym_set(g.amb_gamma[k3], k, amb.gamma[k3]);
    g.amb_scalar[k] = amb.scalar;

    Mat3 e;  // columns: frame slots a; rows: chart index i? use e.col(a)
    e.setZero();
    for (int a = 0; a < nf; ++a)
      for (int i = 0; i < 3; ++i) e(i, a) = g.tangent[a][i][k];

    Mat3 hh = Mat3::Zero();
    for (int a = 0; a < nf; ++a)
      for (int b = a; b < nf; ++b) {
        const double v = e.col(a).dot(amb.g * e.col(b));
        hh(a, b) = hh(b, a) = v;
      }
    sym_set(g.hh, k, hh);
  }

  g.hh_inv = tangential_pseudo_inverse(mesh, g.hh, &g.area_density);
  g.area_density = g.area_density.sqrt();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Mat3 gk = sym_at(g.amb_g, k);
    const Mat3 gik = sym_at(g.amb_g_inv, k);
    Mat3 e;
    e.setZero();
    for (int a = 0; a < nf; ++a)
      for (int i = 0; i < 3; ++i) e(i, a) = g.tangent[a][i][k];

    const Vec3 t1v = e * mesh.tangent1(k);
    const Vec3 t2v = e * mesh.tangent2(k);
    Vec3 conormal = t1v.cross(t2v);  // chart-epsilon cross: g-orthogonal to both
    double norm2 = conormal.dot(gik * conormal);
    Vec3 nu_dn = conormal / std::sqrt(norm2);
    // orient along increasing height, then apply the requested orientation
    const Vec3 ref = surface.height_direction(k);
    double sgn = nu_dn.dot(ref) >= 0.0 ? 1.0 : -1.0;
    if (surface.orientation == NormalOrientation::inward) sgn = -sgn;
    nu_dn *= sgn;
    const Vec3 nu = gik * nu_dn;
    vec_set(g.nu_down, k, nu_dn);
    vec_set(g.nu_up, k, nu);

    Mat3 gam[3];
    for (int k3 = 0; k3 < 3; ++k3) gam[k3] = sym_at(g.amb_gamma[k3], k);

    Mat3 b = Mat3::Zero();
    for (int a = 0; a < nf; ++a)
      for (int bb = a; bb < nf; ++bb) {
        Vec3 acc;
        for (int i = 0; i < 3; ++i) acc[i] = d2x[sym_index(a, bb)][i][k];
        for (int k3 = 0; k3 < 3; ++k3)
          acc[k3] += e.col(a).dot(gam[k3] * e.col(bb));
        const double v = -nu_dn.dot(acc);
        b(a, bb) = b(bb, a) = v;
      }
    // keep only the tangential slots
    Mat3 proj = Mat3::Identity();
    if (mesh.topology == Topology::sphere)
      proj -= vec_at(mesh.nhat, k) * vec_at(mesh.nhat, k).transpose();
    b = proj * b * proj;
    sym_set(g.second_form, k, b);

    const Mat3 hi = sym_at(g.hh_inv, k);
    const Mat3 hh = sym_at(g.hh, k);
    g.mean_curvature[k] = (hi * b).trace();
    g.b_norm2[k] = (hi * b * hi * b).trace();
    const Mat3 b0 = b - proj * hh * proj;
    g.b0_norm2[k] = (hi * b0 * hi * b0).trace();

    const Mat3 ric = sym_at(g.amb_ricci, k);
    g.ric_nu_nu[k] = nu.dot(ric * nu);

    const Vec3 dir = surface.height_direction(k);
    const double w = dir.dot(gk * nu);
    g.height_lapse[k] = w;
    const Vec3 dir_t = dir - w * nu;
    Vec3 v = Vec3::Zero();
    for (int a = 0; a < nf; ++a) {
      double low = e.col(a).dot(gk * dir_t);
      for (int bp = 0; bp < nf; ++bp) v[bp] += hi(bp, a) * low;
    }
    vec_set(g.height_drift, k, v);
  }

  g.connection = connection_difference(mesh, g.hh, g.hh_inv);
  g.intrinsic_scalar = intrinsic_scalar_curvature(mesh, g.hh, g.hh_inv);
  return g;
}

VecField gradient(const SurfaceGeometry& g, const Field& f) {
  const SurfaceMesh& mesh = g.mesh();
  const int nf = mesh.frame_dim;
  const Eigen::Index n = g.nodes();
  VecField df = make_vec_field(n);
  for (int a = 0; a < nf; ++a) df[a] = mesh.apply_dframe(a, f);
  VecField out = make_vec_field(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Mat3 hi = sym_at(g.hh_inv, k);
    Vec3 v = Vec3::Zero();
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b) v[a] += hi(a, b) * df[b][k];
    vec_set(out, k, v);
  }
  return out;
}

Field divergence(const SurfaceGeometry& g, const VecField& x) {
  const SurfaceMesh& mesh = g.mesh();
  const int nf = mesh.frame_dim;
  Field out = Field::Zero(g.nodes());
  for (int a = 0; a < nf; ++a)
    out += mesh.apply_dframe(a, x[a]) + g.connection.trace[a] * x[a];
  return out;
}

Field inner(const SurfaceGeometry& g, const VecField& x, const VecField& y) {
  const int nf = g.mesh().frame_dim;
  Field out = Field::Zero(g.nodes());
  for (Eigen::Index k = 0; k < g.nodes(); ++k) {
    const Mat3 h = sym_at(g.hh, k);
    double acc = 0.0;
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b) acc += h(a, b) * x[a][k] * y[b][k];
    out[k] = acc;
  }
  return out;
}

Field laplace_beltrami(const SurfaceGeometry& g, const Field& f) {
  return divergence(g, gradient(g, f));
}

double integrate(const SurfaceGeometry& g, const Field& f) {
  return (g.mesh().quad_weights * g.area_density * f).sum();
}

double area(const SurfaceGeometry& g) {
  return (g.mesh().quad_weights * g.area_density).sum();
}

Eigen::MatrixXd strong_laplacian_matrix(const SurfaceGeometry& g) {
  const SurfaceMesh& mesh = g.mesh();
  const int nf = mesh.frame_dim;
  const Eigen::Index n = g.nodes();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < nf; ++a)
    for (int b = a; b < nf; ++b) {
      const double fac = (a == b) ? 1.0 : 2.0;
      lap += (fac * g.hh_inv[sym_index(a, b)]).matrix().asDiagonal() *
             mesh.dframe2[sym_index(a, b)];
    }
  for (int e = 0; e < nf; ++e) {
    Field v = Field::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Mat3 hi = sym_at(g.hh_inv, k);
      const Mat3 ce = sym_at(g.connection.c[e], k);
      v[k] = (hi * ce).trace();
    }
    lap -= v.matrix().asDiagonal() * mesh.dframe[e];
  }
  return lap;
}

Eigen::MatrixXd weak_stiffness_matrix(const SurfaceGeometry& g) {
  const SurfaceMesh& mesh = g.mesh();
  const int nf = mesh.frame_dim;
  const Eigen::Index n = g.nodes();
  const Field m = g.mass();
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < nf; ++a) {
    Eigen::MatrixXd inner_sum = Eigen::MatrixXd::Zero(n, n);
    for (int b = 0; b < nf; ++b)
      inner_sum += (m * g.hh_inv[sym_index(a, b)]).matrix().asDiagonal() *
                   mesh.dframe[b];
    stiff.noalias() += mesh.dframe[a].transpose() * inner_sum;
  }
  return Eigen::MatrixXd(0.5 * (stiff + stiff.transpose()));
}

YamabeType yamabe_type(const SurfaceGeometry& g) {
  const double total = integrate(g, g.intrinsic_scalar);
  // Gauss-Bonnet: 8 pi for spheres, 0 for tori; resolution-scaled guard
  const double threshold = 1e-3 * std::max(1.0, area(g));
  if (g.mesh().topology == Topology::sphere) {
    if (std::abs(total) < threshold)
      throw std::runtime_error(
          "sphere-topology surface with vanishing total curvature: "
          "inconsistent discretization");
    return total > 0.0 ? YamabeType::positive : YamabeType::non_positive;
  }
  return std::abs(total) <= threshold ? YamabeType::non_positive
                                      : (total > 0.0 ? YamabeType::positive
                                                     : YamabeType::non_positive);
}

}  // namespace motslab::surface
