#include "motslab/constraint.hpp"

namespace motslab::constraint {

using surface::SurfaceGeometry;

NullGeometry null_expansions(const SurfaceGeometry& geom) {
  const auto& mesh = geom.mesh();
  const Eigen::Index n = geom.nodes();
  const int nf = mesh.frame_dim;
  NullGeometry out;
  out.theta_plus.resize(n);
  out.theta_minus.resize(n);
  out.chi_plus_norm2.resize(n);
  out.chi_minus_norm2.resize(n);
  out.tr_h_K.resize(n);
  out.X = make_vec_field(n);
  out.X_norm2.resize(n);

  for (Eigen::Index k = 0; k < n; ++k) {
    const Mat3 kk = sym_at(geom.amb_K, k);
    const Mat3 hi = sym_at(geom.hh_inv, k);
    const Mat3 b = sym_at(geom.second_form, k);
    const Vec3 nu = vec_at(geom.nu_up, k);

    Mat3 e = Mat3::Zero();
    for (int a = 0; a < nf; ++a)
      for (int i = 0; i < 3; ++i) e(i, a) = geom.tangent[a][i][k];

    // K pulled back to frame slots
    Mat3 kt = Mat3::Zero();
    for (int a = 0; a < nf; ++a)
      for (int b2 = a; b2 < nf; ++b2)
        kt(a, b2) = kt(b2, a) = e.col(a).dot(kk * e.col(b2));

    const double trk = (hi * kt).trace();
    const double h = geom.mean_curvature[k];
    out.tr_h_K[k] = trk;
    out.theta_plus[k] = trk + h;
    out.theta_minus[k] = trk - h;

    const Mat3 chi_p = kt + b, chi_m = kt - b;
    out.chi_plus_norm2[k] = (hi * chi_p * hi * chi_p).trace();
    out.chi_minus_norm2[k] = (hi * chi_m * hi * chi_m).trace();

    // X^a = hh^{ab} K(nu, E_b)
    Vec3 low = Vec3::Zero();
    for (int a = 0; a < nf; ++a) low[a] = nu.dot(kk * e.col(a));
    const Vec3 x = hi * low;
    vec_set(out.X, k, x);
    double xn = 0.0;
    const Mat3 hh = sym_at(geom.hh, k);
    for (int a = 0; a < nf; ++a)
      for (int b2 = 0; b2 < nf; ++b2) xn += hh(a, b2) * x[a] * x[b2];
    out.X_norm2[k] = xn;
  }
  out.div_X = surface::divergence(geom, out.X);
  return out;
}

EnergyMomentum energy_momentum(const SurfaceGeometry& geom) {
  const Eigen::Index n = geom.nodes();
  const auto& model = *geom.surface.model;
  EnergyMomentum out;
  out.mu.resize(n);
  out.J_nu.resize(n);
  out.J_norm.resize(n);

  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec3 p = vec_at(geom.chart_x, k);
    const auto amb = ambient::ambient_at(
        model, p, ambient::kEvalCurvature | ambient::kEvalKDerivs);
    const Mat3 gi = amb.g_inv;
    const Mat3 kk = amb.K;
    const double trk = (gi * kk).trace();
    const double k2 = (gi * kk * gi * kk).trace();
    out.mu[k] = 0.5 * (amb.scalar + trk * trk - k2);

    // (div K)_j = g^{ik} (d_i K_kj - Gamma^l_ik K_lj - Gamma^l_ij K_kl)
    Vec3 divk = Vec3::Zero();
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int kc = 0; kc < 3; ++kc) {
          double t = amb.dK[i](kc, j);
          for (int l = 0; l < 3; ++l)
            t -= amb.gamma[l](i, kc) * kk(l, j) + amb.gamma[l](i, j) * kk(kc, l);
          acc += gi(i, kc) * t;
        }
      divk[j] = acc;
    }
    // d(tr K)_j = d_j (g^{ik} K_ik) = -g^{ia} d_j g_ab g^{bk} K_ik + g^{ik} d_j K_ik
    Vec3 dtrk = Vec3::Zero();
    const auto dg = ambient::metric_derivs(model, p);
    for (int j = 0; j < 3; ++j) {
      const Mat3 dgi = -gi * dg[j] * gi;
      dtrk[j] = (dgi * kk).trace() + (gi * amb.dK[j]).trace();
    }
    const Vec3 jv = divk - dtrk;
    out.J_nu[k] = jv.dot(vec_at(geom.nu_up, k));
    out.J_norm[k] = std::sqrt(std::max(0.0, jv.dot(gi * jv)));
  }
  out.dec_margin = out.mu - out.J_norm;
  return out;
}

Field normal_deriv_K_trace(const SurfaceGeometry& geom) {
  const Eigen::Index n = geom.nodes();
  const auto& model = *geom.surface.model;
  const int nf = geom.mesh().frame_dim;
  Field out = Field::Zero(n);
  if (model.time_symmetric()) return out;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec3 p = vec_at(geom.chart_x, k);
    const auto amb = ambient::ambient_at(model, p, ambient::kEvalKDerivs);
    const Vec3 nu = vec_at(geom.nu_up, k);
    Mat3 dk_nu = Mat3::Zero();  // (nabla_nu K)_ij
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int kc = 0; kc < 3; ++kc) {
          double t = amb.dK[kc](i, j);
          for (int l = 0; l < 3; ++l)
            t -= amb.gamma[l](kc, i) * amb.K(l, j) +
                 amb.gamma[l](kc, j) * amb.K(i, l);
          acc += nu[kc] * t;
        }
        dk_nu(i, j) = acc;
      }
    Mat3 e = Mat3::Zero();
    for (int a = 0; a < nf; ++a)
      for (int i = 0; i < 3; ++i) e(i, a) = geom.tangent[a][i][k];
    const Mat3 hi = sym_at(geom.hh_inv, k);
    double tr = 0.0;
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b)
        tr += hi(a, b) * e.col(a).dot(dk_nu * e.col(b));
    out[k] = tr;
  }
  return out;
}

TrappedClass classify(const NullGeometry& ng, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("classification tol must be > 0");
  const double sup_plus = sup_norm(ng.theta_plus);
  if (sup_plus <= tol) return TrappedClass::mots;
  const bool plus_neg = (ng.theta_plus < -tol).all();
  const bool minus_neg = (ng.theta_minus < -tol).all();
  if (plus_neg && minus_neg) return TrappedClass::trapped;
  if (plus_neg) return TrappedClass::outer_trapped;
  if ((ng.theta_plus > tol).all()) return TrappedClass::untrapped;
  return TrappedClass::mixed;
}

const char* to_string(TrappedClass c) {
  switch (c) {
    case TrappedClass::trapped: return "trapped";
    case TrappedClass::outer_trapped: return "outer_trapped";
    case TrappedClass::mots: return "MOTS";
    case TrappedClass::untrapped: return "untrapped";
    case TrappedClass::mixed: return "mixed";
  }
  return "?";
}

}  // namespace motslab::constraint
