#include "motslab/ambient.hpp"

#include <limits>
#include <random>

#include "motslab/expr.hpp"

namespace motslab::ambient {

namespace {

constexpr double kFd4[4] = {1.0, -8.0, 8.0, -1.0};     // offsets -2h,-h,+h,+2h
constexpr double kOff[4] = {-2.0, -1.0, 1.0, 2.0};

template <typename F>
auto fd_deriv(const F& f, const Vec3& p, int dir, double h) -> decltype(f(p)) {
  decltype(f(p)) acc = kFd4[0] * f(p + h * kOff[0] * Vec3::Unit(dir));
  for (int s = 1; s < 4; ++s)
    acc += kFd4[s] * f(p + h * kOff[s] * Vec3::Unit(dir));
  return acc / (12.0 * h);
}

double require_positive(const std::map<std::string, double>& params,
                        const std::string& key, double fallback) {
  auto it = params.find(key);
  const double v = it == params.end() ? fallback : it->second;
  if (v <= 0.0)
    throw std::invalid_argument("model parameter '" + key +
                                "' must be positive");
  return v;
}

double param_or(const std::map<std::string, double>& params,
                const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::shared_ptr<AmbientModel> base_model(const std::string& name) {
  auto m = std::make_shared<AmbientModel>();
  m->name = name;
  m->metric_eval = [](const Vec3&) { return Mat3::Identity(); };
  m->metric_deriv_eval = [](const Vec3&) {
    return std::array<Mat3, 3>{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  };
  m->closed_form_curvature = [](const Vec3&, Mat3& ric, double& s) {
    ric.setZero();
    s = 0.0;
  };
  return m;
}

Mat3 constant_k_from_params(const std::map<std::string, double>& params) {
  Mat3 k;
  k << param_or(params, "kxx", 0.0), param_or(params, "kxy", 0.0),
      param_or(params, "kxz", 0.0), param_or(params, "kxy", 0.0),
      param_or(params, "kyy", 0.0), param_or(params, "kyz", 0.0),
      param_or(params, "kxz", 0.0), param_or(params, "kyz", 0.0),
      param_or(params, "kzz", 0.0);
  return k;
}

std::shared_ptr<AmbientModel> make_schwarzschild(double m) {
  auto model = base_model("schwarzschild_isotropic");
  model->description =
      "time-symmetric Schwarzschild slice in isotropic coordinates, "
      "g = (1 + m/2r)^4 delta; horizon at r = m/2";
  model->chart_domain.radial_min = 0.02 * m;
  model->sample_lo = Vec3::Constant(-2.0 * m);
  model->sample_hi = Vec3::Constant(2.0 * m);
  const double half_m = 0.5 * m;
  auto psi = [half_m](const Vec3& p) { return 1.0 + half_m / p.norm(); };
  model->metric_eval = [psi](const Vec3& p) {
    return Mat3(std::pow(psi(p), 4) * Mat3::Identity());
  };
  model->metric_deriv_eval = [psi, half_m](const Vec3& p) {
    const double r = p.norm();
    const double ps = psi(p);
    std::array<Mat3, 3> d;
    for (int k = 0; k < 3; ++k) {
      const double dpsi = -half_m * p[k] / (r * r * r);
      d[k] = 4.0 * std::pow(ps, 3) * dpsi * Mat3::Identity();
    }
    return d;
  };
  model->closed_form_curvature = [psi, half_m](const Vec3& p, Mat3& ric,
                                               double& s) {
    // g = e^{2w} delta with w = 2 ln(psi):
    // Ric_ij = -(d_i d_j w - d_i w d_j w) - (Lap w + |dw|^2) delta_ij
    const double r = p.norm();
    const double ps = psi(p);
    Vec3 dpsi = -half_m / (r * r * r) * p;
    Mat3 hess;  // of psi (harmonic: trace 0)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        hess(i, j) = -half_m * ((i == j ? 1.0 : 0.0) / (r * r * r) -
                                3.0 * p[i] * p[j] / std::pow(r, 5));
    Vec3 dw = 2.0 / ps * dpsi;
    Mat3 hw = 2.0 / ps * hess - 2.0 / (ps * ps) * dpsi * dpsi.transpose();
    const double lap_w = hw.trace();
    ric = -(hw - dw * dw.transpose()) -
          (lap_w + dw.squaredNorm()) * Mat3::Identity();
    s = std::pow(ps, -4) *
        (ric(0, 0) + ric(1, 1) + ric(2, 2));  // g^{ij} = psi^-4 delta
  };
  return model;
}

std::shared_ptr<AmbientModel> make_cylinder(double radius) {
  auto model = base_model("cylinder_S2xR");
  model->description =
      "round cylinder S^2(radius) x R in exponential-radial chart: "
      "coordinate spheres are the z = const cross sections";
  model->chart_domain.radial_min = 0.05;
  model->sample_lo = Vec3::Constant(-1.5);
  model->sample_hi = Vec3::Constant(1.5);
  const double rho2 = radius * radius;
  model->metric_eval = [rho2](const Vec3& p) {
    const double r2 = p.squaredNorm();
    Mat3 g = (rho2 / r2) * Mat3::Identity() +
             ((1.0 - rho2) / (r2 * r2)) * p * p.transpose();
    return g;
  };
  model->metric_deriv_eval = [rho2](const Vec3& p) {
    const double r2 = p.squaredNorm();
    std::array<Mat3, 3> d;
    for (int k = 0; k < 3; ++k) {
      Mat3 t = (-2.0 * rho2 * p[k] / (r2 * r2)) * Mat3::Identity();
      Mat3 dxx = Mat3::Zero();
      dxx.row(k) += p.transpose();
      dxx.col(k) += p;
      t += (1.0 - rho2) *
           (dxx / (r2 * r2) - 4.0 * p[k] / (r2 * r2 * r2) * p * p.transpose());
      d[k] = t;
    }
    return d;
  };
  model->closed_form_curvature = [rho2](const Vec3& p, Mat3& ric, double& s) {
    const double r2 = p.squaredNorm();
    ric = (1.0 / r2) * (Mat3::Identity() - p * p.transpose() / r2);
    s = 2.0 / rho2;
  };
  return model;
}

std::shared_ptr<AmbientModel> make_hyperbolic(const std::string& name,
                                              double p1, double p2) {
  // chart (t, x, y), g = dt^2 + e^{2t}(dx^2 + dy^2)
  auto model = base_model(name);
  model->description = "g = dt^2 + e^{2t}(dx^2 + dy^2)" +
                       std::string(p1 > 0 ? ", x/y periodic (cusp torus)" : "");
  model->metric_eval = [](const Vec3& p) {
    const double e2t = std::exp(2.0 * p[0]);
    return Mat3(Vec3(1.0, e2t, e2t).asDiagonal());
  };
  model->metric_deriv_eval = [](const Vec3& p) {
    const double e2t = std::exp(2.0 * p[0]);
    std::array<Mat3, 3> d{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    d[0] = Vec3(0.0, 2.0 * e2t, 2.0 * e2t).asDiagonal();
    return d;
  };
  model->closed_form_curvature = [](const Vec3& p, Mat3& ric, double& s) {
    const double e2t = std::exp(2.0 * p[0]);
    ric = Vec3(-2.0, -2.0 * e2t, -2.0 * e2t).asDiagonal();
    s = -6.0;
  };
  model->lambda_coefficient = [](double t) { return 0.5 * std::exp(2.0 * t); };
  if (p1 > 0.0) {
    model->chart_domain.periodic = {false, true, true};
    model->chart_domain.lo = Vec3(-1e9, 0.0, 0.0);
    model->chart_domain.hi = Vec3(1e9, p1, p2);
  }
  model->sample_lo = Vec3(-1.0, 0.0, 0.0);
  model->sample_hi = Vec3(1.0, p1 > 0 ? p1 : 2.0, p2 > 0 ? p2 : 2.0);
  return model;
}

std::shared_ptr<AmbientModel> make_product_torus(double p1, double p2) {
  auto model = base_model("product_line_x_flat_torus");
  model->description = "flat product R x T^2, g = dt^2 + dx^2 + dy^2";
  model->chart_domain.periodic = {false, true, true};
  model->chart_domain.lo = Vec3(-1e9, 0.0, 0.0);
  model->chart_domain.hi = Vec3(1e9, p1, p2);
  model->sample_lo = Vec3(-1.0, 0.0, 0.0);
  model->sample_hi = Vec3(1.0, p1, p2);
  return model;
}

std::shared_ptr<AmbientModel> make_conformally_flat(const ModelSpec& spec) {
  auto model = base_model("conformally_flat");
  model->description = "g = psi^4 delta with user expressions for psi and K";
  model->closed_form_curvature = nullptr;
  model->metric_deriv_eval = nullptr;
  model->fd_step = param_or(spec.params, "fd_step", 1e-2);
  model->chart_domain.radial_min = param_or(spec.params, "radial_min", 0.0);

  auto expr_or = [&spec](const std::string& key, const std::string& fallback) {
    auto it = spec.exprs.find(key);
    return std::make_shared<expr::Expression>(
        it == spec.exprs.end() ? fallback : it->second);
  };
  auto psi = expr_or("psi", "1");
  model->metric_eval = [psi](const Vec3& p) {
    std::map<std::string, double> v{
        {"x", p[0]}, {"y", p[1]}, {"z", p[2]}, {"r", p.norm()}};
    const double ps = psi->eval(v);
    return Mat3(std::pow(ps, 4) * Mat3::Identity());
  };

  const bool has_k = spec.exprs.count("kxx") || spec.exprs.count("kxy") ||
                     spec.exprs.count("kxz") || spec.exprs.count("kyy") ||
                     spec.exprs.count("kyz") || spec.exprs.count("kzz");
  if (has_k) {
    std::array<std::shared_ptr<expr::Expression>, 6> kc = {
        expr_or("kxx", "0"), expr_or("kxy", "0"), expr_or("kxz", "0"),
        expr_or("kyy", "0"), expr_or("kyz", "0"), expr_or("kzz", "0")};
    model->extrinsic_eval = [kc](const Vec3& p) {
      std::map<std::string, double> v{
          {"x", p[0]}, {"y", p[1]}, {"z", p[2]}, {"r", p.norm()}};
      Mat3 k;
      k << kc[0]->eval(v), kc[1]->eval(v), kc[2]->eval(v), kc[1]->eval(v),
          kc[3]->eval(v), kc[4]->eval(v), kc[2]->eval(v), kc[4]->eval(v),
          kc[5]->eval(v);
      return k;
    };
  }
  return model;
}

}  // namespace

std::shared_ptr<const AmbientModel> build_model(const ModelSpec& spec) {
  const auto& name = spec.name;
  const auto& params = spec.params;
  if (name == "euclidean") {
    auto m = base_model(name);
    m->description = "flat Euclidean 3-space, K = 0";
    return m;
  }
  if (name == "minkowski_slice_with_K") {
    auto m = base_model(name);
    m->description = "flat slice with constant extrinsic curvature K";
    const Mat3 k = constant_k_from_params(params);
    if (!k.isZero()) {
      m->extrinsic_eval = [k](const Vec3&) { return k; };
      m->extrinsic_deriv_eval = [](const Vec3&) {
        return std::array<Mat3, 3>{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
      };
    }
    return m;
  }
  if (name == "schwarzschild_isotropic")
    return make_schwarzschild(require_positive(params, "m", 1.0));
  if (name == "cylinder_S2xR")
    return make_cylinder(require_positive(params, "radius", 1.0));
  if (name == "hyperbolic_g1") {
    auto m = make_hyperbolic(name, param_or(params, "period1", 0.0),
                             param_or(params, "period2", 0.0));
    m->lambda_offset = param_or(params, "lambda_offset", 0.0);
    return m;
  }
  if (name == "hyperbolic_cusp") {
    auto m = make_hyperbolic(name, require_positive(params, "period1", 2.0 * kPi),
                             require_positive(params, "period2", 2.0 * kPi));
    m->lambda_offset = param_or(params, "lambda_offset", 0.0);
    return m;
  }
  if (name == "product_line_x_flat_torus")
    return make_product_torus(require_positive(params, "period1", 2.0 * kPi),
                              require_positive(params, "period2", 2.0 * kPi));
  if (name == "conformally_flat") return make_conformally_flat(spec);
  throw std::invalid_argument("unknown model '" + name + "'");
}

std::shared_ptr<const AmbientModel> builtin_model(
    const std::string& name, const std::map<std::string, double>& params) {
  return build_model(ModelSpec{name, params, {}});
}

std::array<Mat3, 3> metric_derivs(const AmbientModel& model, const Vec3& p) {
  if (model.metric_deriv_eval) return model.metric_deriv_eval(p);
  std::array<Mat3, 3> d;
  for (int k = 0; k < 3; ++k)
    d[k] = fd_deriv(model.metric_eval, p, k, model.fd_step);
  return d;
}

std::array<Mat3, 3> christoffels(const AmbientModel& model, const Vec3& p) {
  const Mat3 g = model.metric_eval(p);
  const Mat3 gi = g.inverse();
  const auto dg = metric_derivs(model, p);
  std::array<Mat3, 3> gamma;
  for (int k = 0; k < 3; ++k) gamma[k].setZero();
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Vec3 low;  // Gamma_{l,ij} = (d_i g_lj + d_j g_li - d_l g_ij)/2
      for (int l = 0; l < 3; ++l)
        low[l] = 0.5 * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
      const Vec3 up = gi * low;
      for (int k = 0; k < 3; ++k) {
        gamma[k](i, j) = up[k];
        gamma[k](j, i) = up[k];
      }
    }
  return gamma;
}

namespace {

void ricci_from_fd(const AmbientModel& model, const Vec3& p, Mat3& ric,
                   double& s) {
  const double h = model.fd_step;
  if (!model.chart_domain.contains(p, 2.0 * h))
    throw std::runtime_error(
        "point too close to the chart boundary for the curvature stencil");
  // d_mu Gamma^k_ij by 4th-order differences of the Christoffel field
  std::array<std::array<Mat3, 3>, 3> dgamma;  // dgamma[mu][k]
  for (int mu = 0; mu < 3; ++mu) {
    for (int k = 0; k < 3; ++k) dgamma[mu][k].setZero();
    for (int st = 0; st < 4; ++st) {
      const Vec3 q = p + h * kOff[st] * Vec3::Unit(mu);
      const Mat3 gq = model.metric_eval(q);
      if (Eigen::SelfAdjointEigenSolver<Mat3>(0.5 * (gq + gq.transpose()))
              .eigenvalues()
              .minCoeff() <= 0.0)
        throw std::runtime_error("metric not positive definite at stencil node");
      const auto gam_q = christoffels(model, q);
      for (int k = 0; k < 3; ++k)
        dgamma[mu][k] += kFd4[st] / (12.0 * h) * gam_q[k];
    }
  }
  const auto gamma = christoffels(model, p);
  const Mat3 gi = model.metric_eval(p).inverse();
  // Ric_{sn} = d_mu Gamma^mu_{ns} - d_n Gamma^mu_{mu s}
  //            + Gamma^mu_{mu l} Gamma^l_{ns} - Gamma^mu_{nl} Gamma^l_{mu s}
  for (int sg = 0; sg < 3; ++sg)
    for (int nu = 0; nu < 3; ++nu) {
      double r = 0.0;
      for (int mu = 0; mu < 3; ++mu) {
        r += dgamma[mu][mu](nu, sg) - dgamma[nu][mu](mu, sg);
        for (int l = 0; l < 3; ++l)
          r += gamma[mu](mu, l) * gamma[l](nu, sg) -
               gamma[mu](nu, l) * gamma[l](mu, sg);
      }
      ric(sg, nu) = r;
    }
  ric = Mat3(0.5 * (ric + ric.transpose()));
  s = (gi * ric).trace();
}

}  // namespace

CurvatureSample curvature_at(const AmbientModel& model, const Vec3& p) {
  if (!model.chart_domain.contains(p))
    throw std::runtime_error("chart point outside the model domain");
  CurvatureSample out;
  out.point = p;
  out.christoffel = christoffels(model, p);
  if (model.closed_form_curvature) {
    model.closed_form_curvature(p, out.ricci, out.scalar);
  } else {
    ricci_from_fd(model, p, out.ricci, out.scalar);
  }
  return out;
}

AmbientPointData ambient_at(const AmbientModel& model, const Vec3& p,
                            unsigned flags) {
  if (!model.chart_domain.contains(p))
    throw std::runtime_error("chart point outside the model domain");
  AmbientPointData d;
  d.g = model.metric_eval(p);
  d.g_inv = d.g.inverse();
  d.gamma = christoffels(model, p);
  if (model.extrinsic_eval) d.K = model.extrinsic_eval(p);
  if (flags & kEvalCurvature) {
    if (model.closed_form_curvature)
      model.closed_form_curvature(p, d.ricci, d.scalar);
    else
      ricci_from_fd(model, p, d.ricci, d.scalar);
  }
  if ((flags & kEvalKDerivs) && model.extrinsic_eval) {
    if (model.extrinsic_deriv_eval) {
      d.dK = model.extrinsic_deriv_eval(p);
    } else {
      for (int k = 0; k < 3; ++k)
        d.dK[k] = fd_deriv(model.extrinsic_eval, p, k, model.fd_step);
    }
  }
  return d;
}

ValidationReport validate_model(const AmbientModel& model, int sample_count,
                                unsigned seed) {
  if (sample_count < 1)
    throw std::invalid_argument("sample_count must be >= 1");
  ValidationReport rep;
  rep.sample_count = sample_count;
  rep.seed = seed;
  rep.has_closed_form = static_cast<bool>(model.closed_form_curvature);
  rep.min_metric_eigenvalue = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int accepted = 0;
  while (accepted < sample_count) {
    Vec3 p;
    for (int i = 0; i < 3; ++i)
      p[i] = model.sample_lo[i] +
             uni(rng) * (model.sample_hi[i] - model.sample_lo[i]);
    if (!model.chart_domain.contains(p, 4.0 * model.fd_step)) continue;
    ++accepted;

    const Mat3 g = model.metric_eval(p);
    rep.max_metric_asymmetry =
        std::max(rep.max_metric_asymmetry, (g - g.transpose()).cwiseAbs().maxCoeff());
    const Mat3 gs = 0.5 * (g + g.transpose());
    const double mineig =
        Eigen::SelfAdjointEigenSolver<Mat3>(gs).eigenvalues().minCoeff();
    rep.min_metric_eigenvalue = std::min(rep.min_metric_eigenvalue, mineig);
    if (mineig <= 0.0) rep.positive_definite = false;

    if (model.extrinsic_eval) {
      const Mat3 k = model.extrinsic_eval(p);
      rep.max_extrinsic_asymmetry = std::max(
          rep.max_extrinsic_asymmetry, (k - k.transpose()).cwiseAbs().maxCoeff());
    }

    if (rep.has_closed_form && rep.positive_definite) {
      Mat3 ric_cf;
      double s_cf = 0.0;
      model.closed_form_curvature(p, ric_cf, s_cf);
      Mat3 ric_fd;
      double s_fd = 0.0;
      ricci_from_fd(model, p, ric_fd, s_fd);
      rep.max_curvature_discrepancy =
          std::max({rep.max_curvature_discrepancy,
                    (ric_cf - ric_fd).cwiseAbs().maxCoeff(),
                    std::abs(s_cf - s_fd)});
    }
  }
  return rep;
}

}  // namespace motslab::ambient
