#include "motslab/solver.hpp"

#include <cmath>
#include <limits>

#include "motslab/brane.hpp"
#include "motslab/constraint.hpp"

namespace motslab::solver {

using surface::EmbeddedSurface;
using surface::SurfaceGeometry;

namespace {

enum class Equation { mots, cmc };

Field residual_field(Equation eq, const SurfaceGeometry& g, double c) {
  if (eq == Equation::mots)
    return constraint::null_expansions(g).theta_plus - c;
  return g.mean_curvature - c;
}

stability::OperatorKind jacobian_kind(Equation eq) {
  return eq == Equation::mots ? stability::OperatorKind::L_bar_mots
                              : stability::OperatorKind::L_minimal;
}

double mean_height(const EmbeddedSurface& s) {
  return (s.mesh->quad_weights * s.height).sum() / s.mesh->quad_weights.sum();
}

// Nodal Newton Jacobian of the residual under height deformations:
// J = L . diag(w) + diag(v^a D_a R), with L the exact linearization of the
// target field under a normal lapse,
//   dH        = -Lap phi - (Ric(nu,nu) + |B|^2) phi,
//   d(tr_h K) = 2 <X, grad phi> + tr_h(nabla_nu K) phi,
// w the normal speed per unit height and v the tangential remainder of the
// height direction. At a MOTS this operator coincides with the stability
// operator assembly.
Eigen::MatrixXd height_jacobian(Equation eq,
                                std::shared_ptr<const SurfaceGeometry> geom,
                                const Field& res) {
  const SurfaceGeometry& g = *geom;
  const auto& mesh = g.mesh();
  Eigen::MatrixXd j = -surface::strong_laplacian_matrix(g);
  Field pot = -(g.ric_nu_nu + g.b_norm2);
  if (eq == Equation::mots && !g.surface.model->time_symmetric()) {
    const auto ng = constraint::null_expansions(g);
    for (int a = 0; a < mesh.frame_dim; ++a)
      j += 2.0 * ng.X[a].matrix().asDiagonal() * mesh.dframe[a];
    pot += constraint::normal_deriv_K_trace(g);
  }
  j += Eigen::MatrixXd(pot.matrix().asDiagonal());
  j = j * g.height_lapse.matrix().asDiagonal();
  Field adv = Field::Zero(g.nodes());
  for (int a = 0; a < mesh.frame_dim; ++a)
    adv += g.height_drift[a] * mesh.apply_dframe(a, res);
  j += Eigen::MatrixXd(adv.matrix().asDiagonal());
  return j;
}

struct NewtonCore {
  Equation eq;
  EmbeddedSurface surface;
  double target = 0.0;          // c in theta/H = c
  bool solve_constant = false;  // c is an unknown (foliation leaves)
  std::optional<double> pinned_mean;
  SolveOptions opts;

  std::shared_ptr<const SurfaceGeometry> geometry;
  Field res;
  NewtonReport report;

  double evaluate(const EmbeddedSurface& s, double c,
                  std::shared_ptr<const SurfaceGeometry>* out_geom,
                  Field* out_res) const {
    auto g = std::make_shared<const SurfaceGeometry>(surface::compute_geometry(s));
    Field r = residual_field(eq, *g, c);
    if (out_geom) *out_geom = g;
    if (out_res) *out_res = r;
    return sup_norm(r);
  }

  SolveResult run() {
    opts.validate();
    double c = target;
    double res_norm = evaluate(surface, c, &geometry, &res);
    report.residual_history.push_back(res_norm);

    const auto& mesh = *surface.mesh;
    const int ns = mesh.spectral_dim;
    const Eigen::VectorXd mean_row =
        (mesh.quad_weights.matrix().transpose() * mesh.synthesis) /
        mesh.quad_weights.sum();
    const Eigen::VectorXd ones_coeff =
        mesh.analysis * Eigen::VectorXd::Ones(mesh.num_nodes);

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
      if (res_norm <= opts.newton_tolerance) {
        report.converged = true;
        report.iterations = iter;
        report.final_residual = res_norm;
        SolveResult out{surface, geometry, report, {}};
        return out;
      }

      const Eigen::MatrixXd j_nodal = height_jacobian(eq, geometry, res);
      const Eigen::MatrixXd j =
          mesh.analysis * (j_nodal * mesh.synthesis);  // band restriction
      const Eigen::VectorXd rhs = -(mesh.analysis * res.matrix());

      Eigen::VectorXd delta_c;  // spectral coefficients of the height update
      double delta_t = 0.0;     // update of the constant c when solved for

      if (solve_constant) {
        // unknowns (delta F, delta c); rows: residual equations + mean pin
        Eigen::MatrixXd big(ns + 1, ns + 1);
        big.topLeftCorner(ns, ns) = j;
        big.topRightCorner(ns, 1) = -ones_coeff;  // d residual / dc = -1
        big.bottomLeftCorner(1, ns) = mean_row.transpose();
        big(ns, ns) = 0.0;
        Eigen::VectorXd brhs(ns + 1);
        brhs.head(ns) = rhs;
        brhs[ns] = pinned_mean ? (*pinned_mean - mean_height(surface)) : 0.0;
        const Eigen::VectorXd sol = big.partialPivLu().solve(brhs);
        delta_c = sol.head(ns);
        delta_t = sol[ns];
      } else {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(j);
        const double rc = lu.rcond();
        if (rc > 1e-10) {
          delta_c = lu.solve(rhs);
        } else {
          // near-singular Jacobian (constant-function kernel): solve on the
          // complement of constants, either keeping the current mean height
          // or pinning it to the requested level
          Eigen::MatrixXd big(ns + 1, ns + 1);
          big.topLeftCorner(ns, ns) = j;
          big.topRightCorner(ns, 1) = ones_coeff;  // slack along constants
          big.bottomLeftCorner(1, ns) = mean_row.transpose();
          big(ns, ns) = 0.0;
          Eigen::PartialPivLU<Eigen::MatrixXd> blu(big);
          if (blu.rcond() > 1e-10) {
            Eigen::VectorXd brhs(ns + 1);
            brhs.head(ns) = rhs;
            brhs[ns] =
                pinned_mean ? (*pinned_mean - mean_height(surface)) : 0.0;
            delta_c = blu.solve(brhs).head(ns);
          } else {
            // kernel beyond constants: truncated least-squares direction
            Eigen::BDCSVD<Eigen::MatrixXd> svd(
                j, Eigen::ComputeThinU | Eigen::ComputeThinV);
            svd.setThreshold(1e-8);
            delta_c = svd.solve(rhs);
          }
        }
      }

      const Field delta = (mesh.synthesis * delta_c).array();

      // backtracking on the sup-norm of the residual
      double step = opts.damping_initial;
      bool accepted = false;
      for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
        EmbeddedSurface trial = surface.displaced(step * delta);
        const double trial_c = c + step * delta_t;
        std::shared_ptr<const SurfaceGeometry> trial_geom;
        Field trial_res;
        double trial_norm;
        try {
          trial_norm = evaluate(trial, trial_c, &trial_geom, &trial_res);
        } catch (const std::exception&) {
          step *= 0.5;
          continue;
        }
        if (trial_norm < res_norm * (1.0 - 0.2 * step) ||
            trial_norm <= opts.newton_tolerance) {
          surface = std::move(trial);
          c = trial_c;
          geometry = trial_geom;
          res = trial_res;
          res_norm = trial_norm;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      report.residual_history.push_back(res_norm);
      if (!accepted) {
        report.final_residual = res_norm;
        report.iterations = iter + 1;
        throw NonConvergence(
            "Newton line search stalled; last residual " +
                std::to_string(res_norm),
            res_norm, report);
      }
    }
    if (res_norm <= opts.newton_tolerance) {
      report.converged = true;
      report.iterations = opts.max_iterations;
      report.final_residual = res_norm;
      return SolveResult{surface, geometry, report, {}};
    }
    report.final_residual = res_norm;
    report.iterations = opts.max_iterations;
    throw NonConvergence("Newton did not converge in " +
                             std::to_string(opts.max_iterations) +
                             " iterations; last residual " +
                             std::to_string(res_norm),
                         res_norm, report);
  }

  double constant_value() const { return target; }
};

}  // namespace

SolveResult find_mots(const EmbeddedSurface& guess, const SolveOptions& opts) {
  NewtonCore core{Equation::mots, guess, 0.0, false, opts.pinned_mean, opts};
  SolveResult out = core.run();
  out.spectrum = stability::principal_eigenvalue(
      stability::assemble(stability::OperatorKind::L_bar_mots, out.geometry));
  return out;
}

SolveResult find_cmc(const EmbeddedSurface& guess, double c,
                     const SolveOptions& opts) {
  NewtonCore core{Equation::cmc, guess, c, false, opts.pinned_mean, opts};
  SolveResult out = core.run();
  out.spectrum = stability::principal_eigenvalue(
      stability::assemble(stability::OperatorKind::L_minimal, out.geometry));
  return out;
}

namespace {

Leaf solve_leaf(Equation eq, const EmbeddedSurface& warm, double c_start,
                double t, const SolveOptions& opts) {
  NewtonCore core{eq, warm, c_start, true, t, opts};
  // start on the pinned level to keep the constraint row consistent
  SolveResult res = core.run();
  Leaf leaf;
  leaf.t = t;
  leaf.surface = res.surface;
  leaf.geometry = res.geometry;
  const Field field = eq == Equation::mots
                          ? constraint::null_expansions(*res.geometry).theta_plus
                          : Field(res.geometry->mean_curvature);
  const Field m = res.geometry->mass();
  leaf.constant_value = (m * field).sum() / m.sum();
  leaf.sup_deviation = sup_norm(field - leaf.constant_value);
  leaf.area = surface::area(*res.geometry);
  leaf.lambda1 = stability::principal_eigenvalue(
                     stability::assemble(jacobian_kind(eq), res.geometry))
                     .lambda1;
  return leaf;
}

}  // namespace

FoliationResult foliate(const EmbeddedSurface& base, FoliationMode mode,
                        double t_lo, double t_hi, int leaf_count,
                        const SolveOptions& opts) {
  if (leaf_count < 3) throw std::invalid_argument("leaf_count must be >= 3");
  if (!(t_hi > t_lo)) throw std::invalid_argument("empty leaf range");
  const Equation eq =
      mode == FoliationMode::cmc ? Equation::cmc : Equation::mots;

  FoliationResult out;
  out.mode = mode;
  const double t0 = mean_height(base);
  const double h = (t_hi - t_lo) / (leaf_count - 1);
  std::vector<double> ts(leaf_count);
  for (int i = 0; i < leaf_count; ++i) ts[i] = t0 + t_lo + i * h;

  // seed value of the leaf constant from the base surface
  auto base_geom = surface::compute_geometry(base);
  const Field base_field =
      eq == Equation::mots ? constraint::null_expansions(base_geom).theta_plus
                           : Field(base_geom.mean_curvature);
  const Field bm = base_geom.mass();
  double c0 = (bm * base_field).sum() / bm.sum();

  // sweep upward from the leaf nearest the base, then downward, warm-starting
  int start = 0;
  for (int i = 1; i < leaf_count; ++i)
    if (std::abs(ts[i] - t0) < std::abs(ts[start] - t0)) start = i;

  out.leaves.resize(leaf_count);
  EmbeddedSurface warm = base;
  double c = c0;
  for (int i = start; i < leaf_count; ++i) {
    warm = warm.displaced(Field::Constant(warm.mesh->num_nodes,
                                          ts[i] - mean_height(warm)));
    out.leaves[i] = solve_leaf(eq, warm, c, ts[i], opts);
    warm = out.leaves[i].surface;
    c = out.leaves[i].constant_value;
  }
  warm = out.leaves[start].surface;
  c = out.leaves[start].constant_value;
  for (int i = start - 1; i >= 0; --i) {
    warm = warm.displaced(Field::Constant(warm.mesh->num_nodes,
                                          ts[i] - mean_height(warm)));
    out.leaves[i] = solve_leaf(eq, warm, c, ts[i], opts);
    warm = out.leaves[i].surface;
    c = out.leaves[i].constant_value;
  }

  // ordered, non-intersecting graphs
  for (int i = 0; i + 1 < leaf_count; ++i) {
    const Field sep = out.leaves[i + 1].surface.height - out.leaves[i].surface.height;
    if (sep.minCoeff() <= 0.0)
      throw std::runtime_error("foliation leaves collide (graphs cross)");
  }

  // lapse recovery: normal speed w dF/dt, 4th-order centered differences in
  // the interior, second-order at the first interior ring, one-sided edges
  const Eigen::Index n = base.mesh->num_nodes;
  auto height = [&](int i) -> const Field& { return out.leaves[i].surface.height; };
  for (int i = 0; i < leaf_count; ++i) {
    Field dfdt(n);
    if (i >= 2 && i + 2 < leaf_count) {
      dfdt = (height(i - 2) - 8.0 * height(i - 1) + 8.0 * height(i + 1) -
              height(i + 2)) /
             (12.0 * h);
    } else if (i >= 1 && i + 1 < leaf_count) {
      dfdt = (height(i + 1) - height(i - 1)) / (2.0 * h);
    } else if (i == 0) {
      dfdt = (height(1) - height(0)) / h;
    } else {
      dfdt = (height(i) - height(i - 1)) / h;
    }
    out.leaves[i].lapse = out.leaves[i].geometry->height_lapse * dfdt;
    const Field target_field =
        eq == Equation::mots
            ? constraint::null_expansions(*out.leaves[i].geometry).theta_plus
            : Field(out.leaves[i].geometry->mean_curvature);
    out.leaves[i].flux =
        surface::integrate(*out.leaves[i].geometry,
                           target_field * out.leaves[i].lapse);
  }

  // derivative tables with the same stencils
  out.area_deriv.assign(leaf_count, 0.0);
  out.constant_deriv.assign(leaf_count, 0.0);
  out.deriv_valid.assign(leaf_count, false);
  auto table = [&](auto getter, std::vector<double>& dst) {
    for (int i = 0; i < leaf_count; ++i) {
      if (i >= 2 && i + 2 < leaf_count) {
        dst[i] = (getter(i - 2) - 8.0 * getter(i - 1) + 8.0 * getter(i + 1) -
                  getter(i + 2)) /
                 (12.0 * h);
        out.deriv_valid[i] = true;
      } else if (i >= 1 && i + 1 < leaf_count) {
        dst[i] = (getter(i + 1) - getter(i - 1)) / (2.0 * h);
        out.deriv_valid[i] = true;
      }
    }
  };
  table([&](int i) { return out.leaves[i].area; }, out.area_deriv);
  table([&](int i) { return out.leaves[i].constant_value; }, out.constant_deriv);
  return out;
}

Field rescaled_scalar_residual(const Leaf& leaf, double c_deriv) {
  const SurfaceGeometry& g = *leaf.geometry;
  const Field& phi = leaf.lapse;
  if (phi.minCoeff() <= 0.0)
    throw std::runtime_error("nonpositive lapse in rescaled-curvature check");
  const int n = g.surface.model->dim;
  const double nm2 = n - 2.0;
  const auto conf = stability::conformal_scalar(g, phi, n);
  const VecField grad_phi = surface::gradient(g, phi);
  const Field grad2 = surface::inner(g, grad_phi, grad_phi);
  const Field rhs = phi.pow(-2.0 / nm2) *
                    (2.0 * c_deriv / phi + g.amb_scalar + g.b_norm2 +
                     g.mean_curvature.square() +
                     (n - 1.0) / nm2 * grad2 / phi.square());
  return conf.s_tilde_direct - rhs;
}

namespace {

double scalar_quantity(VariationKind kind, const SurfaceGeometry& g) {
  switch (kind) {
    case VariationKind::area_second_variation:
      return surface::area(g);
    case VariationKind::brane_first:
    case VariationKind::brane_second:
      return brane::brane_action(g).action;
    default:
      throw std::logic_error("not a scalar variation");
  }
}

Field field_quantity(VariationKind kind, const SurfaceGeometry& g) {
  if (kind == VariationKind::mean_curvature_evolution) return g.mean_curvature;
  return constraint::null_expansions(g).theta_plus;
}

}  // namespace

VariationReport variation_check(const EmbeddedSurface& surf, const Field& phi,
                                VariationKind kind,
                                const std::vector<double>& eps_ladder) {
  if (eps_ladder.size() < 2)
    throw std::invalid_argument("eps ladder needs at least two entries");
  for (size_t i = 1; i < eps_ladder.size(); ++i)
    if (!(eps_ladder[i] < eps_ladder[i - 1]) || eps_ladder[i] <= 0.0)
      throw std::invalid_argument("eps ladder must be positive decreasing");

  auto g0p = std::make_shared<const SurfaceGeometry>(surface::compute_geometry(surf));
  const SurfaceGeometry& g0 = *g0p;
  const int ndim = surf.model->dim;

  // stationarity hypotheses of the variation formulas
  const double hyp_tol = 1e-6;
  switch (kind) {
    case VariationKind::area_second_variation:
      if (sup_norm(g0.mean_curvature) > hyp_tol)
        throw std::invalid_argument(
            "area second variation requires a minimal surface");
      break;
    case VariationKind::brane_second:
      if (sup_norm(g0.mean_curvature - (ndim - 1)) > hyp_tol)
        throw std::invalid_argument(
            "brane second variation requires H = n-1");
      break;
    case VariationKind::mean_curvature_evolution: {
      const Field m = g0.mass();
      const double mean_h = (m * g0.mean_curvature).sum() / m.sum();
      if (sup_norm(g0.mean_curvature - mean_h) > hyp_tol)
        throw std::invalid_argument(
            "mean curvature evolution check requires a CMC surface");
      break;
    }
    case VariationKind::null_expansion_derivative:
      if (sup_norm(constraint::null_expansions(g0).theta_plus) > hyp_tol)
        throw std::invalid_argument(
            "null expansion derivative check requires a MOTS");
      break;
    case VariationKind::brane_first:
      break;
  }

  // analytic values
  double analytic_scalar = 0.0;
  Field analytic_field;
  bool is_second = false, is_field = false;
  switch (kind) {
    case VariationKind::area_second_variation: {
      const auto op = stability::assemble(stability::OperatorKind::L_minimal, g0p);
      analytic_scalar = surface::integrate(g0, phi * op.apply(phi));
      is_second = true;
      break;
    }
    case VariationKind::brane_first:
      analytic_scalar = brane::brane_first_variation(g0, phi);
      break;
    case VariationKind::brane_second: {
      const auto op = stability::assemble(stability::OperatorKind::L_brane, g0p);
      analytic_scalar = surface::integrate(g0, phi * op.apply(phi));
      is_second = true;
      break;
    }
    case VariationKind::mean_curvature_evolution: {
      // dH/dt = -Lap phi + (S_Sigma - S - |B|^2 - H^2) phi / 2
      analytic_field =
          -surface::laplace_beltrami(g0, phi) +
          0.5 *
              (g0.intrinsic_scalar - g0.amb_scalar - g0.b_norm2 -
               g0.mean_curvature.square()) *
              phi;
      is_field = true;
      break;
    }
    case VariationKind::null_expansion_derivative: {
      const auto op = stability::assemble(stability::OperatorKind::L_bar_mots, g0p);
      analytic_field = op.apply(phi);
      is_field = true;
      break;
    }
  }

  const Field step_height = phi / g0.height_lapse;  // normal speed phi
  VariationReport rep;
  rep.kind = kind;
  rep.analytic_scale =
      is_field ? sup_norm(analytic_field) : std::abs(analytic_scalar);

  for (double eps : eps_ladder) {
    const EmbeddedSurface plus = surf.displaced(eps * step_height);
    const EmbeddedSurface minus = surf.displaced(-eps * step_height);
    double err = 0.0;
    if (is_field) {
      const Field fp = field_quantity(kind, surface::compute_geometry(plus));
      const Field fm = field_quantity(kind, surface::compute_geometry(minus));
      err = sup_norm((fp - fm) / (2.0 * eps) - analytic_field);
    } else {
      const double qp = scalar_quantity(kind, surface::compute_geometry(plus));
      const double qm = scalar_quantity(kind, surface::compute_geometry(minus));
      if (is_second) {
        const double q0 = scalar_quantity(kind, g0);
        err = std::abs((qp - 2.0 * q0 + qm) / (eps * eps) - analytic_scalar);
      } else {
        err = std::abs((qp - qm) / (2.0 * eps) - analytic_scalar);
      }
    }
    rep.eps.push_back(eps);
    rep.errors.push_back(err);
  }

  // least-squares slope of log(err) against log(eps)
  const double floor_scale = 1e-11 * std::max(1.0, rep.analytic_scale);
  rep.trivially_exact = true;
  for (double e : rep.errors)
    if (e > floor_scale) rep.trivially_exact = false;
  if (rep.trivially_exact) {
    rep.observed_order = std::numeric_limits<double>::infinity();
    return rep;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = int(rep.eps.size());
  for (int i = 0; i < m; ++i) {
    const double x = std::log(rep.eps[i]);
    const double y = std::log(std::max(rep.errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.observed_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return rep;
}

}  // namespace motslab::solver
