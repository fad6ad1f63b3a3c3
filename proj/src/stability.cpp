#include "motslab/stability.hpp"

#include <algorithm>
#include <complex>
#include <limits>

namespace motslab::stability {

using surface::SurfaceGeometry;

const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::L_minimal: return "L_minimal";
    case OperatorKind::L0_symmetrized: return "L0_symmetrized";
    case OperatorKind::L_bar_mots: return "L_bar_mots";
    case OperatorKind::L_brane: return "L_brane";
  }
  return "?";
}

OperatorMatrix assemble(OperatorKind kind,
                        std::shared_ptr<const SurfaceGeometry> geom) {
  if (!geom) throw std::invalid_argument("assemble: null geometry");
  const SurfaceGeometry& g = *geom;
  const Eigen::Index n = g.nodes();

  OperatorMatrix op;
  op.kind = kind;
  op.surface_ref = geom;
  op.mass = g.mass();
  op.drift = make_vec_field(n);

  switch (kind) {
    case OperatorKind::L_minimal:
      op.potential = -(g.ric_nu_nu + g.b_norm2);
      break;
    case OperatorKind::L_brane: {
      const int nn = g.surface.model->dim;
      const Field s_n = g.amb_scalar + double(nn) * (nn - 1);
      op.potential = 0.5 * (g.intrinsic_scalar - s_n - g.b0_norm2);
      break;
    }
    case OperatorKind::L0_symmetrized:
    case OperatorKind::L_bar_mots: {
      const auto ng = constraint::null_expansions(g);
      const auto em = constraint::energy_momentum(g);
      Field q = 0.5 * g.intrinsic_scalar - (em.mu + em.J_nu) -
                0.5 * ng.chi_plus_norm2;
      if (kind == OperatorKind::L_bar_mots) {
        op.potential = q + ng.div_X - ng.X_norm2;
        op.drift = ng.X;
        op.symmetric_flag = sup_norm(ng.X_norm2) <= 1e-20;
      } else {
        op.potential = q;
      }
      break;
    }
  }

  // -Lap as the quadrature-weak block M^{-1} K
  const Eigen::MatrixXd stiff = surface::weak_stiffness_matrix(g);
  op.matrix = (1.0 / op.mass).matrix().asDiagonal() * stiff;
  if (kind == OperatorKind::L_bar_mots) {
    // 2 <X, grad phi>_h = 2 X^a D_a phi: the metric cancels in the pairing
    const auto& mesh = g.mesh();
    for (int a = 0; a < mesh.frame_dim; ++a)
      op.matrix += 2.0 * op.drift[a].matrix().asDiagonal() * mesh.dframe[a];
  }
  op.matrix += Eigen::MatrixXd(op.potential.matrix().asDiagonal());
  return op;
}

namespace {

struct Candidate {
  double re, im;
  Eigen::VectorXd vec;  // phase-normalized real part
  double vec_imag;      // residual imaginary magnitude after normalization
  bool one_signed;
};

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

Field normalize_max_abs(Eigen::VectorXd v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  v /= v[imax];
  return v.array();
}

bool is_one_signed(const Field& f) {
  // after max-abs normalization to +1, strict one-signedness up to roundoff
  return f.minCoeff() > -1e-10;
}

double operator_residual(const Eigen::MatrixXd& a, double lambda,
                         const Field& v) {
  const Eigen::VectorXd vv = v.matrix();
  return (a * vv - lambda * vv).norm() / vv.norm();
}

// Galerkin restriction to the resolved band: G = S^T M S (Gram in the
// surface measure), Bhat = S^T M Op S. The grid carries aliasing content
// that the spectral derivative matrices annihilate; restricting removes it
// from the eigenproblem.
struct GalerkinPair {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd op;
};

GalerkinPair galerkin_restrict(const OperatorMatrix& op) {
  const auto& mesh = op.surface_ref->mesh();
  const Eigen::MatrixXd ms = op.mass.matrix().asDiagonal() * mesh.synthesis;
  GalerkinPair g;
  g.gram = mesh.synthesis.transpose() * ms;
  g.gram = 0.5 * (g.gram + g.gram.transpose()).eval();
  g.op = ms.transpose() * (op.matrix * mesh.synthesis);
  return g;
}

Spectrum symmetric_principal(const OperatorMatrix& op) {
  const auto& mesh = op.surface_ref->mesh();
  GalerkinPair gal = galerkin_restrict(op);
  gal.op = 0.5 * (gal.op + gal.op.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(gal.op, gal.gram);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigensolver failed to converge");
  Spectrum s;
  s.lambda1 = es.eigenvalues()[0];
  s.imag_residual = 0.0;
  s.eigenfunction = normalize_max_abs(mesh.synthesis * es.eigenvectors().col(0));
  s.positivity_ok = is_one_signed(s.eigenfunction);
  s.solver_residual = operator_residual(op.matrix, s.lambda1, s.eigenfunction);
  if (!s.positivity_ok)
    throw std::runtime_error(
        "principal eigenfunction is not one-signed (assembly bug or "
        "under-resolved mesh)");
  return s;
}

Spectrum nonsymmetric_principal(const OperatorMatrix& op) {
  const auto& mesh = op.surface_ref->mesh();
  const GalerkinPair gal = galerkin_restrict(op);
  const Eigen::MatrixXd t = gal.gram.llt().solve(gal.op);
  Eigen::EigenSolver<Eigen::MatrixXd> es(t);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  const auto& vals = es.eigenvalues();

  std::vector<Candidate> cands;
  cands.reserve(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    Candidate c;
    c.re = vals[i].real();
    c.im = vals[i].imag();
    Eigen::VectorXcd v = mesh.synthesis * es.eigenvectors().col(i);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    v /= v[imax];  // phase rotation: largest entry becomes +1
    c.vec = v.real();
    c.vec_imag = v.imag().cwiseAbs().maxCoeff();
    c.one_signed = c.vec_imag <= 1e-8 && Field(c.vec.array()).minCoeff() > -1e-10;
    cands.push_back(std::move(c));
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.re != b.re) return a.re < b.re;
    if (std::abs(a.im) != std::abs(b.im)) return std::abs(a.im) < std::abs(b.im);
    return lex_less(a.vec, b.vec);
  });
  for (const auto& c : cands) {
    if (!c.one_signed) continue;
    Spectrum s;
    s.lambda1 = c.re;
    s.imag_residual = std::abs(c.im);
    s.eigenfunction = normalize_max_abs(c.vec);
    s.positivity_ok = true;
    s.solver_residual = operator_residual(op.matrix, c.re, s.eigenfunction);
    return s;
  }
  throw std::runtime_error(
      "no one-signed eigenfunction found: cannot identify the principal "
      "eigenvalue");
}

}  // namespace

Spectrum principal_eigenvalue(const OperatorMatrix& op) {
  return op.symmetric_flag ? symmetric_principal(op)
                           : nonsymmetric_principal(op);
}

double rayleigh_quotient(const OperatorMatrix& op, const Field& psi) {
  if (!op.symmetric_flag)
    throw std::invalid_argument("Rayleigh quotient needs a symmetric operator");
  if (sup_norm(psi) == 0.0)
    throw std::invalid_argument("Rayleigh quotient of the zero function");
  const Eigen::VectorXd v = psi.matrix();
  const double denom = (op.mass * psi * psi).sum();
  const double numer = v.dot(op.mass.matrix().asDiagonal() * (op.matrix * v));
  return numer / denom;
}

double rayleigh_minimize(const OperatorMatrix& op, int trials, unsigned seed) {
  if (!op.symmetric_flag)
    throw std::invalid_argument("Rayleigh minimization needs a symmetric operator");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const auto& mesh = op.surface_ref->mesh();
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();

  GalerkinPair gal = galerkin_restrict(op);
  gal.op = 0.5 * (gal.op + gal.op.transpose()).eval();

  auto quotient = [&](const Eigen::VectorXd& c) {
    return c.dot(gal.op * c) / c.dot(gal.gram * c);
  };

  const auto gram_ldlt = gal.gram.ldlt();
  for (int t = 0; t < trials; ++t) {
    Field f = mesh.random_band_limited(rng, std::max(2, mesh.band_limit / 3), 1.0);
    f += 0.25;  // bias so constants are reachable
    Eigen::VectorXd c = (mesh.analysis * f.matrix()).normalized();
    double q = quotient(c);
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(c.size());
    // blocked Rayleigh-Ritz descent on span{c, preconditioned residual, prev}
    for (int it = 0; it < 300; ++it) {
      const Eigen::VectorXd r = gal.op * c - q * (gal.gram * c);
      const Eigen::VectorXd w = gram_ldlt.solve(r);
      std::vector<Eigen::VectorXd> basis{c, w};
      if (prev.norm() > 0.0) basis.push_back(prev);
      // M-orthonormalize the small basis
      std::vector<Eigen::VectorXd> ortho;
      for (auto& v : basis) {
        Eigen::VectorXd u = v;
        for (const auto& o : ortho) u -= o.dot(gal.gram * u) * o;
        const double un = std::sqrt(std::max(0.0, u.dot(gal.gram * u)));
        if (un > 1e-12) ortho.push_back(u / un);
      }
      const int d = int(ortho.size());
      if (d < 2) break;
      Eigen::MatrixXd bs(d, d), ms(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          bs(i, j) = ortho[i].dot(gal.op * ortho[j]);
          ms(i, j) = ortho[i].dot(gal.gram * ortho[j]);
        }
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(bs, ms);
      Eigen::VectorXd next = Eigen::VectorXd::Zero(c.size());
      for (int i = 0; i < d; ++i)
        next += small.eigenvectors()(i, 0) * ortho[i];
      next.normalize();
      prev = c;
      const double qn = quotient(next);
      c = next;
      if (q - qn < 1e-15 * std::max(1.0, std::abs(q))) {
        q = std::min(q, qn);
        break;
      }
      q = qn;
    }
    best = std::min(best, q);
  }
  return best;
}

ComparisonReport eigenvalue_comparison(
    std::shared_ptr<const SurfaceGeometry> geom) {
  ComparisonReport rep;
  const auto l0 = assemble(OperatorKind::L0_symmetrized, geom);
  const auto lbar = assemble(OperatorKind::L_bar_mots, geom);
  rep.spectrum_L0 = principal_eigenvalue(l0);
  rep.spectrum_Lbar = principal_eigenvalue(lbar);
  rep.lambda1_L0 = rep.spectrum_L0.lambda1;
  rep.lambda1_Lbar = rep.spectrum_Lbar.lambda1;
  rep.gap = rep.lambda1_L0 - rep.lambda1_Lbar;
  return rep;
}

DivergenceIdentityReport divergence_identity_check(
    std::shared_ptr<const SurfaceGeometry> geom) {
  const SurfaceGeometry& g = *geom;
  const auto lbar = assemble(OperatorKind::L_bar_mots, geom);
  const Spectrum spec = principal_eigenvalue(lbar);
  if (spec.eigenfunction.minCoeff() <= 0.0)
    throw std::runtime_error("positive eigenfunction required for log");

  const auto ng = constraint::null_expansions(g);
  const auto em = constraint::energy_momentum(g);
  const Field q =
      0.5 * g.intrinsic_scalar - (em.mu + em.J_nu) - 0.5 * ng.chi_plus_norm2;

  const Field u = spec.eigenfunction.log();
  const VecField grad_u = surface::gradient(g, u);
  VecField y = make_vec_field(g.nodes());
  for (int a = 0; a < 3; ++a) y[a] = ng.X[a] - grad_u[a];
  const Field div_y = surface::divergence(g, y);
  const Field y2 = surface::inner(g, y, y);

  DivergenceIdentityReport rep;
  rep.lambda1 = spec.lambda1;
  rep.residual = q + div_y - y2 - spec.lambda1;
  rep.sup_residual = sup_norm(rep.residual);
  return rep;
}

ConformalReport conformal_scalar(const SurfaceGeometry& g, const Field& phi,
                                 int n) {
  if (phi.minCoeff() <= 0.0)
    throw std::invalid_argument("conformal factor must be positive");
  if (n < 3) throw std::invalid_argument("ambient dimension must be >= 3");
  const double nm2 = double(n) - 2.0;

  const Field lap_phi = surface::laplace_beltrami(g, phi);
  const VecField grad_phi = surface::gradient(g, phi);
  const Field grad2 = surface::inner(g, grad_phi, grad_phi);

  ConformalReport rep;
  rep.s_tilde_formula =
      phi.pow(-double(n) / nm2) *
      (-2.0 * lap_phi + g.intrinsic_scalar * phi + (n - 1.0) / nm2 * grad2 / phi);

  const Field conf = phi.pow(2.0 / nm2);
  SymField hh_t = g.hh;
  for (auto& comp : hh_t) comp *= conf;
  const SymField hh_t_inv =
      surface::tangential_pseudo_inverse(g.mesh(), hh_t, nullptr);
  rep.s_tilde_direct =
      surface::intrinsic_scalar_curvature(g.mesh(), hh_t, hh_t_inv);
  rep.residual = sup_norm(rep.s_tilde_formula - rep.s_tilde_direct);
  return rep;
}

}  // namespace motslab::stability
