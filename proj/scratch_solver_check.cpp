#include <cstdio>

#include "motslab/solver.hpp"

using namespace motslab;
using namespace motslab::surface;
using namespace motslab::solver;

int main() {
  SolveOptions opts;
  opts.newton_tolerance = 1e-10;

  {  // schwarzschild MOTS from r = 0.8
    auto mesh = build_mesh(Topology::sphere, 24, 48);
    auto schw = ambient::builtin_model("schwarzschild_isotropic", {{"m", 1.0}});
    auto res = find_mots(make_surface(mesh, schw, Field::Constant(mesh->num_nodes, 0.8)), opts);
    std::printf("schw mots: dev(r-0.5)=%.2e area-16pi=%.2e lambda1=%.6f iters=%d\n",
                sup_norm(res.surface.height - 0.5),
                surface::area(*res.geometry) - 16.0 * kPi,
                res.spectrum.lambda1, res.report.iterations);
    for (double r : res.report.residual_history) std::printf("  res %.3e\n", r);
  }

  {  // euclid K=-delta: MOTS at rho=1
    auto mesh = build_mesh(Topology::sphere, 16, 32);
    auto m = ambient::builtin_model("minkowski_slice_with_K",
                                    {{"kxx", -1.0}, {"kyy", -1.0}, {"kzz", -1.0}});
    auto res = find_mots(make_surface(mesh, m, Field::Constant(mesh->num_nodes, 1.5)), opts);
    std::printf("K=-delta mots: dev(r-1)=%.2e\n", sup_norm(res.surface.height - 1.0));
  }

  {  // euclid CMC c=1 from 2.3
    auto mesh = build_mesh(Topology::sphere, 16, 32);
    auto euclid = ambient::builtin_model("euclidean");
    auto res = find_cmc(make_surface(mesh, euclid, Field::Constant(mesh->num_nodes, 2.3)), 1.0, opts);
    std::printf("euclid cmc: dev(r-2)=%.2e lambda1=%.4f\n",
                sup_norm(res.surface.height - 2.0), res.spectrum.lambda1);
  }

  {  // euclid, K=0: no MOTS -> expect NonConvergence
    auto mesh = build_mesh(Topology::sphere, 16, 32);
    auto euclid = ambient::builtin_model("euclidean");
    try {
      SolveOptions o2 = opts;
      o2.max_iterations = 12;
      find_mots(make_surface(mesh, euclid, Field::Constant(mesh->num_nodes, 1.0)), o2);
      std::printf("no-mots: UNEXPECTED convergence\n");
    } catch (const NonConvergence& e) {
      std::printf("no-mots: correctly failed (last residual %.3e)\n", e.last_residual);
    }
  }

  {  // cusp CMC from wiggly graph
    auto tor = build_mesh(Topology::torus, 32, 32);
    auto cusp = ambient::builtin_model("hyperbolic_cusp");
    Field g0 = 0.1 * tor->u1.sin();
    auto res = find_cmc(make_surface(tor, cusp, g0), 2.0, opts);
    Field dev = res.surface.height - (tor->quad_weights * res.surface.height).sum() / tor->quad_weights.sum();
    std::printf("cusp cmc: flatness=%.2e lambda1=%.2e\n", sup_norm(dev), res.spectrum.lambda1);
  }

  {  // product torus foliation
    auto tor = build_mesh(Topology::torus, 24, 24);
    auto prod = ambient::builtin_model("product_line_x_flat_torus");
    auto base = make_surface(tor, prod, Field::Constant(tor->num_nodes, 0.0));
    auto fol = foliate(base, FoliationMode::cmc, -0.2, 0.2, 7, opts);
    double supH = 0, dA = 0;
    for (auto& l : fol.leaves) {
      supH = std::max(supH, std::abs(l.constant_value) + l.sup_deviation);
      dA = std::max(dA, std::abs(l.area - fol.leaves[0].area) / fol.leaves[0].area);
    }
    std::printf("product foliation: sup|H|=%.2e dA-rel=%.2e lam1_0=%.2e\n", supH,
                dA, fol.leaves[3].lambda1);
  }

  {  // cusp foliation: A(t) = e^{2t} A(0)
    auto tor = build_mesh(Topology::torus, 24, 24);
    auto cusp = ambient::builtin_model("hyperbolic_cusp");
    auto base = make_surface(tor, cusp, Field::Constant(tor->num_nodes, 0.0));
    auto fol = foliate(base, FoliationMode::cmc, -0.15, 0.15, 7, opts);
    double worst = 0, worstH = 0;
    const double a_at_base = 4.0 * kPi * kPi;
    for (auto& l : fol.leaves) {
      worst = std::max(worst, std::abs(l.area / a_at_base - std::exp(2.0 * l.t)));
      worstH = std::max(worstH, std::abs(l.constant_value - 2.0) + l.sup_deviation);
    }
    std::printf("cusp foliation: area law err=%.2e  sup|H-2|=%.2e\n", worst, worstH);
    // first-variation law at interior leaves
    for (int i = 0; i < int(fol.leaves.size()); ++i)
      if (fol.deriv_valid[i])
        std::printf("  leaf %d: A'=%.6f  flux=%.6f  rel=%.2e\n", i,
                    fol.area_deriv[i], fol.leaves[i].flux,
                    std::abs(fol.area_deriv[i] - fol.leaves[i].flux) /
                        std::abs(fol.leaves[i].flux));
  }

  {  // variation checks on the schwarzschild horizon
    auto mesh = build_mesh(Topology::sphere, 16, 32);
    auto schw = ambient::builtin_model("schwarzschild_isotropic", {{"m", 1.0}});
    auto surf = make_surface(mesh, schw, Field::Constant(mesh->num_nodes, 0.5));
    std::mt19937_64 rng(3);
    Field phi = 1.0 + 0.5 * mesh->random_band_limited(rng, 4, 1.0);
    std::vector<double> ladder{3e-2, 1e-2, 3e-3, 1e-3};
    auto r1 = variation_check(surf, phi, VariationKind::area_second_variation, ladder);
    std::printf("A'' order=%.2f errors: %.2e %.2e %.2e %.2e\n", r1.observed_order,
                r1.errors[0], r1.errors[1], r1.errors[2], r1.errors[3]);
    auto r2 = variation_check(surf, phi, VariationKind::null_expansion_derivative, ladder);
    std::printf("dtheta order=%.2f errors: %.2e %.2e %.2e %.2e\n", r2.observed_order,
                r2.errors[0], r2.errors[1], r2.errors[2], r2.errors[3]);
  }
  return 0;
}
