#include <cstdio>
#include <memory>

#include "motslab/stability.hpp"

using namespace motslab;
using namespace motslab::surface;
using namespace motslab::stability;

static std::shared_ptr<const SurfaceGeometry> geo(const EmbeddedSurface& s) {
  return std::make_shared<SurfaceGeometry>(compute_geometry(s));
}

int main() {
  auto mesh = build_mesh(Topology::sphere, 16, 32);
  auto euclid = ambient::builtin_model("euclidean");

  {  // L_minimal on unit sphere: -Lap - 2, lambda1 = -2, constant eigfn
    auto g = geo(make_surface(mesh, euclid, Field::Constant(mesh->num_nodes, 1.0)));
    auto op = assemble(OperatorKind::L_minimal, g);
    auto spec = principal_eigenvalue(op);
    std::printf("unit sphere L_min: lambda1+2 = %.2e  pos=%d  res=%.2e\n",
                spec.lambda1 + 2.0, int(spec.positivity_ok), spec.solver_residual);
    std::printf("  rayleigh(1) + 2 = %.2e\n",
                rayleigh_quotient(op, Field::Constant(mesh->num_nodes, 1.0)) + 2.0);
    std::printf("  rayleigh_min - lambda1 = %.2e\n",
                rayleigh_minimize(op, 6, 42) - spec.lambda1);
  }

  {  // cylinder cross-section: potential = 0, lambda1 = 0
    auto cyl = ambient::builtin_model("cylinder_S2xR", {{"radius", 1.0}});
    auto g = geo(make_surface(mesh, cyl, Field::Constant(mesh->num_nodes, 1.0)));
    auto op = assemble(OperatorKind::L_minimal, g);
    auto spec = principal_eigenvalue(op);
    std::printf("cylinder: lambda1 = %.2e  sup pot = %.2e\n", spec.lambda1,
                sup_norm(op.potential));
  }

  {  // Schwarzschild horizon: lambda1 = 1/(4 m^2) = 0.25
    auto schw = ambient::builtin_model("schwarzschild_isotropic", {{"m", 1.0}});
    auto g = geo(make_surface(mesh, schw, Field::Constant(mesh->num_nodes, 0.5)));
    auto op = assemble(OperatorKind::L_bar_mots, g);
    auto spec = principal_eigenvalue(op);
    std::printf("schw horizon L_bar: lambda1 - 0.25 = %.2e symflag=%d\n",
                spec.lambda1 - 0.25, int(op.symmetric_flag));
  }

  {  // conformal identity on a perturbed sphere
    std::mt19937_64 rng(5);
    Field f = mesh->random_band_limited(rng, 4, 0.5);
    auto g = geo(make_surface(mesh, euclid, 1.0 + 0.15 * f));
    Field phi = 1.0 + 0.4 * mesh->random_band_limited(rng, 4, 0.5);
    std::printf("phi min %.3f\n", phi.minCoeff());
    auto rep = conformal_scalar(*g, phi, 3);
    std::printf("conformal residual = %.2e\n", rep.residual);
  }

  {  // drift model: Prop 2.1 gap and divergence identity
    auto drift = ambient::builtin_model(
        "minkowski_slice_with_K", {{"kxz", 0.35}, {"kxx", -1.0}, {"kyy", -1.0}, {"kzz", -1.0}});
    std::mt19937_64 rng(11);
    Field f = mesh->random_band_limited(rng, 4, 0.4);
    auto g = geo(make_surface(mesh, drift, 1.0 + 0.1 * f));
    auto rep = eigenvalue_comparison(g);
    std::printf("drift: l1(L0)=%.6f l1(Lbar)=%.6f gap=%.3e imres=%.2e\n",
                rep.lambda1_L0, rep.lambda1_Lbar, rep.gap,
                rep.spectrum_Lbar.imag_residual);
    auto div = divergence_identity_check(g);
    std::printf("divergence identity sup residual = %.2e (lambda1 %.6f)\n",
                div.sup_residual, div.lambda1);
  }

  {  // K = c delta: X = 0, gap = 0
    auto pure = ambient::builtin_model("minkowski_slice_with_K",
                                       {{"kxx", 0.3}, {"kyy", 0.3}, {"kzz", 0.3}});
    std::mt19937_64 rng(13);
    Field f = mesh->random_band_limited(rng, 4, 0.4);
    auto g = geo(make_surface(mesh, pure, 1.0 + 0.1 * f));
    auto rep = eigenvalue_comparison(g);
    std::printf("pure-trace: gap=%.3e\n", rep.gap);
  }
  return 0;
}
