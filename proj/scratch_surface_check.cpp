#include <cstdio>

#include "motslab/surface.hpp"

using namespace motslab;
using namespace motslab::surface;

int main() {
  auto mesh = build_mesh(Topology::sphere, 24, 48);
  auto euclid = ambient::builtin_model("euclidean");

  {  // unit round sphere
    auto s = make_surface(mesh, euclid, Field::Constant(mesh->num_nodes, 1.0));
    auto g = compute_geometry(s);
    std::printf("sphere: H-2 %.2e  S-2 %.2e  area-4pi %.2e  |B|^2-2 %.2e\n",
                sup_norm(g.mean_curvature - 2.0),
                sup_norm(g.intrinsic_scalar - 2.0), area(g) - 4.0 * kPi,
                sup_norm(g.b_norm2 - 2.0));
    // laplace on Y_2^1
    Field y21 = mesh->sin_theta * mesh->cos_theta * mesh->u2.cos();
    std::printf("sphere: lap y21 err %.2e\n",
                sup_norm(laplace_beltrami(g, y21) + 6.0 * y21));
    std::printf("sphere: gauss-bonnet %.2e\n",
                integrate(g, g.intrinsic_scalar) - 8.0 * kPi);
  }

  {  // perturbed sphere, Gauss identity residual
    std::mt19937_64 rng(7);
    Field f = mesh->random_band_limited(rng, 6, 0.4);
    Field r = 1.0 + 0.35 * f / std::max(1.0, sup_norm(f));
    auto s = make_surface(mesh, euclid, r);
    auto g = compute_geometry(s);
    Field gauss = g.ric_nu_nu + g.b_norm2 -
                  0.5 * (g.amb_scalar + g.b_norm2 +
                         g.mean_curvature.square() - g.intrinsic_scalar);
    std::printf("perturbed: gauss residual %.2e  gauss-bonnet %.2e\n",
                sup_norm(gauss), integrate(g, g.intrinsic_scalar) - 8.0 * kPi);
  }

  {  // schwarzschild horizon
    auto schw = ambient::builtin_model("schwarzschild_isotropic", {{"m", 1.0}});
    auto s = make_surface(mesh, schw, Field::Constant(mesh->num_nodes, 0.5));
    auto g = compute_geometry(s);
    std::printf("schw r=0.5: supH %.2e  area-16pi %.2e  supB %.2e\n",
                sup_norm(g.mean_curvature), area(g) - 16.0 * kPi,
                sup_norm(g.b_norm2));
    Field gauss = g.ric_nu_nu + g.b_norm2 -
                  0.5 * (g.amb_scalar + g.b_norm2 +
                         g.mean_curvature.square() - g.intrinsic_scalar);
    std::printf("schw: gauss residual %.2e\n", sup_norm(gauss));
  }

  {  // cusp slice
    auto tор = build_mesh(Topology::torus, 32, 32);
    auto cusp = ambient::builtin_model("hyperbolic_cusp");
    auto s = make_surface(tор, cusp, Field::Constant(tор->num_nodes, 0.0));
    auto g = compute_geometry(s);
    Field bmh = Field::Zero(tор->num_nodes);
    for (int c = 0; c < 6; ++c) bmh = bmh.max((g.second_form[c] - g.hh[c]).abs());
    std::printf("cusp slice: H-2 %.2e  S_int %.2e  |B-h| %.2e  area-4pi^2 %.2e\n",
                sup_norm(g.mean_curvature - 2.0), sup_norm(g.intrinsic_scalar),
                sup_norm(bmh), area(g) - 4.0 * kPi * kPi);
    // perturbed torus graph: gauss residual + gauss-bonnet 0
    std::mt19937_64 rng(3);
    Field f = tор->random_band_limited(rng, 4, 0.3);
    auto s2 = make_surface(tор, cusp, 0.05 * f);
    auto g2 = compute_geometry(s2);
    Field gauss = g2.ric_nu_nu + g2.b_norm2 -
                  0.5 * (g2.amb_scalar + g2.b_norm2 +
                         g2.mean_curvature.square() - g2.intrinsic_scalar);
    std::printf("cusp perturbed: gauss %.2e  gauss-bonnet %.2e\n",
                sup_norm(gauss), integrate(g2, g2.intrinsic_scalar));
  }

  {  // cylinder cross-section
    auto cyl = ambient::builtin_model("cylinder_S2xR", {{"radius", 1.0}});
    auto s = make_surface(mesh, cyl, Field::Constant(mesh->num_nodes, 1.0));
    auto g = compute_geometry(s);
    std::printf("cylinder r=1: supH %.2e  supB2 %.2e  ricnn %.2e  S_int-2 %.2e  area-4pi %.2e\n",
                sup_norm(g.mean_curvature), sup_norm(g.b_norm2),
                sup_norm(g.ric_nu_nu), sup_norm(g.intrinsic_scalar - 2.0),
                area(g) - 4.0 * kPi);
  }
  return 0;
}
