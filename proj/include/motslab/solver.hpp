#pragma once

#include <optional>
#include <vector>

#include "motslab/stability.hpp"

namespace motslab::solver {

enum class KernelPolicy { project_out_constants, pin_mean_height };

struct SolveOptions {
  int max_iterations = 40;
  double newton_tolerance = 1e-10;  // sup-norm of the residual field
  double damping_initial = 1.0;
  int max_backtracks = 30;
  KernelPolicy kernel_policy = KernelPolicy::project_out_constants;
  std::optional<double> pinned_mean;  // engages pin_mean_height
  unsigned seed = 0;

  void validate() const {
    if (newton_tolerance <= 0.0) throw std::invalid_argument("tolerance <= 0");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations < 1");
  }
};

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;  // sup norms, one per iterate
  double final_residual = 0.0;
};

struct SolveResult {
  surface::EmbeddedSurface surface;
  std::shared_ptr<const surface::SurfaceGeometry> geometry;
  NewtonReport report;
  stability::Spectrum spectrum;  // of the stability operator at the solution
};

/// Thrown when Newton stalls; carries the last residual.
struct NonConvergence : std::runtime_error {
  double last_residual;
  NewtonReport report;
  NonConvergence(const std::string& what, double r, NewtonReport rep)
      : std::runtime_error(what), last_residual(r), report(std::move(rep)) {}
};

/// Newton solve for theta_plus = 0; the Jacobian is the MOTS stability
/// operator assembly plus the height-advection correction.
SolveResult find_mots(const surface::EmbeddedSurface& guess,
                      const SolveOptions& opts);

/// Newton solve for H = c.
SolveResult find_cmc(const surface::EmbeddedSurface& guess, double c,
                     const SolveOptions& opts);

enum class FoliationMode { cmc, constant_null_expansion };

struct Leaf {
  double t = 0.0;  // pinned mean height
  surface::EmbeddedSurface surface;
  std::shared_ptr<const surface::SurfaceGeometry> geometry;
  double constant_value = 0.0;  // c_t achieved by the leaf
  double sup_deviation = 0.0;   // sup |field - c_t|
  double area = 0.0;
  double lambda1 = 0.0;
  Field lapse;                  // recovered phi_t
  double flux = 0.0;            // integral of (H or theta) * lapse dA
};

struct FoliationResult {
  FoliationMode mode;
  std::vector<Leaf> leaves;                 // ordered by t
  std::vector<double> area_deriv;           // d A / dt by centered differences
  std::vector<double> constant_deriv;       // d c_t / dt by centered differences
  std::vector<bool> deriv_valid;            // false at the edge leaves
};

/// Continuation in the pinned mean height: each leaf solves {field = c_t,
/// mean height = t} with the constant part of the update handed to c_t.
FoliationResult foliate(const surface::EmbeddedSurface& base, FoliationMode mode,
                        double t_lo, double t_hi, int leaf_count,
                        const SolveOptions& opts);

/// Residual of the rescaled-curvature identity along a CMC leaf: the
/// conformally rescaled scalar curvature recomputed from phi^2 h against
/// phi^{-2/(n-2)} (2 c'(t)/phi + S + |B|^2 + H^2 + (n-1)/(n-2) |grad phi|^2/phi^2).
Field rescaled_scalar_residual(const Leaf& leaf, double c_deriv);

enum class VariationKind {
  area_second_variation,
  mean_curvature_evolution,
  null_expansion_derivative,
  brane_first,
  brane_second,
};

struct VariationReport {
  VariationKind kind;
  std::vector<double> eps;
  std::vector<double> errors;        // |FD - analytic| per ladder rung
  double observed_order = 0.0;       // least-squares slope of log err vs log eps
  bool trivially_exact = false;      // errors at the roundoff floor everywhere
  double analytic_scale = 0.0;       // magnitude of the analytic value
};

/// Deforms the graph by eps * phi along the normal, forms centered
/// differences of the varied quantity, and reports the convergence order
/// against the analytic variation formula.
VariationReport variation_check(const surface::EmbeddedSurface& surf,
                                const Field& phi, VariationKind kind,
                                const std::vector<double>& eps_ladder);

}  // namespace motslab::solver
