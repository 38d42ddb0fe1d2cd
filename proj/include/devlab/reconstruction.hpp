#pragma once

#include "devlab/obstacle.hpp"

namespace devlab {

/// A Lambda v: the flux an approximation would have if it were exact.
TensorField naive_flux(const ScalarField& v, const ObstacleProblem& problem);

struct FluxRepair {
  TensorField y_star;
  double residual_norm = 0.0;    // ||max(f - divDiv y0, 0)||, quadrature L2
  double correction_norm = 0.0;  // ||y* - y0||, quadrature L2
  int passes = 0;                // correction solves performed

  /// Ratio correction_norm / residual_norm (0 when nothing was repaired).
  double constant() const noexcept { return residual_norm > 0.0 ? correction_norm / residual_norm : 0.0; }
};

/// Repairs the naive flux into the admissible dual set by adding Lambda w,
/// where w solves the clamped identity-coefficient bilaplacian with the
/// positive part of f - divDiv y0 as load. Since divDiv Lambda w equals that
/// load exactly, the result satisfies f - divDiv y* <= 0 up to solver
/// rounding. Throws SolveFailure if admissibility cannot be reached.
FluxRepair feasible_flux_report(const ScalarField& v, const ObstacleProblem& problem);

TensorField feasible_flux(const ScalarField& v, const ObstacleProblem& problem);

}  // namespace devlab
