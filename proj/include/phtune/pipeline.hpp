#pragma once

#include <optional>
#include <string>

#include "phtune/canonical.hpp"
#include "phtune/closedloop.hpp"
#include "phtune/lyap.hpp"
#include "phtune/model.hpp"
#include "phtune/sim.hpp"
#include "phtune/spectral.hpp"

namespace phtune {

struct AnalysisOptions {
  double theta = 0.5;
  std::optional<StateQP> x0;  ///< defaults to the goal with zero momentum
  int momentum_radii = 5;
  int momentum_directions = 8;
  double momentum_scale = 1.5;  ///< ball radius = scale * |phat0| (or |xhat0|)
  Disturbance disturbance;      ///< used for the ISS radius
};

struct CanonicalSection {
  bool applicable = false;     ///< target gyro term matches the generator
  std::string message;
  bool intrinsic = false;
  Mat saddle;                  ///< canonical saddle matrix
  Mat linearization;           ///< canonical closed-loop Jacobian
  CVec eigenvalues;            ///< of the canonical saddle
};

struct AnalysisResult {
  EquilibriumCheck equilibrium;
  bool kint_applicable = false;
  KintCheck kint;
  TargetConditions conditions;
  StarMatrices stars;
  SpectralReport spectral;
  bool es_iss_ok = false;
  std::string es_iss_error;
  EsIssReport es_iss;
  CanonicalSection canonical;
};

/// Norm of the disturbance pushed into hat coordinates, maximized over the
/// region (position channels pass through, momentum channels through Td').
double hat_disturbance_norm(const HatSystem& hat, const Region& region,
                            const Disturbance& dist);

/// Full stability analysis of the closed loop (model, gains) around q_star.
/// Admissibility and structural failures are recorded in the result rather
/// than thrown; numerical failures inside the ES/ISS stage are recorded in
/// es_iss_error.
AnalysisResult run_analysis(const MechanicalModel& model,
                            const ControllerGains& gains, const Vec& q_star,
                            const Region& region, const GyroGenerator& gen,
                            const AnalysisOptions& options);

}  // namespace phtune
