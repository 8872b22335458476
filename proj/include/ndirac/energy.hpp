#pragma once

#include "ndirac/model.hpp"

namespace ndirac {

/// Phi(u) = (|u+|^2 - |u-|^2)/2 + int V|u|^2 / 2 - int K F(|u|), by parts.
struct EnergyBreakdown {
  double quad_plus = 0.0;   ///< |u+|^2 / 2 (graph norm)
  double quad_minus = 0.0;  ///< |u-|^2 / 2
  double pot = 0.0;         ///< int V |u|^2 / 2
  double nonlin = 0.0;      ///< int K F(|u|)
  double total = 0.0;

  double recombined() const { return quad_plus - quad_minus + pot - nonlin; }
};

EnergyBreakdown energy(const SpinorField& u, const ProblemModel& model);

/// L^2 representative of Phi'(u): r = D u + V u - K f(|u|) u, so that
/// Phi'(u) v = Re <r, v>_{L^2}. Returned in the representation of u.
SpinorField residual_l2(const SpinorField& u, const ProblemModel& model);

/// Phi'(u) v
double derivative_along(const SpinorField& u, const SpinorField& v, const ProblemModel& model);

/// Phi(u) - Phi'(u)u / 2
double nehari_excess(const SpinorField& u, const ProblemModel& model);

/// Phi(u) - Phi'(u)u / 2 - int K (f(|u|)|u|^2 / 2 - F(|u|)); zero up to rounding.
double nehari_identity_gap(const SpinorField& u, const ProblemModel& model);

/// Pointwise nonlinear and potential part of the residual, V u - K f(|u|) u,
/// for a physical field.
SpinorField local_residual(const SpinorField& u_phys, const ProblemModel& model);

}  // namespace ndirac
