#pragma once

#include "ndirac/nehari.hpp"

#include <cstdint>
#include <vector>

namespace ndirac {

enum class InitialKind { gaussian_bump, random };

struct SolveOptions {
  double tol_outer = 1e-6;
  int max_outer = 500;
  double step0 = 1.0;
  double armijo_c = 1e-4;
  int starts = 3;
  std::uint64_t seed = 0;
  InitialKind initial = InitialKind::gaussian_bump;
  double sigma = 1.5;  ///< Gaussian envelope width of the initial guess
  InnerOptions inner;
  bool force = false;  ///< skip the model condition checks
};

struct TraceEntry {
  int iter = 0;
  double m_value = 0.0;
  double residual = 0.0;  ///< graph-dual norm of Phi' at u_w
  double step = 0.0;      ///< accepted step leaving this iterate (0 on the last)
  int inner_iters = 0;
};

struct GroundStateResult {
  SpinorField u_star;  ///< physical representation
  SpinorField w;       ///< unit E+ direction, frequency representation
  NehariPoint point;   ///< u_star = t w + v
  double c = 0.0;      ///< Phi(u_star)
  NehariResidual residual;
  double residual_full = 0.0;
  std::vector<TraceEntry> trace;
  int iterations = 0;
  bool converged = false;
  bool no_descent = false;
  double wall_time = 0.0;  ///< seconds
  double delta_numeric = 0.0;  ///< min |u+| over accepted iterates
  double min_phi = 0.0;        ///< min Phi over accepted iterates
  double t_check = 0.0;        ///< t from re-solving the fiber of u_star
  double v_check_error = 0.0;  ///< |v - u_star^-| / |u_star^-| from the same re-solve
  bool fiber_unique = false;
  std::uint64_t seed = 0;
  double energy_change = 0.0;  ///< c minus the coarse-grid c, after refine()
};

/// Unit-graph-norm E+ field. gaussian_bump: exp(-|x|^2 / 2 sigma^2) times an
/// upper spinor, (1,0,0,0) for seed 0 and a seeded random (chi, 0) otherwise.
/// random: seeded mode coefficients with a smooth spectral envelope.
SpinorField initial_guess(const SpectralSpace& space, std::uint64_t seed, InitialKind kind, double sigma = 1.5);

/// Gaussian bump with an explicit spinor.
SpinorField initial_guess(const SpectralSpace& space, const Spinor& spinor, double sigma);

/// Ground state candidate: best of `opts.starts` retracted Armijo gradient
/// descents of the reduced functional on the unit sphere of E+.
GroundStateResult minimize_ground_state(const ProblemModel& model, const SolveOptions& opts);

/// One descent from a given unit E+ direction.
GroundStateResult minimize_from(const ProblemModel& model, const SpinorField& w0, const SolveOptions& opts,
                                const NehariPoint* warm_start = nullptr);

/// Interpolate a converged state onto the finer grid of `fine_model` and
/// minimize again from there.
GroundStateResult refine(const GroundStateResult& prior, const ProblemModel& fine_model, const SolveOptions& opts);

/// Thrown when the model fails the hypothesis checks and opts.force is off.
class ModelRejected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ndirac
