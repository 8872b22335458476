#pragma once

#include "ndirac/energy.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace ndirac {

/// A point t u+ + v of the fiber R+ u+ (+) E-. `v` is kept in the frequency
/// representation.
struct NehariPoint {
  double t = 0.0;
  SpinorField v;
};

/// Membership residuals for the generalized Nehari set:
/// r_self = Phi'(u)u, r_minus = graph-dual norm of Phi'(u) restricted to E-.
struct NehariResidual {
  double r_self = 0.0;
  double r_minus = 0.0;
};

struct InnerOptions {
  double tol = 1e-9;
  double unique_tol = 1e-6;
  double armijo_c = 1e-4;
  int starts = 2;
  int max_iterations = 20000;
  double perturbation = 0.25;  ///< size of extra-start v offsets, relative to max(1, |u+|)
  std::uint64_t seed = 0;
};

struct InnerResult {
  NehariPoint point;
  double value = 0.0;
  int iterations = 0;  ///< summed over all starts
  double dt = 0.0;     ///< d/dt gamma_u at the returned point
  NehariResidual residual;
  double scale = 1.0;  ///< max(1, |t u+ + v|)
  bool converged = false;
  bool unique = true;
  double start_spread = 0.0;  ///< max graph distance between start results / scale
  SpinorField w_hat;          ///< t u+ + v, frequency representation
  SpinorField residual_hat;   ///< L^2 residual at w, frequency representation
};

class DegenerateFiber : public std::runtime_error {
 public:
  DegenerateFiber() : std::runtime_error("fiber undefined: u+ vanishes") {}
};

class InnerMaxIterations : public std::runtime_error {
 public:
  explicit InnerMaxIterations(InnerResult best, const std::string& why)
      : std::runtime_error("inner maximization did not converge: " + why), best_(std::move(best)) {}
  const InnerResult& best() const { return best_; }

 private:
  InnerResult best_;
};

/// gamma_u(t, v) = Phi(t u+ + v); requires t >= 0 and v in E-.
double gamma(const SpinorField& u, double t, const SpinorField& v, const ProblemModel& model);

/// Partial derivatives of gamma_u: d/dt = Phi'(t u+ + v) u+, and the
/// graph-dual norm of the v-derivative.
struct FiberPartials {
  double dt = 0.0;
  double dv_norm = 0.0;
};
FiberPartials fiber_partials(const SpinorField& u, double t, const SpinorField& v, const ProblemModel& model);

/// Re f(|u|) u . (t^2/2 u - u/2 + t v) + F(|u|) - F(|t u + v|) for single
/// C^4 values; negative whenever v != 0.
double scalar_h(double t, const Spinor& u4, const Spinor& v4, const Nonlinearity& nl);

/// Maximizes Phi over R+ u+ (+) E- by alternating a bracketed root solve
/// of d/dt gamma_u with backtracking gradient ascent in v along the
/// graph-dual E- gradient. Runs `opts.starts` starts (the first from the
/// warm start or (1, u-), the rest with random E- offsets) and reports
/// whether they agree to `opts.unique_tol`.
InnerResult inner_maximize(const SpinorField& u, const ProblemModel& model, const InnerOptions& opts,
                           const NehariPoint* warm_start = nullptr);

NehariResidual nehari_residual(const SpinorField& u, const ProblemModel& model);

/// Energy floor on the E+ sphere of radius rho: Phi(u+) >= alpha for
/// |u+| = rho. Built from the bound int K F(|u|) <= C eps |u|^2 + C A_eps |u|^p
/// with eps = 1/(4C).
struct MountainPass {
  double rho = 0.0;
  double alpha = 0.0;
  double C = 0.0;      ///< combined constant
  double A_eps = 0.0;
  double eps = 0.0;
};

/// `emb_C` is the embedding constant sup |u|_p / |u| over E+. Requires p in (2, 3).
MountainPass mountain_pass_constants(const ProblemModel& model, double emb_C, double p);

/// sup over unit u in E+ of |u|_{L^p}, by nonlinear power iteration from a
/// few starts (point mass, Gaussian, random).
double estimate_embedding_constant(const SpectralSpace& space, double p, std::uint64_t seed = 0);

struct ReducedValue {
  double m = 0.0;
  InnerResult inner;
};

/// m(w) = max over the fiber of w, for unit w in E+.
ReducedValue reduced_value(const SpinorField& w, const ProblemModel& model, const InnerOptions& opts,
                           const NehariPoint* warm_start = nullptr);

/// Riemannian gradient of m at w (graph metric, frequency representation):
/// t_w times the tangential part of the E+ graph-dual gradient of Phi at u_w.
SpinorField reduced_gradient(const SpinorField& w, const NehariPoint& point, const ProblemModel& model);

/// Same, reusing the residual stored in an InnerResult.
SpinorField reduced_gradient(const SpinorField& w, const InnerResult& inner, const ProblemModel& model);

}  // namespace ndirac
