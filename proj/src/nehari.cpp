#include "ndirac/nehari.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace ndirac {

namespace {

// f and F evaluated from the squared modulus; the power case avoids a sqrt.
class LocalNonlinearity {
 public:
  explicit LocalNonlinearity(const Nonlinearity& nl)
      : nl_(nl), power_(nl.kind() == Nonlinearity::Kind::power), p_(nl.p()) {}

  double F(double s2) const {
    return power_ ? std::pow(s2, 0.5 * p_) / p_ : nl_.F_unchecked(std::sqrt(s2));
  }
  double f(double s2) const {
    return power_ ? std::pow(s2, 0.5 * (p_ - 2.0)) : nl_.f_unchecked(std::sqrt(s2));
  }

 private:
  const Nonlinearity& nl_;
  bool power_;
  double p_;
};

double graph_norm2_hat(const SpectralSpace& space, const SpinorField& h) {
  const std::size_t n3 = h.points();
  double s = 0.0;
  for (std::size_t m = 0; m < n3; ++m) {
    double local = 0.0;
    for (int c = 0; c < 4; ++c) local += std::norm(h(c, m));
    s += space.lambda(m) * local;
  }
  return s;
}

double graph_inner_hat(const SpectralSpace& space, const SpinorField& a, const SpinorField& b) {
  const std::size_t n3 = a.points();
  double s = 0.0;
  for (std::size_t m = 0; m < n3; ++m) {
    double local = 0.0;
    for (int c = 0; c < 4; ++c) local += std::real(a(c, m) * std::conj(b(c, m)));
    s += space.lambda(m) * local;
  }
  return s;
}

double l2_inner_hat(const SpinorField& a, const SpinorField& b) {
  double s = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) s += std::real(x[i] * std::conj(y[i]));
  return s;
}

// D w + V w - K f(|w|) w in frequency form.
SpinorField residual_hat(const ProblemModel& model, const SpinorField& w_hat, const SpinorField& w_phys) {
  SpinorField r = dft_forward(local_residual(w_phys, model));
  SpinorField dw = w_hat;
  model.space().apply_symbol(dw.data());
  r += dw;
  return r;
}

// sum_k |P- r_hat|^2 / lambda, and the graph-dual E- gradient P- r_hat / lambda.
std::pair<SpinorField, double> minus_gradient(const SpectralSpace& space, const SpinorField& r_hat) {
  SpinorField g = r_hat;
  space.apply_projector(g.data(), -1);
  const std::size_t n3 = g.points();
  double s = 0.0;
  for (std::size_t m = 0; m < n3; ++m) {
    const double inv = 1.0 / space.lambda(m);
    double local = 0.0;
    for (int c = 0; c < 4; ++c) {
      local += std::norm(g(c, m));
      g(c, m) *= inv;
    }
    s += local * inv;
  }
  return {std::move(g), s};
}

struct Fiber {
  const ProblemModel& model;
  SpinorField e_hat;
  SpinorField e_phys;
  double e_norm2 = 0.0;
};

// gamma_u(., v) for a fixed v; per-point data is precomputed so that each
// evaluation is a single pass without transforms.
class FiberLine {
 public:
  FiberLine(const Fiber& fiber, const SpinorField& v_phys, double v_norm2)
      : fiber_(fiber), local_(fiber.model.nonlinearity()), v_norm2_(v_norm2) {
    const std::size_t n3 = v_phys.points();
    ee_.resize(n3);
    ev_.resize(n3);
    vv_.resize(n3);
    for (std::size_t i = 0; i < n3; ++i) {
      double ee = 0.0, ev = 0.0, vv = 0.0;
      for (int c = 0; c < 4; ++c) {
        const Complex e = fiber.e_phys(c, i), v = v_phys(c, i);
        ee += std::norm(e);
        ev += std::real(v * std::conj(e));
        vv += std::norm(v);
      }
      ee_[i] = ee;
      ev_[i] = ev;
      vv_[i] = vv;
    }
  }

  double value(double t) const {
    const auto& V = fiber_.model.V();
    const auto& K = fiber_.model.K();
    double s = 0.0;
    for (std::size_t i = 0; i < ee_.size(); ++i) {
      const double m2 = std::max(0.0, t * t * ee_[i] + 2.0 * t * ev_[i] + vv_[i]);
      s += 0.5 * V[i] * m2 - K[i] * local_.F(m2);
    }
    return 0.5 * t * t * fiber_.e_norm2 - 0.5 * v_norm2_ + s * fiber_.model.grid().cell_volume();
  }

  double deriv(double t) const {
    const auto& V = fiber_.model.V();
    const auto& K = fiber_.model.K();
    double s = 0.0;
    for (std::size_t i = 0; i < ee_.size(); ++i) {
      const double m2 = std::max(0.0, t * t * ee_[i] + 2.0 * t * ev_[i] + vv_[i]);
      s += (V[i] - K[i] * local_.f(m2)) * (t * ee_[i] + ev_[i]);
    }
    return t * fiber_.e_norm2 + s * fiber_.model.grid().cell_volume();
  }

 private:
  const Fiber& fiber_;
  LocalNonlinearity local_;
  double v_norm2_;
  std::vector<double> ee_, ev_, vv_;
};

// gamma at (t, v) for an explicit physical v.
double gamma_value(const Fiber& fiber, double t, const SpinorField& v_phys, double v_norm2) {
  const auto& V = fiber.model.V();
  const auto& K = fiber.model.K();
  const LocalNonlinearity local(fiber.model.nonlinearity());
  const std::size_t n3 = v_phys.points();
  double s = 0.0;
  for (std::size_t i = 0; i < n3; ++i) {
    double m2 = 0.0;
    for (int c = 0; c < 4; ++c) m2 += std::norm(t * fiber.e_phys(c, i) + v_phys(c, i));
    s += 0.5 * V[i] * m2 - K[i] * local.F(m2);
  }
  return 0.5 * t * t * fiber.e_norm2 - 0.5 * v_norm2 + s * fiber.model.grid().cell_volume();
}

constexpr double kBracketStart = 2.0;
constexpr double kBracketCap = 1048576.0;  // 2^20
constexpr int kScanPoints = 64;

double refine_root(const FiberLine& line, double a, double b, double da, double db) {
  if (da == 0.0) return a;
  if (db == 0.0) return b;
  boost::uintmax_t max_iter = 100;
  const auto r = boost::math::tools::toms748_solve([&](double t) { return line.deriv(t); }, a, b, da, db,
                                                   boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (r.first + r.second);
}

// Global maximizer of gamma_u(., v) over t >= 0.
double solve_t_global(const FiberLine& line) {
  double hi = kBracketStart;
  while (line.deriv(hi) >= 0.0) {
    hi *= 2.0;
    if (hi > kBracketCap) throw std::runtime_error("t bracket exceeded 2^20: fiber is not bounded above");
  }
  double best_t = 0.0, best_val = line.value(0.0);
  double prev_t = 0.0, prev_d = line.deriv(0.0);
  for (int i = 1; i <= kScanPoints; ++i) {
    const double t = hi * i / kScanPoints;
    const double d = line.deriv(t);
    if (prev_d > 0.0 && d <= 0.0) {
      const double root = refine_root(line, prev_t, t, prev_d, d);
      const double val = line.value(root);
      if (val > best_val) {
        best_val = val;
        best_t = root;
      }
    }
    prev_t = t;
    prev_d = d;
  }
  return best_t;
}

// Root near a previous maximizer; falls back to the global search when the
// local bracket does not straddle a + to - sign change.
double solve_t_local(const FiberLine& line, double t_prev) {
  if (t_prev > 0.0) {
    for (double rel : {1e-3, 3e-2, 0.3}) {
      const double a = t_prev * (1.0 - rel), b = t_prev * (1.0 + rel);
      const double da = line.deriv(a), db = line.deriv(b);
      if (da > 0.0 && db < 0.0) return refine_root(line, a, b, da, db);
    }
  }
  return solve_t_global(line);
}

struct StartResult {
  double t = 0.0;
  SpinorField v_hat;
  SpinorField v_phys;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  double dt = 0.0;
  NehariResidual residual;
  double scale = 1.0;
  SpinorField w_hat;
  SpinorField r_hat;
  std::string failure;
};

StartResult ascend(const Fiber& fiber, double t0, SpinorField v_hat, const InnerOptions& opts) {
  const ProblemModel& model = fiber.model;
  const SpectralSpace& space = model.space();
  StartResult out{t0, v_hat, dft_inverse(v_hat), 0.0, 0, false, 0.0, {}, 1.0, v_hat, v_hat, {}};
  double& t = out.t;
  double v_norm2 = graph_norm2_hat(space, out.v_hat);
  double step = 1.0;
  bool global_t = true;
  SpinorField prev_g;  // graph-dual gradient at the previous iterate

  for (int it = 0; it < opts.max_iterations; ++it) {
    out.iterations = it + 1;
    const FiberLine line(fiber, out.v_phys, v_norm2);
    try {
      t = global_t ? solve_t_global(line) : solve_t_local(line, t);
    } catch (const std::exception& e) {
      out.failure = e.what();
      return out;
    }
    const bool was_global = global_t;
    global_t = false;

    SpinorField w_hat = out.v_hat;
    w_hat.axpy(t, fiber.e_hat);
    SpinorField w_phys = out.v_phys;
    w_phys.axpy(t, fiber.e_phys);
    SpinorField r_hat = residual_hat(model, w_hat, w_phys);
    auto [g_hat, r_minus2] = minus_gradient(space, r_hat);

    out.dt = l2_inner_hat(r_hat, fiber.e_hat);
    out.residual.r_self = l2_inner_hat(r_hat, w_hat);
    out.residual.r_minus = std::sqrt(r_minus2);
    out.scale = std::max(1.0, std::sqrt(t * t * fiber.e_norm2 + v_norm2));
    out.value = line.value(t);

    if (!(out.scale < 1e12)) {
      out.failure = "fiber is not bounded above along E-";
      out.w_hat = std::move(w_hat);
      out.r_hat = std::move(r_hat);
      return out;
    }
    const double tol = opts.tol * out.scale;
    if (std::abs(out.dt) <= tol && out.residual.r_minus <= tol && std::abs(out.residual.r_self) <= tol) {
      if (!was_global) {
        // confirm that t is the global maximizer along the final line
        global_t = true;
        continue;
      }
      out.converged = true;
      out.w_hat = std::move(w_hat);
      out.r_hat = std::move(r_hat);
      return out;
    }
    // ascent step in v along g (directional derivative = r_minus2)
    const SpinorField g_phys = dft_inverse(g_hat);
    const double gv = graph_inner_hat(space, g_hat, out.v_hat);
    const double g0 = out.value;
    // Barzilai-Borwein trial step from the last (step, gradient change) pair
    double s = std::min(1.0, 2.0 * step);
    if (!prev_g.empty()) {
      SpinorField dg = g_hat;
      dg -= prev_g;
      const double curv = graph_inner_hat(space, prev_g, dg);  // <dv, dg> / step
      if (curv < 0.0) s = std::clamp(-step * graph_norm2_hat(space, prev_g) / curv, 1e-4, 4.0);
    }
    const double noise = 1e-14 * std::max(1.0, std::abs(g0));
    if (opts.armijo_c * s * r_minus2 > noise) {
      for (;;) {
        SpinorField trial = out.v_phys;
        trial.axpy(s, g_phys);
        const double val = gamma_value(fiber, t, trial, v_norm2 + 2.0 * s * gv + s * s * r_minus2);
        if (val >= g0 + opts.armijo_c * s * r_minus2) break;
        if (opts.armijo_c * s * r_minus2 <= noise) break;
        s *= 0.5;
        if (s < 1e-12) {
          out.failure = "v line search stalled";
          out.w_hat = std::move(w_hat);
          out.r_hat = std::move(r_hat);
          return out;
        }
      }
    }
    step = s;
    prev_g = g_hat;
    out.v_hat.axpy(s, g_hat);
    out.v_phys.axpy(s, g_phys);
    v_norm2 = graph_norm2_hat(space, out.v_hat);
  }
  out.failure = "iteration limit reached";
  SpinorField w_hat = out.v_hat;
  w_hat.axpy(t, fiber.e_hat);
  SpinorField w_phys = out.v_phys;
  w_phys.axpy(t, fiber.e_phys);
  out.r_hat = residual_hat(model, w_hat, w_phys);
  out.w_hat = std::move(w_hat);
  return out;
}

SpinorField random_minus_field(const SpectralSpace& space, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  SpinorField h(space.grid(), Repr::frequency);
  for (auto& z : h.data()) z = {normal(rng), normal(rng)};
  space.apply_projector(h.data(), -1);
  // damp high frequencies so the offset looks like a field, not noise
  const std::size_t n3 = h.points();
  for (std::size_t m = 0; m < n3; ++m) {
    const double w = 1.0 / (space.lambda(m) * space.lambda(m));
    for (int c = 0; c < 4; ++c) h(c, m) *= w;
  }
  const double nrm = std::sqrt(graph_norm2_hat(space, h));
  if (nrm > 0.0) h *= Complex(1.0 / nrm);
  return h;
}

Fiber make_fiber(const SpinorField& u, const ProblemModel& model) {
  if (!(u.grid() == model.grid())) throw std::invalid_argument("field grid does not match model grid");
  const SpectralSpace& space = model.space();
  SpinorField e_hat = to_frequency(u);
  const double total = graph_norm2_hat(space, e_hat);
  space.apply_projector(e_hat.data(), +1);
  const double e2 = graph_norm2_hat(space, e_hat);
  if (!(e2 > 0.0) || e2 <= 1e-28 * total) throw DegenerateFiber();
  SpinorField e_phys = dft_inverse(e_hat);
  return Fiber{model, std::move(e_hat), std::move(e_phys), e2};
}

void require_minus(const SpectralSpace& space, const SpinorField& v) {
  SpinorField vh = to_frequency(v);
  const double total = vh.coefficient_norm();
  space.apply_projector(vh.data(), +1);
  if (vh.coefficient_norm() > 1e-10 * std::max(total, 1e-300) && vh.coefficient_norm() > 0.0)
    throw std::invalid_argument("v is not in E-");
}

}  // namespace

double gamma(const SpinorField& u, double t, const SpinorField& v, const ProblemModel& model) {
  if (!(t >= 0.0)) throw std::invalid_argument("gamma: t must be >= 0");
  require_minus(model.space(), v);
  const SpinorField u_hat = to_frequency(u);
  const SpinorField e = project_plus(model.space(), u_hat);
  const double e2 = graph_inner(model.space(), e, e);
  if (!(e2 > 1e-28 * graph_inner(model.space(), u_hat, u_hat))) throw DegenerateFiber();
  SpinorField w = to_frequency(v);
  w.axpy(t, e);
  return energy(w, model).total;
}

FiberPartials fiber_partials(const SpinorField& u, double t, const SpinorField& v, const ProblemModel& model) {
  const Fiber fiber = make_fiber(u, model);
  SpinorField w_hat = to_frequency(v);
  w_hat.axpy(t, fiber.e_hat);
  const SpinorField w_phys = dft_inverse(w_hat);
  const SpinorField r_hat = residual_hat(model, w_hat, w_phys);
  FiberPartials p;
  p.dt = l2_inner_hat(r_hat, fiber.e_hat);
  p.dv_norm = std::sqrt(minus_gradient(model.space(), r_hat).second);
  return p;
}

double scalar_h(double t, const Spinor& u4, const Spinor& v4, const Nonlinearity& nl) {
  if (!(t >= 0.0)) throw std::invalid_argument("scalar_h: t must be >= 0");
  const double nu = u4.norm();
  const Spinor dir = (0.5 * t * t - 0.5) * u4 + t * v4;
  // u . w = sum_i u_i conj(w_i)
  const double re = std::real(dir.dot(u4));
  return nl.f(nu) * re + nl.F(nu) - nl.F((t * u4 + v4).norm());
}

InnerResult inner_maximize(const SpinorField& u, const ProblemModel& model, const InnerOptions& opts,
                           const NehariPoint* warm_start) {
  if (opts.starts < 1) throw std::invalid_argument("inner_maximize: need at least one start");
  const Fiber fiber = make_fiber(u, model);
  const SpectralSpace& space = model.space();

  double t0 = 1.0;
  SpinorField v0 = to_frequency(u);
  if (warm_start) {
    t0 = warm_start->t;
    v0 = to_frequency(warm_start->v);
    if (!(v0.grid() == model.grid())) throw std::invalid_argument("warm start grid mismatch");
  } else {
    space.apply_projector(v0.data(), -1);
  }

  std::mt19937_64 rng(opts.seed);
  const double offset = opts.perturbation * std::max(1.0, std::sqrt(fiber.e_norm2));
  std::vector<StartResult> runs;
  for (int s = 0; s < opts.starts; ++s) {
    SpinorField v = v0;
    if (s > 0) v.axpy(offset, random_minus_field(space, rng));
    runs.push_back(ascend(fiber, t0, std::move(v), opts));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const bool better_conv = runs[i].converged && !runs[best].converged;
    const bool same_conv = runs[i].converged == runs[best].converged;
    if (better_conv || (same_conv && runs[i].value > runs[best].value)) best = i;
  }
  StartResult& b = runs[best];

  InnerResult res;
  res.point = NehariPoint{b.t, b.v_hat};
  res.value = b.value;
  res.dt = b.dt;
  res.residual = b.residual;
  res.scale = b.scale;
  res.converged = b.converged;
  for (const auto& r : runs) res.iterations += r.iterations;
  res.unique = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i == best) continue;
    SpinorField diff = runs[i].w_hat;
    diff -= b.w_hat;
    const double dist = std::sqrt(graph_norm2_hat(space, diff)) / b.scale;
    const double dval = std::abs(runs[i].value - b.value) / std::max(1.0, std::abs(b.value));
    res.start_spread = std::max({res.start_spread, dist, dval});
    if (!runs[i].converged) res.unique = false;
  }
  if (res.start_spread > opts.unique_tol) res.unique = false;
  res.w_hat = std::move(b.w_hat);
  res.residual_hat = std::move(b.r_hat);
  if (!res.converged) throw InnerMaxIterations(std::move(res), b.failure);
  return res;
}

NehariResidual nehari_residual(const SpinorField& u, const ProblemModel& model) {
  if (!(u.grid() == model.grid())) throw std::invalid_argument("field grid does not match model grid");
  const SpinorField w_hat = to_frequency(u);
  const SpinorField r_hat = residual_hat(model, w_hat, to_physical(u));
  NehariResidual r;
  r.r_self = l2_inner_hat(r_hat, w_hat);
  r.r_minus = std::sqrt(minus_gradient(model.space(), r_hat).second);
  return r;
}

MountainPass mountain_pass_constants(const ProblemModel& model, double emb_C, double p) {
  if (!(p > 2.0 && p < 3.0)) throw std::invalid_argument("mountain_pass_constants: p must lie in (2, 3)");
  if (!(emb_C > 0.0)) throw std::invalid_argument("mountain_pass_constants: embedding constant must be positive");
  MountainPass mp;
  const double a = model.mass();
  mp.C = model.sup_K() * std::max(1.0 / (2.0 * a), std::pow(emb_C, p) / p);
  mp.eps = 1.0 / (4.0 * mp.C);
  // smallest A with f(s)s <= eps s + A s^(p-1), sampled over 12 decades
  const auto& nl = model.nonlinearity();
  double A = 0.0;
  constexpr int samples = 4000;
  for (int i = 0; i <= samples; ++i) {
    const double s = 1e-8 * std::pow(1e12, static_cast<double>(i) / samples);
    A = std::max(A, (std::abs(nl.f(s) * s) - mp.eps * s) / std::pow(s, p - 1.0));
  }
  mp.A_eps = std::max(A, std::numeric_limits<double>::min());
  // rho maximizes rho^2 (1/2 - C eps - C A rho^(p-2)) = rho^2/4 - C A rho^p
  mp.rho = std::pow(1.0 / (2.0 * p * mp.C * mp.A_eps), 1.0 / (p - 2.0));
  mp.alpha = mp.rho * mp.rho * (0.5 - mp.C * mp.eps - mp.C * mp.A_eps * std::pow(mp.rho, p - 2.0));
  return mp;
}

double estimate_embedding_constant(const SpectralSpace& space, double p, std::uint64_t seed) {
  if (!(p >= 2.0)) throw std::invalid_argument("estimate_embedding_constant: p must be >= 2");
  const Grid& g = space.grid();
  const std::size_t n3 = g.points();
  std::vector<SpinorField> starts;
  {
    SpinorField x(g, Repr::physical);
    x(0, g.flat(g.n() / 2, g.n() / 2, g.n() / 2)) = 1.0;
    starts.push_back(std::move(x));
  }
  {
    SpinorField x(g, Repr::physical);
    const double s2 = 2.0 * g.dx() * g.dx();
    for (std::size_t i = 0; i < n3; ++i) {
      const double r = g.radius(i);
      x(0, i) = std::exp(-r * r / (2.0 * s2));
    }
    starts.push_back(std::move(x));
  }
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    SpinorField x(g, Repr::physical);
    for (auto& z : x.data()) z = {normal(rng), normal(rng)};
    starts.push_back(std::move(x));
  }

  double best = 0.0;
  for (auto& start : starts) {
    SpinorField h = dft_forward(start);
    space.apply_projector(h.data(), +1);
    h *= Complex(1.0 / std::sqrt(graph_norm2_hat(space, h)));
    double prev = 0.0;
    for (int it = 0; it < 500; ++it) {
      SpinorField x = dft_inverse(h);
      const double norm_p = lq_norm(x, p);
      best = std::max(best, norm_p);
      if (it > 0 && std::abs(norm_p - prev) <= 1e-13 * norm_p) break;
      prev = norm_p;
      const std::vector<double> mod = pointwise_modulus(x);
      for (std::size_t i = 0; i < n3; ++i) {
        const double w = std::pow(mod[i], p - 2.0);
        for (int c = 0; c < 4; ++c) x(c, i) *= w;
      }
      h = dft_forward(x);
      space.apply_projector(h.data(), +1);
      for (std::size_t m = 0; m < n3; ++m)
        for (int c = 0; c < 4; ++c) h(c, m) /= space.lambda(m);
      const double nrm = std::sqrt(graph_norm2_hat(space, h));
      if (!(nrm > 0.0)) break;
      h *= Complex(1.0 / nrm);
    }
  }
  return best;
}

ReducedValue reduced_value(const SpinorField& w, const ProblemModel& model, const InnerOptions& opts,
                           const NehariPoint* warm_start) {
  const SpectralSpace& space = model.space();
  const SpinorField wh = to_frequency(w);
  const double nrm = std::sqrt(graph_norm2_hat(space, wh));
  if (std::abs(nrm - 1.0) > 1e-8) throw std::invalid_argument("reduced_value: w must have unit graph norm");
  SpinorField minus = wh;
  space.apply_projector(minus.data(), -1);
  if (std::sqrt(graph_norm2_hat(space, minus)) > 1e-8) throw std::invalid_argument("reduced_value: w must lie in E+");
  ReducedValue rv;
  rv.inner = inner_maximize(wh, model, opts, warm_start);
  rv.m = rv.inner.value;
  return rv;
}

namespace {

SpinorField tangent_gradient(const SpectralSpace& space, const SpinorField& w, const SpinorField& r_hat,
                             double t) {
  SpinorField g = r_hat;
  space.apply_projector(g.data(), +1);
  const std::size_t n3 = g.points();
  for (std::size_t m = 0; m < n3; ++m)
    for (int c = 0; c < 4; ++c) g(c, m) /= space.lambda(m);
  const SpinorField wh = to_frequency(w);
  const double radial = graph_inner_hat(space, g, wh);
  g.axpy(-radial, wh);
  g *= Complex(t);
  return g;
}

}  // namespace

SpinorField reduced_gradient(const SpinorField& w, const NehariPoint& point, const ProblemModel& model) {
  SpinorField w_hat = to_frequency(point.v);
  w_hat.axpy(point.t, to_frequency(w));
  const SpinorField r_hat = residual_hat(model, w_hat, dft_inverse(w_hat));
  return tangent_gradient(model.space(), w, r_hat, point.t);
}

SpinorField reduced_gradient(const SpinorField& w, const InnerResult& inner, const ProblemModel& model) {
  return tangent_gradient(model.space(), w, inner.residual_hat, inner.point.t);
}

}  // namespace ndirac
