#include "ndirac/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <random>

namespace ndirac {

namespace {

SpinorField normalized(const SpectralSpace& space, SpinorField h) {
  const double nrm = graph_norm(space, h);
  if (!(nrm > 0.0)) throw std::invalid_argument("cannot normalize a zero field");
  h *= Complex(1.0 / nrm);
  return h;
}

Spinor seeded_upper_spinor(std::uint64_t seed) {
  Spinor s = Spinor::Zero();
  if (seed == 0) {
    s[0] = 1.0;
    return s;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  s[0] = {normal(rng), normal(rng)};
  s[1] = {normal(rng), normal(rng)};
  return s / s.norm();
}

void check_model(const ProblemModel& model) {
  const VkReport vk = check_vk_conditions(model, 2.5);
  if (!vk.vk0_pass) throw ModelRejected("model violates VK0 (positivity or sup V < a)");
  const FConditionReport fr = check_f_conditions(model.nonlinearity());
  if (!fr.all_pass()) throw ModelRejected("nonlinearity violates the f conditions");
}

}  // namespace

SpinorField initial_guess(const SpectralSpace& space, const Spinor& spinor, double sigma) {
  const Grid& g = space.grid();
  const Spinor candidates[] = {spinor, Spinor::Unit(0), Spinor::Unit(1)};
  for (const Spinor& s : candidates) {
    SpinorField x(g, Repr::physical);
    for (std::size_t i = 0; i < g.points(); ++i) {
      const double r = g.radius(i);
      x.set_spinor(i, std::exp(-r * r / (2.0 * sigma * sigma)) * s);
    }
    SpinorField h = dft_forward(x);
    const double before = graph_norm(space, h);
    space.apply_projector(h.data(), +1);
    const double after = graph_norm(space, h);
    if (after > 1e-12 * before) return normalized(space, std::move(h));
  }
  throw std::runtime_error("initial_guess: projection onto E+ vanished");
}

SpinorField initial_guess(const SpectralSpace& space, std::uint64_t seed, InitialKind kind, double sigma) {
  if (kind == InitialKind::gaussian_bump) return initial_guess(space, seeded_upper_spinor(seed), sigma);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SpinorField h(space.grid(), Repr::frequency);
  const std::size_t n3 = h.points();
  for (int c = 0; c < 4; ++c)
    for (std::size_t m = 0; m < n3; ++m) {
      const double w = std::exp(-0.5 * sigma * sigma * (space.lambda(m) * space.lambda(m) - space.mass() * space.mass()));
      h(c, m) = w * Complex(normal(rng), normal(rng));
    }
  space.apply_projector(h.data(), +1);
  return normalized(space, std::move(h));
}

GroundStateResult minimize_from(const ProblemModel& model, const SpinorField& w0, const SolveOptions& opts,
                                const NehariPoint* warm_start) {
  if (!(opts.tol_outer > 0.0) || opts.max_outer < 1) throw std::invalid_argument("invalid solve options");
  const auto t_begin = std::chrono::steady_clock::now();
  const SpectralSpace& space = model.space();

  InnerOptions loop_inner = opts.inner;
  loop_inner.starts = 1;

  GroundStateResult res;
  res.seed = opts.seed;
  SpinorField w = normalized(space, project_plus(space, to_frequency(w0)));
  ReducedValue rv = reduced_value(w, model, loop_inner, warm_start);
  res.delta_numeric = std::numeric_limits<double>::infinity();
  res.min_phi = std::numeric_limits<double>::infinity();

  // limited-memory BFGS pairs, stored in the tangent space where they were
  // formed; the search direction is projected back onto the current one
  constexpr std::size_t kMemory = 8;
  std::deque<std::pair<SpinorField, SpinorField>> pairs;
  const auto tangent = [&](SpinorField x, const SpinorField& at) {
    x.axpy(-graph_inner(space, at, x), at);
    return x;
  };

  SpinorField prev_w, prev_grad;
  int inner_iters = rv.inner.iterations;
  for (int iter = 0;; ++iter) {
    const double m = rv.m;
    const double full = graph_dual_norm(space, rv.inner.residual_hat);
    res.delta_numeric = std::min(res.delta_numeric, rv.inner.point.t);
    res.min_phi = std::min(res.min_phi, m);
    TraceEntry entry{iter, m, full, 0.0, inner_iters};
    res.iterations = iter;

    if (full <= opts.tol_outer * rv.inner.scale) {
      res.converged = true;
      res.trace.push_back(entry);
      break;
    }
    if (iter >= opts.max_outer) {
      res.trace.push_back(entry);
      break;
    }

    SpinorField grad = reduced_gradient(w, rv.inner, model);
    const double noise = 1e-14 * std::max(1.0, std::abs(m));
    if (!prev_grad.empty()) {
      SpinorField sk = w;
      sk -= prev_w;
      sk = tangent(std::move(sk), w);
      SpinorField yk = grad;
      yk -= tangent(prev_grad, w);
      const double sy = graph_inner(space, sk, yk);
      if (sy > 1e-12 * std::sqrt(graph_inner(space, sk, sk) * graph_inner(space, yk, yk))) {
        pairs.emplace_back(std::move(sk), std::move(yk));
        if (pairs.size() > kMemory) pairs.pop_front();
      }
    }

    inner_iters = 0;
    bool accepted = false;
    SpinorField w_trial;
    ReducedValue trial;
    double s = 0.0;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1 && pairs.empty() && prev_grad.empty()) break;
      SpinorField d = grad;
      d *= -1.0;
      if (pairs.empty()) {
        d *= opts.step0;
      } else {
        std::vector<double> alpha(pairs.size());
        for (std::size_t i = pairs.size(); i-- > 0;) {
          const auto& [sk, yk] = pairs[i];
          alpha[i] = graph_inner(space, sk, d) / graph_inner(space, sk, yk);
          d.axpy(-alpha[i], yk);
        }
        const auto& [sl, yl] = pairs.back();
        d *= graph_inner(space, sl, yl) / graph_inner(space, yl, yl);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const auto& [sk, yk] = pairs[i];
          const double beta = graph_inner(space, yk, d) / graph_inner(space, sk, yk);
          d.axpy(alpha[i] - beta, sk);
        }
        d = tangent(std::move(d), w);
      }
      const double slope = graph_inner(space, grad, d);
      if (!(slope < 0.0)) {
        pairs.clear();
        continue;
      }
      s = 1.0;
      while (s >= 1e-12) {
        w_trial = w;
        w_trial.axpy(s, d);
        w_trial = normalized(space, std::move(w_trial));
        try {
          trial = reduced_value(w_trial, model, loop_inner, &rv.inner.point);
          inner_iters += trial.inner.iterations;
          const double decrease = -opts.armijo_c * s * slope;
          if (trial.m <= m - decrease || (decrease <= noise && trial.m <= m)) {
            accepted = true;
            break;
          }
        } catch (const InnerMaxIterations& e) {
          inner_iters += e.best().iterations;
        }
        s *= 0.5;
      }
      if (!accepted) pairs.clear();
    }
    if (!accepted) {
      res.no_descent = true;
      res.trace.push_back(entry);
      break;
    }
    entry.step = s;
    res.trace.push_back(entry);
    prev_w = w;
    prev_grad = std::move(grad);
    w = std::move(w_trial);
    rv = std::move(trial);
  }

  res.w = w;
  res.point = rv.inner.point;
  res.u_star = dft_inverse(rv.inner.w_hat);
  res.c = energy(res.u_star, model).total;
  res.residual = nehari_residual(res.u_star, model);
  res.residual_full = graph_dual_norm(space, residual_l2(res.u_star, model));

  // fiber of the result, re-solved from scratch with the multi-start check
  try {
    const InnerResult check = inner_maximize(res.u_star, model, opts.inner);
    res.t_check = check.point.t;
    res.fiber_unique = check.unique;
    const SpinorField minus = project_minus(space, to_frequency(res.u_star));
    SpinorField diff = check.point.v;
    diff -= minus;
    const double denom = graph_norm(space, minus);
    res.v_check_error = denom > 0.0 ? graph_norm(space, diff) / denom : graph_norm(space, diff);
  } catch (const std::exception&) {
    res.t_check = std::numeric_limits<double>::quiet_NaN();
    res.fiber_unique = false;
  }
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return res;
}

namespace {

// converged first; energies within 1e-8 relative count as tied and are
// separated by the residual, then by the energy
bool better(const GroundStateResult& a, const GroundStateResult& b) {
  if (a.converged != b.converged) return a.converged;
  const double scale = std::max({1.0, std::abs(a.c), std::abs(b.c)});
  if (std::abs(a.c - b.c) > 1e-8 * scale) return a.c < b.c;
  if (a.residual_full != b.residual_full) return a.residual_full < b.residual_full;
  return a.c < b.c;
}

}  // namespace

GroundStateResult minimize_ground_state(const ProblemModel& model, const SolveOptions& opts) {
  if (opts.starts < 1) throw std::invalid_argument("minimize_ground_state: need at least one start");
  if (!opts.force) check_model(model);
  const auto t_begin = std::chrono::steady_clock::now();

  auto run = [&](int i) {
    SolveOptions o = opts;
    o.seed = opts.seed + static_cast<std::uint64_t>(i);
    o.inner.seed = opts.inner.seed + static_cast<std::uint64_t>(i);
    const SpinorField w0 = initial_guess(model.space(), o.seed, o.initial, o.sigma);
    return minimize_from(model, w0, o);
  };

  std::vector<GroundStateResult> results;
  const unsigned budget = thread_budget();
  for (int first = 0; first < opts.starts; first += static_cast<int>(budget)) {
    const int last = std::min(opts.starts, first + static_cast<int>(budget));
    if (last - first == 1) {
      results.push_back(run(first));
      continue;
    }
    std::vector<std::future<GroundStateResult>> jobs;
    for (int i = first; i < last; ++i) jobs.push_back(std::async(std::launch::async, run, i));
    for (auto& j : jobs) results.push_back(j.get());
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (better(results[i], results[best])) best = i;
  GroundStateResult out = std::move(results[best]);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return out;
}

GroundStateResult refine(const GroundStateResult& prior, const ProblemModel& fine_model, const SolveOptions& opts) {
  const Grid& coarse = prior.w.grid();
  const Grid& fine = fine_model.grid();
  if (fine.half_length() != coarse.half_length() || fine.n() <= coarse.n())
    throw std::invalid_argument("refine: target grid is not strictly finer");
  const SpinorField w = spectral_interpolate(to_frequency(prior.w), fine);
  const NehariPoint warm{prior.point.t, spectral_interpolate(to_frequency(prior.point.v), fine)};
  GroundStateResult out = minimize_from(fine_model, w, opts, &warm);
  out.energy_change = out.c - prior.c;
  return out;
}

}  // namespace ndirac
