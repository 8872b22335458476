#include "ndirac/diagnostics.hpp"

#include "ndirac/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ndirac {

namespace {

using Rng = std::mt19937_64;

CheckEntry make_entry(const std::string& name, double margin, double tol, std::size_t samples, bool pass,
                      std::string detail = {}) {
  CheckEntry e;
  e.name = name;
  e.margin = margin;
  e.tolerance = tol;
  e.samples = samples;
  e.pass = pass;
  e.detail = std::move(detail);
  return e;
}

// Smooth random field in the physical representation, envelope exp(-|k|^2 width^2 / 2).
SpinorField random_field(const SpectralSpace& space, Rng& rng, double width = 1.0, double amplitude = 1.0) {
  const Grid& g = space.grid();
  std::normal_distribution<double> normal;
  SpinorField hat(g, Repr::frequency);
  for (std::size_t m = 0; m < g.points(); ++m) {
    const Vec3& k = space.wavevector(m);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const double env = std::exp(-0.5 * width * width * k2);
    for (int c = 0; c < 4; ++c) hat(c, m) = env * Complex(normal(rng), normal(rng));
  }
  const double norm = l2_norm(hat);
  if (norm > 0.0) hat *= Complex(amplitude / norm);
  return dft_inverse(hat);
}

Vec3 random_wavevector(Rng& rng, double kmax) {
  std::uniform_real_distribution<double> unif(-kmax, kmax);
  return {unif(rng), unif(rng), unif(rng)};
}

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

CheckEntry check_anticommutation() {
  const DiracMatrices& d = dirac_matrices();
  const Mat4 id = Mat4::Identity();
  double err = 0.0;
  std::size_t count = 0;
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      const Mat4 anti = d.alpha[j] * d.alpha[k] + d.alpha[k] * d.alpha[j];
      err = std::max(err, max_abs(anti - (j == k ? 2.0 : 0.0) * id));
      ++count;
    }
    err = std::max(err, max_abs(d.alpha[j] * d.beta + d.beta * d.alpha[j]));
    ++count;
  }
  err = std::max(err, max_abs(d.beta * d.beta - id));
  ++count;
  const double tol = 1e-15;
  return make_entry("anticommutation", tol - err, tol, count, err <= tol);
}

CheckEntry check_projector_algebra(const SpectralSpace& space, Rng& rng) {
  const Grid& g = space.grid();
  const double a = space.mass();
  const Mat4 id = Mat4::Identity();
  double err = 0.0;
  std::size_t count = 0;
  auto test_k = [&](const Vec3& k) {
    const DiracModeSystem s = mode_system(k, a);
    err = std::max(err, max_abs(s.p_plus * s.p_plus - s.p_plus));
    err = std::max(err, max_abs(s.p_minus * s.p_minus - s.p_minus));
    err = std::max(err, max_abs(s.p_plus + s.p_minus - id));
    err = std::max(err, max_abs(s.p_plus * s.p_minus));
    ++count;
  };
  const double kmax = std::abs(g.frequency(g.n() / 2));
  for (int i = 0; i < 1000; ++i) test_k(random_wavevector(rng, kmax));
  for (std::size_t m = 0; m < g.points(); ++m) test_k(space.wavevector(m));

  // The in-place grid projector agrees with the explicit matrices.
  std::normal_distribution<double> normal;
  SpinorField hat(g, Repr::frequency);
  for (auto& z : hat.data()) z = Complex(normal(rng), normal(rng));
  SpinorField plus = hat;
  space.apply_projector(plus.data(), +1);
  for (std::size_t m = 0; m < g.points(); ++m) {
    const Spinor expect = mode_system(space.wavevector(m), a).p_plus * hat.spinor(m);
    err = std::max(err, (expect - plus.spinor(m)).cwiseAbs().maxCoeff());
  }
  const double tol = 1e-13;
  return make_entry("projector_algebra", tol - err, tol, count, err <= tol);
}

CheckEntry check_parseval(const SpectralSpace& space, Rng& rng) {
  const Grid& g = space.grid();
  std::normal_distribution<double> normal;
  double err = 0.0;
  const int fields = 10;
  for (int i = 0; i < fields; ++i) {
    SpinorField u(g, Repr::physical);
    for (auto& z : u.data()) z = Complex(normal(rng), normal(rng));
    const SpinorField hat = dft_forward(u);
    double phys = 0.0;
    for (const auto& z : u.data()) phys += std::norm(z);
    phys *= g.cell_volume();
    double freq = 0.0;
    for (const auto& z : hat.data()) freq += std::norm(z);
    err = std::max(err, std::abs(phys - freq) / phys);
    const SpinorField back = dft_inverse(hat);
    SpinorField diff = back;
    diff -= u;
    err = std::max(err, diff.coefficient_norm() / u.coefficient_norm());
  }
  const double tol = 1e-12;
  return make_entry("parseval_roundtrip", tol - err, tol, fields, err <= tol);
}

CheckEntry check_spectral_gap(const SpectralSpace& space, Rng& rng) {
  const double a = space.mass();
  double margin = std::numeric_limits<double>::infinity();
  const int fields = 100;
  std::uniform_real_distribution<double> width(0.0, 2.0);
  for (int i = 0; i < fields; ++i) {
    const SpinorField u = random_field(space, rng, width(rng));
    const double g2 = std::pow(graph_norm(space, u), 2);
    const double l2 = std::pow(l2_norm(u), 2);
    margin = std::min(margin, (g2 - a * l2) / g2);
  }
  const double tol = 1e-13;
  return make_entry("spectral_gap", margin, tol, fields, margin >= -tol);
}

CheckEntry check_remark1(const Nonlinearity& nl) {
  const int samples = 10000;
  double margin = std::numeric_limits<double>::infinity();
  bool pass = true;
  for (int i = 0; i < samples; ++i) {
    const double t = 1e-6 * std::pow(1e9, static_cast<double>(i) / (samples - 1));
    const double F = nl.F(t);
    const double gap = 0.5 * nl.f(t) * t * t - F;
    const double rel = gap / std::max(1.0, F);
    margin = std::min(margin, rel);
    if (rel < -1e-12) pass = false;
  }
  return make_entry("remark1", margin, 1e-12, samples, pass);
}

CheckEntry check_gradient_fd(const ProblemModel& model, Rng& rng) {
  const SpectralSpace& space = model.space();
  const int pairs = 20;
  double worst = 0.0;
  std::uniform_real_distribution<double> amp(0.5, 4.0);
  for (int i = 0; i < pairs; ++i) {
    const SpinorField u = random_field(space, rng, 1.0, amp(rng) * std::sqrt(model.grid().volume()) * 0.1);
    SpinorField v = random_field(space, rng, 1.0);
    v *= Complex(1.0 / graph_norm(space, v));
    const double h = 1e-5 * std::max(1.0, graph_norm(space, u));
    const double plus = energy(u + h * v, model).total;
    const double minus = energy(u - h * v, model).total;
    const double fd = (plus - minus) / (2.0 * h);
    const double an = derivative_along(u, v, model);
    const double scale = std::max(std::abs(an), graph_dual_norm(space, residual_l2(u, model)));
    worst = std::max(worst, std::abs(fd - an) / scale);
  }
  const double tol = 1e-6;
  return make_entry("gradient_fd", tol - worst, tol, pairs, worst <= tol);
}

CheckEntry check_sign_facts(const ProblemModel& model, Rng& rng) {
  const SpectralSpace& space = model.space();
  double margin = std::numeric_limits<double>::infinity();
  bool pass = true;
  std::size_t samples = 0;
  std::ostringstream why;
  std::uniform_real_distribution<double> amp(0.1, 10.0);
  const double base = std::sqrt(model.grid().volume()) * 0.1;
  for (int i = 0; i < 20; ++i) {
    const SpinorField v = project_minus(space, random_field(space, rng, 1.0, amp(rng) * base));
    const double phi = energy(v, model).total;
    ++samples;
    if (!(phi < 0.0)) {
      pass = false;
      why << "Phi >= 0 on E- sample " << i << "; ";
    }
    margin = std::min(margin, -phi / std::max(1.0, std::pow(graph_norm(space, v), 2)));
  }
  for (int i = 0; i < 100; ++i) {
    const SpinorField u = random_field(space, rng, 1.0, amp(rng) * base);
    const EnergyBreakdown e = energy(u, model);
    const double scale = std::max(1.0, e.quad_plus + e.quad_minus + e.pot + e.nonlin);
    const double gap = std::abs(nehari_identity_gap(u, model)) / scale;
    const double excess = nehari_excess(u, model);
    ++samples;
    if (gap > 1e-10) {
      pass = false;
      why << "identity gap " << gap << "; ";
    }
    if (excess < -1e-10) {
      pass = false;
      why << "excess " << excess << "; ";
    }
    margin = std::min({margin, 1e-10 - gap, excess + 1e-10});
  }
  return make_entry("sign_facts", margin, 1e-10, samples, pass, why.str());
}

CheckEntry check_scalar_h(const Nonlinearity& nl, Rng& rng) {
  const int samples = 10000;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> tdist(0.0, 3.0);
  std::uniform_real_distribution<double> ldist(-3.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Spinor u, v;
    const double su = std::pow(10.0, ldist(rng));
    const double sv = std::pow(10.0, ldist(rng));
    for (int c = 0; c < 4; ++c) {
      u[c] = su * Complex(normal(rng), normal(rng));
      v[c] = sv * Complex(normal(rng), normal(rng));
    }
    const double h = scalar_h(tdist(rng), u, v, nl);
    worst = std::max(worst, h);
  }
  return make_entry("scalar_h", -worst, 0.0, samples, worst < 0.0);
}

SpinorField fiber_test_field(const SpectralSpace& space, Rng& rng, std::uint64_t seed) {
  SpinorField u = to_physical(initial_guess(space, seed, InitialKind::gaussian_bump, 1.5));
  u *= Complex(4.0);
  u += random_field(space, rng, 1.5, 0.2 * l2_norm(u));
  return u;
}

InnerOptions diagnostic_inner(std::uint64_t seed) {
  InnerOptions o;
  o.max_iterations = 3000;
  o.starts = 1;
  o.seed = seed;
  return o;
}

CheckEntry check_domination(const ProblemModel& model, Rng& rng, std::uint64_t seed) {
  const SpectralSpace& space = model.space();
  const SpinorField u = fiber_test_field(space, rng, seed + 1);
  const InnerResult r = inner_maximize(u, model, diagnostic_inner(seed));
  const SpinorField w = to_physical(r.w_hat);
  const double phi_w = energy(w, model).total;
  const double wn = graph_norm(space, w);
  std::uniform_real_distribution<double> sdist(0.0, 2.5);
  std::uniform_real_distribution<double> zdist(0.0, 1.0);
  double margin = std::numeric_limits<double>::infinity();
  const int points = 50;
  for (int i = 0; i < points; ++i) {
    SpinorField z = project_minus(space, random_field(space, rng, 1.0));
    z *= Complex(zdist(rng) * wn / std::max(1e-300, graph_norm(space, z)));
    SpinorField p = sdist(rng) * w;
    p += z;
    margin = std::min(margin, phi_w - energy(p, model).total);
  }
  std::ostringstream d;
  d << "Phi(maximizer)=" << phi_w << " t=" << r.point.t;
  return make_entry("domination", margin, 0.0, points, margin > 0.0, d.str());
}

CheckEntry check_fiber_uniqueness(const ProblemModel& model, Rng& rng, std::uint64_t seed) {
  const SpectralSpace& space = model.space();
  const int fibers = 5;
  const double tol = 1e-6;
  double spread = 0.0;
  double t_err = 0.0;
  double v_err = 0.0;
  for (int i = 0; i < fibers; ++i) {
    const SpinorField u = fiber_test_field(space, rng, seed + 10 + i);
    InnerOptions opts = diagnostic_inner(seed + i);
    opts.starts = 3;
    const InnerResult r = inner_maximize(u, model, opts);
    spread = std::max(spread, r.unique ? r.start_spread : std::numeric_limits<double>::infinity());

    // A Nehari member projects onto itself: t = 1, v = its E- part.
    const SpinorField w = to_physical(r.w_hat);
    const InnerResult back = inner_maximize(w, model, diagnostic_inner(seed + 100 + i));
    t_err = std::max(t_err, std::abs(back.point.t - 1.0));
    const SpinorField w_minus = project_minus(space, r.w_hat);
    SpinorField diff = back.point.v;
    diff -= w_minus;
    v_err = std::max(v_err, graph_norm(space, diff) / std::max(1e-300, graph_norm(space, w_minus)));
  }
  const double worst = std::max({spread, t_err, v_err});
  std::ostringstream d;
  d << "spread=" << spread << " |t-1|=" << t_err << " v_err=" << v_err;
  return make_entry("fiber_uniqueness", tol - worst, tol, 2 * fibers, worst <= tol, d.str());
}

double golden_min(const std::function<double(double)>& g, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    if (g1 < g2) {
      hi = x2; x2 = x1; g2 = g1;
      x1 = hi - r * (hi - lo); g1 = g(x1);
    } else {
      lo = x1; x1 = x2; g1 = g2;
      x2 = lo + r * (hi - lo); g2 = g(x2);
    }
  }
  return std::min(g1, g2);
}

CheckEntry check_cq(Rng& rng) {
  std::uniform_real_distribution<double> qdist(2.05, 2.95);
  std::uniform_real_distribution<double> vdist(-2.0, 1.0);
  const int samples = 50;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double q = qdist(rng);
    const double V = std::pow(10.0, vdist(rng));
    // minimize over s = log t
    auto g = [&](double s) { return V * std::exp((2.0 - q) * s) + std::exp((3.0 - q) * s); };
    const double brute = golden_min(g, -60.0, 60.0);
    const double closed = cq_constant(q) * std::pow(V, 3.0 - q);
    worst = std::max(worst, std::abs(brute - closed) / closed);
  }
  const double tol = 1e-7;
  return make_entry("cq_identity", tol - worst, tol, samples, worst <= tol);
}

CheckEntry check_superlevel(const SpectralSpace& space, Rng& rng) {
  const int fields = 100;
  std::uniform_real_distribution<double> qdist(0.05, 0.95);
  double margin = std::numeric_limits<double>::infinity();
  bool pass = true;
  for (int i = 0; i < fields; ++i) {
    const SpinorField u = random_field(space, rng, 1.0, 10.0);
    std::vector<double> mod = pointwise_modulus(u);
    std::sort(mod.begin(), mod.end());
    double t0 = mod[static_cast<std::size_t>(qdist(rng) * mod.size())];
    double t1 = mod[static_cast<std::size_t>(qdist(rng) * mod.size())];
    if (t0 > t1) std::swap(t0, t1);
    if (!(t0 < t1)) t1 = t0 * 2.0 + 1.0;
    const double lhs = t0 * t0 * t0 * superlevel_measure(u, t0, t1);
    const double rhs = std::pow(lq_norm(u, 3.0), 3);
    margin = std::min(margin, (rhs - lhs) / rhs);
    if (lhs > rhs) pass = false;
  }
  return make_entry("superlevel_bound", margin, 0.0, fields, pass);
}

CheckEntry from_condition(const ConditionResult& c, std::size_t samples) {
  std::ostringstream d;
  d << c.detail << " (witness " << c.witness << ", value " << c.value << ")";
  return make_entry(c.name, c.pass ? std::abs(c.value) : -std::abs(c.value), 0.0, samples, c.pass, d.str());
}

double suite_q(const Nonlinearity& nl) {
  const double p = nl.p();
  return p > 2.0 && p < 3.0 ? p : 2.5;
}

}  // namespace

bool DiagnosticsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.pass; });
}

const CheckEntry* DiagnosticsReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

const std::vector<std::string>& canonical_checks() {
  static const std::vector<std::string> names = {
      "anticommutation", "projector_algebra", "parseval_roundtrip", "spectral_gap",
      "remark1",         "gradient_fd",       "sign_facts",         "scalar_h",
      "domination",      "fiber_uniqueness",  "cq_identity",        "superlevel_bound"};
  return names;
}

DiagnosticsReport run_suite(const ProblemModel& model, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  DiagnosticsReport rep;
  rep.grid = model.grid();
  rep.seed = seed;
  {
    std::ostringstream d;
    d << "a=" << model.mass() << " V=" << model.v_profile().describe() << " K=" << model.k_profile().describe()
      << " f=" << model.nonlinearity().describe();
    rep.model_description = d.str();
  }
  const SpectralSpace& space = model.space();
  const Nonlinearity& nl = model.nonlinearity();

  rep.f_report = check_f_conditions(nl);
  for (const ConditionResult* c : {&rep.f_report.f1, &rep.f_report.f2, &rep.f_report.f3, &rep.f_report.f4})
    rep.checks.push_back(from_condition(*c, rep.f_report.samples));
  rep.vk_report = check_vk_conditions(model, suite_q(nl));
  {
    const VkReport& vk = rep.vk_report;
    std::ostringstream d;
    d << "min V=" << vk.min_V << " max V=" << vk.max_V << " min K=" << vk.min_K << " a=" << vk.mass;
    const double margin = std::min({vk.min_V, vk.min_K, vk.mass - vk.max_V});
    rep.checks.push_back(make_entry("vk0", margin, 0.0, model.grid().points(), vk.vk0_pass, d.str()));
  }
  const double p = nl.p();
  if (p > 2.0 && p < 3.0) {
    try {
      rep.embedding_constant = estimate_embedding_constant(space, p, seed);
      rep.mountain_pass = mountain_pass_constants(model, rep.embedding_constant, p);
    } catch (const std::exception&) {
      // constants stay zero; the report still carries every check
    }
  }

  // One generator per check, seeded from the suite seed and the check index,
  // so that each check is reproducible on its own.
  const std::vector<std::function<CheckEntry(Rng&)>> battery = {
      [](Rng&) { return check_anticommutation(); },
      [&](Rng& r) { return check_projector_algebra(space, r); },
      [&](Rng& r) { return check_parseval(space, r); },
      [&](Rng& r) { return check_spectral_gap(space, r); },
      [&](Rng&) { return check_remark1(nl); },
      [&](Rng& r) { return check_gradient_fd(model, r); },
      [&](Rng& r) { return check_sign_facts(model, r); },
      [&](Rng& r) { return check_scalar_h(nl, r); },
      [&](Rng& r) { return check_domination(model, r, seed); },
      [&](Rng& r) { return check_fiber_uniqueness(model, r, seed); },
      [](Rng& r) { return check_cq(r); },
      [&](Rng& r) { return check_superlevel(space, r); },
  };
  const auto& names = canonical_checks();
  for (std::size_t i = 0; i < battery.size(); ++i) {
    Rng rng(seed * 1000003ULL + i);
    try {
      rep.checks.push_back(battery[i](rng));
    } catch (const std::exception& e) {
      rep.checks.push_back(make_entry(names[i], -std::numeric_limits<double>::infinity(), 0.0, 0, false,
                                      std::string("error: ") + e.what()));
    }
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

double tail_fraction(const SpinorField& u, double r, double q, const ProblemModel& model) {
  if (!(r < u.grid().half_length())) throw std::invalid_argument("tail_fraction: r must be below L");
  if (!(q >= 2.0 && q <= 3.0)) throw std::invalid_argument("tail_fraction: q must lie in [2, 3]");
  if (!(u.grid() == model.grid())) throw std::invalid_argument("tail_fraction: grid mismatch");
  const SpinorField phys = to_physical(u);
  const std::vector<double> mod = pointwise_modulus(phys);
  const auto& K = model.K();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < mod.size(); ++i) {
    const double w = K[i] * std::pow(mod[i], q);
    den += w;
    if (phys.grid().radius(i) > r) num += w;
  }
  if (!(den > 0.0)) throw std::domain_error("tail_fraction: zero denominator");
  return num / den;
}

double superlevel_measure(const SpinorField& u, double t0, double t1) {
  if (!(t0 > 0.0)) throw std::invalid_argument("superlevel_measure: t0 must be positive");
  if (!(t0 < t1)) throw std::invalid_argument("superlevel_measure: t0 must be below t1");
  const std::vector<double> mod = pointwise_modulus(to_physical(u));
  const auto count = std::count_if(mod.begin(), mod.end(), [&](double m) { return m >= t0 && m <= t1; });
  return static_cast<double>(count) * u.grid().cell_volume();
}

}  // namespace ndirac
