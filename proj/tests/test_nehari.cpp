#include "doctest.h"

#include "test_util.hpp"

#include <Eigen/Eigenvalues>

using namespace ndirac;
using testutil::smooth_field;

namespace {

ProblemModel bumpy_model() {
  return ProblemModel(Grid(8, 4.0), 1.0, Profile::rational_decay(0.3, 1.0), Profile::exponential(1.0, 3.0),
                      Nonlinearity::power(2.5));
}

SpinorField plus_field(const ProblemModel& m, std::mt19937_64& rng, double amp) {
  SpinorField u = to_physical(initial_guess(m.space(), Spinor(1, 0, 0, 0), 1.2));
  u *= Complex(amp);
  u += smooth_field(m.space(), rng, 1.0, 0.1 * amp);
  return u;
}

InnerOptions tight() {
  InnerOptions o;
  o.tol = 1e-11;
  return o;
}

// Orthonormal basis of the eigenspace of the symbol with the given sign.
std::array<Spinor, 2> eigen_basis(const Vec3& k, double a, int sign) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(dirac_symbol(k, a));
  const int off = sign > 0 ? 2 : 0;
  return {Spinor(es.eigenvectors().col(off)), Spinor(es.eigenvectors().col(off + 1))};
}

}  // namespace

TEST_CASE("scalar inequality h < 0 for v != 0") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> td(0.0, 4.0);
  for (double p : {2.2, 2.5, 2.8}) {
    const Nonlinearity nl = Nonlinearity::power(p);
    for (int i = 0; i < 2000; ++i) {
      Spinor u, v;
      for (int c = 0; c < 4; ++c) {
        u[c] = Complex(nd(rng), nd(rng));
        v[c] = 0.3 * Complex(nd(rng), nd(rng));
      }
      CHECK(scalar_h(td(rng), u, v, nl) < 0.0);
    }
    const Spinor u(1.0, Complex(0, 2.0), 0.5, 0.0);
    CHECK(std::abs(scalar_h(1.0, u, Spinor::Zero(), nl)) <= 1e-15);
  }
  CHECK_THROWS_AS(scalar_h(-1.0, Spinor::Ones(), Spinor::Ones(), Nonlinearity::power(2.5)), std::invalid_argument);
}

TEST_CASE("gamma and its partials") {
  const ProblemModel m = bumpy_model();
  std::mt19937_64 rng(32);
  const SpinorField u = plus_field(m, rng, 3.0);
  const SpinorField v = project_minus(m.space(), smooth_field(m.space(), rng, 1.0, 0.5));
  const double t = 1.7;
  SpinorField w = project_plus(m.space(), u);
  w *= Complex(t);
  w += v;
  CHECK(gamma(u, t, v, m) == doctest::Approx(energy(w, m).total).epsilon(1e-13));
  const double h = 1e-5;
  const double fd = (gamma(u, t + h, v, m) - gamma(u, t - h, v, m)) / (2.0 * h);
  CHECK(fiber_partials(u, t, v, m).dt == doctest::Approx(fd).epsilon(1e-6));
  CHECK_THROWS_AS(gamma(u, -1.0, v, m), std::invalid_argument);
  CHECK_THROWS_AS(gamma(u, 1.0, u, m), std::invalid_argument);
  CHECK_THROWS_AS(gamma(v, 1.0, v, m), DegenerateFiber);
}

TEST_CASE("fiber maximum on a single mode matches a five-dimensional grid search") {
  // the reduction to one mode needs translation invariant V and K
  const ProblemModel m(Grid(8, 4.0), 1.0, Profile::constant(0.3), Profile::constant(0.8), Nonlinearity::power(2.5));
  const Grid& g = m.grid();
  const double a = m.mass();
  const Vec3 k{M_PI / g.half_length(), 0.0, 0.0};
  const auto plus = eigen_basis(k, a, +1);
  const auto minus = eigen_basis(k, a, -1);
  const Spinor xi = plus[0];
  SpinorField u(g, Repr::physical);
  for (std::size_t i = 0; i < g.points(); ++i) u.set_spinor(i, std::exp(Complex(0, k[0] * g.position(i)[0])) * xi);

  // |t xi + eta|^2 = t^2 + |eta|^2 pointwise
  const double lam = std::sqrt(a * a + k[0] * k[0]);
  const double vol = g.volume();
  const double SV = 0.3 * vol, SK = 0.8 * vol;
  auto phi = [&](const std::array<double, 5>& x) {
    const Spinor eta = Complex(x[1], x[2]) * minus[0] + Complex(x[3], x[4]) * minus[1];
    const double e2 = eta.squaredNorm(), t2 = x[0] * x[0];
    const double s = std::sqrt(t2 + e2);
    return 0.5 * lam * vol * (t2 - e2) + 0.5 * SV * (t2 + e2) - SK * std::pow(s, 2.5) / 2.5;
  };
  std::array<double, 5> center{5.0, 0.0, 0.0, 0.0, 0.0};
  std::array<double, 5> half{5.0, 2.0, 2.0, 2.0, 2.0};
  double best = phi(center);
  for (int round = 0; round < 80; ++round) {
    std::array<double, 5> arg = center;
    std::array<int, 5> idx{};
    for (int flat = 0; flat < 9 * 9 * 9 * 9 * 9; ++flat) {
      int r = flat;
      std::array<double, 5> x{};
      for (int d = 0; d < 5; ++d) {
        idx[d] = r % 9;
        r /= 9;
        x[d] = center[d] + half[d] * (idx[d] - 4) / 4.0;
      }
      if (x[0] < 0.0) continue;
      const double val = phi(x);
      if (val > best) {
        best = val;
        arg = x;
      }
    }
    center = arg;
    for (auto& h : half) h *= 0.7;
  }

  const InnerResult r = inner_maximize(u, m, tight());
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(best).epsilon(1e-6));
  CHECK(r.point.t == doctest::Approx(center[0]).epsilon(1e-4));
}

TEST_CASE("inner maximization properties") {
  const ProblemModel m = bumpy_model();
  std::mt19937_64 rng(33);
  const SpinorField u = plus_field(m, rng, 2.0);
  InnerOptions opts = tight();
  opts.starts = 3;
  const InnerResult r = inner_maximize(u, m, opts);
  REQUIRE(r.converged);
  CHECK(r.unique);
  CHECK(r.start_spread <= 1e-6);
  CHECK(std::abs(r.dt) <= 1e-9 * r.scale);
  CHECK(r.residual.r_minus <= 1e-9 * r.scale);
  CHECK(r.point.t > 0.0);

  // the maximizer dominates other fiber points
  const SpinorField up = project_plus(m.space(), u);
  for (int i = 0; i < 20; ++i) {
    std::uniform_real_distribution<double> td(0.0, 3.0 * r.point.t);
    const SpinorField z = project_minus(m.space(), smooth_field(m.space(), rng, 1.0, 2.0));
    SpinorField v = to_physical(r.point.v);
    v += z;
    CHECK(gamma(u, td(rng), v, m) < r.value);
  }

  // the maximizer is a Nehari point: projecting it again changes nothing
  const SpinorField w = to_physical(r.w_hat);
  const NehariResidual nr = nehari_residual(w, m);
  CHECK(std::abs(nr.r_self) <= 1e-8 * r.scale * r.scale);
  const InnerResult back = inner_maximize(w, m, tight());
  CHECK(back.point.t == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(back.value == doctest::Approx(r.value).epsilon(1e-12));

  // warm start from the answer converges at once
  InnerOptions single = tight();
  single.starts = 1;
  const InnerResult warm = inner_maximize(u, m, single, &r.point);
  CHECK(warm.iterations <= 3);
}

TEST_CASE("inner maximization failure modes") {
  const ProblemModel m = bumpy_model();
  std::mt19937_64 rng(34);
  const SpinorField u = plus_field(m, rng, 2.0);
  CHECK_THROWS_AS(inner_maximize(project_minus(m.space(), u), m, InnerOptions{}), DegenerateFiber);
  InnerOptions one;
  one.max_iterations = 1;
  SpinorField mixed = u;
  mixed += project_minus(m.space(), smooth_field(m.space(), rng, 1.0, 5.0));
  try {
    inner_maximize(mixed, m, one);
    FAIL("expected InnerMaxIterations");
  } catch (const InnerMaxIterations& e) {
    CHECK_FALSE(e.best().converged);
    CHECK_FALSE(e.best().w_hat.empty());
  }
  InnerOptions none;
  none.starts = 0;
  CHECK_THROWS_AS(inner_maximize(u, m, none), std::invalid_argument);
}

TEST_CASE("mountain pass floor on the E+ sphere") {
  const ProblemModel m = bumpy_model();
  const double S = estimate_embedding_constant(m.space(), 2.5, 0);
  std::mt19937_64 rng(35);
  for (int i = 0; i < 10; ++i) {
    const SpinorField x = project_plus(m.space(), smooth_field(m.space(), rng, 0.3 * i));
    CHECK(lq_norm(x, 2.5) <= S * graph_norm(m.space(), x) * (1 + 1e-12));
  }
  const MountainPass mp = mountain_pass_constants(m, S, 2.5);
  CHECK(mp.rho > 0.0);
  CHECK(mp.alpha > 0.0);
  CHECK(mp.alpha == doctest::Approx(mp.rho * mp.rho * 0.5 / 10.0).epsilon(1e-12));  // rho^2 (p - 2) / (4 p)
  for (int i = 0; i < 10; ++i) {
    SpinorField x = project_plus(m.space(), smooth_field(m.space(), rng, 0.2 * i));
    x *= Complex(mp.rho / graph_norm(m.space(), x));
    CHECK(energy(x, m).total >= mp.alpha);
  }
  CHECK_THROWS_AS(mountain_pass_constants(m, S, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(mountain_pass_constants(m, 0.0, 2.5), std::invalid_argument);
}

TEST_CASE("reduced gradient matches differences of m along the sphere") {
  const ProblemModel m = bumpy_model();
  std::mt19937_64 rng(36);
  SpinorField w = to_frequency(project_plus(m.space(), plus_field(m, rng, 1.0)));
  w *= Complex(1.0 / graph_norm(m.space(), w));
  SpinorField xi = to_frequency(project_plus(m.space(), smooth_field(m.space(), rng, 1.0)));
  xi.axpy(-graph_inner(m.space(), xi, w), w);
  xi *= Complex(1.0 / graph_norm(m.space(), xi));

  const ReducedValue base = reduced_value(w, m, tight());
  const SpinorField grad = reduced_gradient(w, base.inner, m);
  CHECK(std::abs(graph_inner(m.space(), grad, w)) <= 1e-10 * graph_norm(m.space(), grad));
  const SpinorField grad2 = reduced_gradient(w, base.inner.point, m);
  CHECK((grad2 - grad).coefficient_norm() <= 1e-8 * grad.coefficient_norm());

  auto m_at = [&](double eps) {
    SpinorField x = w;
    x.axpy(eps, xi);
    x *= Complex(1.0 / graph_norm(m.space(), x));
    return reduced_value(x, m, tight(), &base.inner.point).m;
  };
  const double h = 1e-4;
  const double fd = (m_at(h) - m_at(-h)) / (2.0 * h);
  const double an = graph_inner(m.space(), grad, xi);
  CHECK(fd == doctest::Approx(an).epsilon(1e-5 * std::max(1.0, graph_norm(m.space(), grad) / std::abs(an))));

  SpinorField bad = w;
  bad *= Complex(2.0);
  CHECK_THROWS_AS(reduced_value(bad, m, tight()), std::invalid_argument);
  SpinorField mixed = w;
  mixed += to_frequency(project_minus(m.space(), smooth_field(m.space(), rng, 1.0, 0.1)));
  mixed *= Complex(1.0 / graph_norm(m.space(), mixed));
  CHECK_THROWS_AS(reduced_value(mixed, m, tight()), std::invalid_argument);
}
