#include "doctest.h"

#include "test_util.hpp"

#include <cmath>

using namespace ndirac;
using testutil::smooth_field;

TEST_CASE("grid validation and frequency ordering") {
  CHECK_THROWS_AS(Grid(7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(8, 0.0), std::invalid_argument);
  const Grid g(8, 2.0);
  CHECK(g.dx() == 0.5);
  CHECK(g.mode_number(0) == 0);
  CHECK(g.mode_number(3) == 3);
  CHECK(g.mode_number(4) == -4);
  CHECK(g.mode_number(7) == -1);
  CHECK(g.frequency(1) == doctest::Approx(M_PI / 2.0));
  CHECK(g.coordinate(0) == -2.0);
  CHECK(g.coordinate(4) == 0.0);
  const auto idx = g.unflat(g.flat(1, 2, 3));
  CHECK(idx[0] == 1);
  CHECK(idx[1] == 2);
  CHECK(idx[2] == 3);
}

TEST_CASE("plane wave lands on a single coefficient") {
  const Grid g(8, 3.0);
  const int mx = 2, my = -1, mz = 3;
  const Vec3 k{M_PI * mx / 3.0, M_PI * my / 3.0, M_PI * mz / 3.0};
  SpinorField u(g, Repr::physical);
  for (std::size_t i = 0; i < g.points(); ++i) {
    const Vec3 x = g.position(i);
    u(1, i) = std::exp(Complex(0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
  }
  const SpinorField h = dft_forward(u);
  const std::size_t target = g.flat(mx, my + 8, mz);
  CHECK(std::abs(h(1, target)) == doctest::Approx(std::sqrt(g.volume())).epsilon(1e-12));
  double rest = 0.0;
  for (std::size_t m = 0; m < g.points(); ++m)
    for (int c = 0; c < 4; ++c)
      if (!(c == 1 && m == target)) rest = std::max(rest, std::abs(h(c, m)));
  CHECK(rest < 1e-12);

  // D acts on a plane wave as the symbol
  const SpectralSpace space(g, 1.3);
  const SpinorField du = apply_dirac(space, u);
  Spinor e = Spinor::Zero();
  e[1] = 1.0;
  const Spinor expect_dir = dirac_symbol(k, 1.3) * e;
  double err = 0.0;
  for (std::size_t i = 0; i < g.points(); ++i)
    err = std::max(err, (du.spinor(i) - expect_dir * u(1, i)).cwiseAbs().maxCoeff());
  CHECK(err < 1e-12);
}

TEST_CASE("parseval and round trip") {
  const SpectralSpace space(Grid(12, 5.0), 1.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  SpinorField u(space.grid(), Repr::physical);
  for (auto& z : u.data()) z = Complex(nd(rng), nd(rng));
  const SpinorField h = dft_forward(u);
  double phys = 0.0, freq = 0.0;
  for (auto z : u.data()) phys += std::norm(z);
  for (auto z : h.data()) freq += std::norm(z);
  CHECK(phys * space.grid().cell_volume() == doctest::Approx(freq).epsilon(1e-12));
  const SpinorField back = dft_inverse(h);
  CHECK((back - u).coefficient_norm() <= 1e-12 * u.coefficient_norm());
  CHECK(l2_inner(u, h) == doctest::Approx(freq).epsilon(1e-12));
  CHECK_THROWS_AS(dft_forward(h), std::invalid_argument);
  CHECK_THROWS_AS(dft_inverse(u), std::invalid_argument);
}

TEST_CASE("projectors split E into orthogonal halves") {
  const SpectralSpace space(Grid(8, 4.0), 0.7);
  std::mt19937_64 rng(2);
  const SpinorField u = smooth_field(space, rng, 0.5);
  const auto [plus, minus] = project_pm(space, u);
  CHECK((plus + minus - u).coefficient_norm() <= 1e-13 * u.coefficient_norm());
  CHECK((project_plus(space, plus) - plus).coefficient_norm() <= 1e-13 * u.coefficient_norm());
  CHECK(project_minus(space, plus).coefficient_norm() <= 1e-13 * u.coefficient_norm());
  CHECK(std::abs(graph_inner(space, plus, minus)) <= 1e-12);
  CHECK(std::abs(l2_inner(plus, minus)) <= 1e-12);
  const double g2 = std::pow(graph_norm(space, u), 2);
  CHECK(std::pow(graph_norm(space, plus), 2) + std::pow(graph_norm(space, minus), 2) ==
        doctest::Approx(g2).epsilon(1e-12));
  // |D| is the graph metric: <Du, u+> - <Du, u-> = |u|^2
  const SpinorField du = apply_dirac(space, u);
  CHECK(l2_inner(du, plus) - l2_inner(du, minus) == doctest::Approx(g2).epsilon(1e-12));
}

TEST_CASE("spectral gap a |u|_2^2 <= |u|^2") {
  const SpectralSpace space(Grid(8, 4.0), 1.2);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const SpinorField u = smooth_field(space, rng, 0.3 * i);
    CHECK(1.2 * std::pow(l2_norm(u), 2) <= std::pow(graph_norm(space, u), 2) * (1 + 1e-14));
  }
  // equality for a constant field
  SpinorField c(space.grid(), Repr::physical);
  for (std::size_t i = 0; i < c.points(); ++i) c(0, i) = 1.0;
  CHECK(1.2 * std::pow(l2_norm(c), 2) == doctest::Approx(std::pow(graph_norm(space, c), 2)).epsilon(1e-12));
}

TEST_CASE("graph dual norm is the operator norm of the L2 pairing") {
  const SpectralSpace space(Grid(8, 4.0), 1.0);
  std::mt19937_64 rng(4);
  const SpinorField r = to_frequency(smooth_field(space, rng, 0.5));
  // maximizer of <r, v> / |v| is v = |D|^-1 r
  SpinorField v = r;
  for (std::size_t m = 0; m < v.points(); ++m)
    for (int c = 0; c < 4; ++c) v(c, m) /= space.lambda(m);
  const double dual = graph_dual_norm(space, r);
  CHECK(l2_inner(r, v) / graph_norm(space, v) == doctest::Approx(dual).epsilon(1e-12));
  const SpinorField other = to_frequency(smooth_field(space, rng, 0.5));
  CHECK(std::abs(l2_inner(r, other)) <= dual * graph_norm(space, other) * (1 + 1e-12));
}

TEST_CASE("lq norms") {
  const Grid g(8, 2.0);
  SpinorField u(g, Repr::physical);
  for (std::size_t i = 0; i < u.points(); ++i) u(2, i) = Complex(0.0, 3.0);
  CHECK(lq_norm(u, 3.0) == doctest::Approx(3.0 * std::cbrt(g.volume())).epsilon(1e-13));
  CHECK(lq_norm(u, 2.0) == doctest::Approx(l2_norm(u)).epsilon(1e-13));
  CHECK_THROWS_AS(lq_norm(to_frequency(u), 2.0), std::invalid_argument);
  const auto mod = pointwise_modulus(u);
  CHECK(mod[5] == doctest::Approx(3.0));
}

TEST_CASE("spectral interpolation keeps coarse samples and norms") {
  const SpectralSpace coarse(Grid(8, 4.0), 1.0);
  const SpectralSpace fine(Grid(12, 4.0), 1.0);
  std::mt19937_64 rng(5);
  const SpinorField u = smooth_field(coarse, rng, 0.2);
  const SpinorField f = spectral_interpolate(u, fine.grid());
  CHECK(f.repr() == Repr::physical);
  CHECK(l2_norm(f) == doctest::Approx(l2_norm(u)).epsilon(1e-12));
  CHECK(graph_norm(fine, f) == doctest::Approx(graph_norm(coarse, u)).epsilon(1e-12));
  // coarse point (i, j, k) sits at fine index (3i/2, ...) for even i
  double err = 0.0;
  for (int iz = 0; iz < 8; iz += 2)
    for (int iy = 0; iy < 8; iy += 2)
      for (int ix = 0; ix < 8; ix += 2) {
        const auto a = u.spinor(coarse.grid().flat(ix, iy, iz));
        const auto b = f.spinor(fine.grid().flat(3 * ix / 2, 3 * iy / 2, 3 * iz / 2));
        err = std::max(err, (a - b).cwiseAbs().maxCoeff());
      }
  CHECK(err < 1e-12);
  CHECK_THROWS_AS(spectral_interpolate(u, Grid(8, 4.0)), std::invalid_argument);
  CHECK_THROWS_AS(spectral_interpolate(u, Grid(12, 5.0)), std::invalid_argument);
}

TEST_CASE("field arithmetic checks compatibility") {
  SpinorField a(Grid(8, 1.0), Repr::physical);
  SpinorField b(Grid(8, 2.0), Repr::physical);
  SpinorField c(Grid(8, 1.0), Repr::frequency);
  CHECK_THROWS_AS(a += b, std::invalid_argument);
  CHECK_THROWS_AS(a += c, std::invalid_argument);
  CHECK_THROWS_AS(SpinorField(Grid(8, 1.0), Repr::physical, std::vector<Complex>(3)), std::invalid_argument);
  CHECK(SpinorField().empty());
  CHECK(thread_budget() >= 1);
}
