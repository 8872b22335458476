#include "doctest.h"

#include "ndirac/algebra.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace ndirac;

namespace {

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

// Projector onto the eigenvectors of a Hermitian matrix with eigenvalues of the given sign.
Mat4 eigen_projector(const Mat4& h, int sign) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
  Mat4 p = Mat4::Zero();
  for (int i = 0; i < 4; ++i) {
    if ((es.eigenvalues()[i] > 0) == (sign > 0)) {
      const Eigen::Vector4cd v = es.eigenvectors().col(i);
      p += v * v.adjoint();
    }
  }
  return p;
}

}  // namespace

TEST_CASE("pauli matrices") {
  const Complex i(0, 1);
  const Mat2 id = Mat2::Identity();
  for (int j = 1; j <= 3; ++j) CHECK((pauli(j) * pauli(j) - id).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pauli(1) * pauli(2) - i * pauli(3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(pauli(0), std::out_of_range);
  CHECK_THROWS_AS(pauli(4), std::out_of_range);
}

TEST_CASE("dirac matrices are hermitian and anticommute") {
  const auto& d = dirac_matrices();
  const Mat4 id = Mat4::Identity();
  CHECK(max_abs(d.beta - d.beta.adjoint()) == 0.0);
  CHECK(max_abs(d.beta * d.beta - id) == 0.0);
  for (int j = 0; j < 3; ++j) {
    CHECK(max_abs(d.alpha[j] - d.alpha[j].adjoint()) == 0.0);
    CHECK(max_abs(d.alpha[j] * d.beta + d.beta * d.alpha[j]) <= 1e-15);
    for (int k = 0; k < 3; ++k) {
      const Mat4 anti = d.alpha[j] * d.alpha[k] + d.alpha[k] * d.alpha[j];
      CHECK(max_abs(anti - (j == k ? 2.0 : 0.0) * id) <= 1e-15);
    }
  }
}

TEST_CASE("symbol at k = 0 is a beta") {
  const Mat4 s = dirac_symbol({0, 0, 0}, 1.5);
  CHECK(max_abs(s - 1.5 * dirac_matrices().beta) == 0.0);
  const DiracModeSystem m = mode_system({0, 0, 0}, 1.5);
  CHECK(m.lambda == 1.5);
  Mat4 upper = Mat4::Zero();
  upper(0, 0) = upper(1, 1) = 1.0;
  CHECK(max_abs(m.p_plus - upper) <= 1e-15);
}

TEST_CASE("symbol and projectors agree with a dense eigensolver") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  std::uniform_real_distribution<double> ad(0.1, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 k{u(rng), u(rng), u(rng)};
    const double a = ad(rng);
    const Mat4 s = dirac_symbol(k, a);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(s);
    const double lam = std::sqrt(a * a + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-lam).epsilon(1e-13));
    CHECK(es.eigenvalues()[1] == doctest::Approx(-lam).epsilon(1e-13));
    CHECK(es.eigenvalues()[2] == doctest::Approx(lam).epsilon(1e-13));
    CHECK(es.eigenvalues()[3] == doctest::Approx(lam).epsilon(1e-13));

    const DiracModeSystem m = mode_system(k, a);
    CHECK(m.lambda == doctest::Approx(lam).epsilon(1e-15));
    CHECK(max_abs(m.p_plus - eigen_projector(s, +1)) <= 1e-12);
    CHECK(max_abs(m.p_minus - eigen_projector(s, -1)) <= 1e-12);
    CHECK(max_abs(s * s - lam * lam * Mat4::Identity()) <= 1e-12 * lam * lam);
  }
}

TEST_CASE("symbol rejects non-positive mass") {
  CHECK_THROWS_AS(dirac_symbol({1, 0, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mode_system({1, 0, 0}, -1.0), std::invalid_argument);
}
