#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace ndirac {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix<Complex, 2, 2, Eigen::RowMajor>;
using Mat4 = Eigen::Matrix<Complex, 4, 4, Eigen::RowMajor>;
using Spinor = Eigen::Matrix<Complex, 4, 1>;
using Vec3 = std::array<double, 3>;

/// Pauli matrix sigma_j, j in {1, 2, 3}. Throws std::out_of_range otherwise.
Mat2 pauli(int j);

struct DiracMatrices {
  std::array<Mat4, 3> alpha;
  Mat4 beta;
};

/// Standard (Dirac) representation: beta = diag(I2, -I2), alpha_k carries
/// sigma_k on its off-diagonal blocks.
const DiracMatrices& dirac_matrices();

/// Fourier symbol of -i alpha . grad + a beta at angular frequency k,
/// i.e. sum_j k_j alpha_j + a beta. Requires a > 0.
Mat4 dirac_symbol(const Vec3& k, double a);

/// Spectral data of the free Dirac symbol at a single frequency.
///
/// The symbol squares to lambda^2 I, so the projectors onto its positive and
/// negative eigenspaces have the closed form (I +- D(k)/lambda) / 2. Each
/// eigenspace is two dimensional.
struct DiracModeSystem {
  Vec3 k{};
  double lambda = 0.0;
  Mat4 p_plus;
  Mat4 p_minus;
};

DiracModeSystem mode_system(const Vec3& k, double a);

/// sqrt(a^2 + |k|^2)
inline double dirac_lambda(const Vec3& k, double a) {
  return std::sqrt(a * a + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

}  // namespace ndirac
