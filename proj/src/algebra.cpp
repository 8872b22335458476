#include "ndirac/algebra.hpp"

#include <stdexcept>
#include <string>

namespace ndirac {

namespace {

constexpr Complex I{0.0, 1.0};

DiracMatrices build_dirac_matrices() {
  DiracMatrices m;
  m.beta = Mat4::Zero();
  m.beta.diagonal() << 1.0, 1.0, -1.0, -1.0;
  for (int k = 0; k < 3; ++k) {
    Mat4 a = Mat4::Zero();
    const Mat2 s = pauli(k + 1);
    a.block<2, 2>(0, 2) = s;
    a.block<2, 2>(2, 0) = s;
    m.alpha[k] = a;
  }
  return m;
}

}  // namespace

Mat2 pauli(int j) {
  Mat2 s;
  switch (j) {
    case 1:
      s << 0.0, 1.0, 1.0, 0.0;
      break;
    case 2:
      s << 0.0, -I, I, 0.0;
      break;
    case 3:
      s << 1.0, 0.0, 0.0, -1.0;
      break;
    default:
      throw std::out_of_range("pauli: index must be 1, 2 or 3, got " +
                              std::to_string(j));
  }
  return s;
}

const DiracMatrices& dirac_matrices() {
  static const DiracMatrices m = build_dirac_matrices();
  return m;
}

Mat4 dirac_symbol(const Vec3& k, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("dirac_symbol: mass a must be positive");
  const auto& m = dirac_matrices();
  return k[0] * m.alpha[0] + k[1] * m.alpha[1] + k[2] * m.alpha[2] + a * m.beta;
}

DiracModeSystem mode_system(const Vec3& k, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("mode_system: mass a must be positive");
  DiracModeSystem s;
  s.k = k;
  s.lambda = dirac_lambda(k, a);
  const Mat4 d = dirac_symbol(k, a) / s.lambda;
  const Mat4 id = Mat4::Identity();
  s.p_plus = 0.5 * (id + d);
  s.p_minus = 0.5 * (id - d);
  return s;
}

}  // namespace ndirac
