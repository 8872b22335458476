#pragma once

#include "ndirac/algebra.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace ndirac {

/// Uniform periodic grid on the box [-L, L)^3 with n points per axis.
///
/// Point (ix, iy, iz) sits at x = -L + i * dx with dx = 2L/n and has flat
/// index ix + n * (iy + n * iz). FFT index i carries the integer frequency
/// m = i for i < n/2 and m = i - n otherwise, i.e. m in [-n/2, n/2), and the
/// angular frequency k = pi * m / L.
class Grid {
 public:
  Grid(int n, double half_length);

  int n() const { return n_; }
  double half_length() const { return half_length_; }
  double dx() const { return 2.0 * half_length_ / n_; }
  double cell_volume() const { const double h = dx(); return h * h * h; }
  double volume() const { const double l = 2.0 * half_length_; return l * l * l; }
  std::size_t points() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  int mode_number(int i) const { return i < n_ / 2 ? i : i - n_; }
  double frequency(int i) const;
  double coordinate(int i) const { return -half_length_ + i * dx(); }

  std::size_t flat(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) + static_cast<std::size_t>(n_) * (iy + static_cast<std::size_t>(n_) * iz);
  }
  std::array<int, 3> unflat(std::size_t idx) const;
  Vec3 position(std::size_t idx) const;
  Vec3 wavevector(std::size_t idx) const;
  double radius(std::size_t idx) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.half_length_ == b.half_length_;
  }

 private:
  int n_;
  double half_length_;
};

enum class Repr : unsigned char { physical = 0, frequency = 1 };

/// Four-component complex field on a Grid.
///
/// Storage is component-major: the n^3 values of component c occupy
/// [c * n^3, (c + 1) * n^3), each block laid out in Grid::flat order. In the
/// frequency representation the block holds the unitary coefficients
///   u_hat(k) = (dx^3 / n^3)^(1/2) * sum_x u(x) exp(-i k . (x + L)),
/// so that sum_x |u(x)|^2 dx^3 == sum_k |u_hat(k)|^2.
class SpinorField {
 public:
  /// Empty placeholder (no storage); assign a real field before use.
  SpinorField() : grid_(8, 1.0), repr_(Repr::physical) {}
  SpinorField(Grid grid, Repr repr);
  SpinorField(Grid grid, Repr repr, std::vector<Complex> data);

  static SpinorField zeros(const Grid& grid, Repr repr = Repr::physical) {
    return SpinorField(grid, repr);
  }

  const Grid& grid() const { return grid_; }
  Repr repr() const { return repr_; }
  std::size_t points() const { return grid_.points(); }
  bool empty() const { return data_.empty(); }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }
  std::span<Complex> component(int c) { return {data_.data() + c * points(), points()}; }
  std::span<const Complex> component(int c) const { return {data_.data() + c * points(), points()}; }

  Complex& operator()(int c, std::size_t idx) { return data_[c * points() + idx]; }
  Complex operator()(int c, std::size_t idx) const { return data_[c * points() + idx]; }

  Spinor spinor(std::size_t idx) const;
  void set_spinor(std::size_t idx, const Spinor& s);

  SpinorField& operator+=(const SpinorField& o);
  SpinorField& operator-=(const SpinorField& o);
  SpinorField& operator*=(Complex s);
  /// this += s * o
  SpinorField& axpy(Complex s, const SpinorField& o);

  friend SpinorField operator+(SpinorField a, const SpinorField& b) { return a += b; }
  friend SpinorField operator-(SpinorField a, const SpinorField& b) { return a -= b; }
  friend SpinorField operator*(Complex s, SpinorField a) { return a *= s; }
  friend SpinorField operator*(double s, SpinorField a) { return a *= Complex(s); }

  /// Plain Euclidean norm of the stored coefficients (no quadrature weight).
  double coefficient_norm() const;

 private:
  void require_compatible(const SpinorField& o) const;

  Grid grid_;
  Repr repr_;
  std::vector<Complex> data_;
};

SpinorField dft_forward(const SpinorField& u);
SpinorField dft_inverse(const SpinorField& u_hat);
SpinorField to_physical(const SpinorField& u);
SpinorField to_frequency(const SpinorField& u);

/// Grid plus Dirac mass: everything needed for the per-mode spectral
/// calculus (lambda(k) table, projectors, D_c, graph inner product).
class SpectralSpace {
 public:
  SpectralSpace(Grid grid, double a);

  const Grid& grid() const { return grid_; }
  double mass() const { return a_; }
  std::span<const double> lambdas() const { return lambda_; }
  const Vec3& wavevector(std::size_t mode) const { return k_[mode]; }
  double lambda(std::size_t mode) const { return lambda_[mode]; }
  double max_lambda() const;

  /// In place on frequency coefficients: u_hat(k) <- D(k) u_hat(k).
  void apply_symbol(std::span<Complex> coeffs) const;
  /// In place on frequency coefficients: u_hat(k) <- P_sign(k) u_hat(k),
  /// sign = +1 or -1.
  void apply_projector(std::span<Complex> coeffs, int sign) const;

 private:
  Grid grid_;
  double a_;
  std::vector<Vec3> k_;
  std::vector<double> lambda_;
};

std::pair<SpinorField, SpinorField> project_pm(const SpectralSpace& space, const SpinorField& u);
SpinorField project_plus(const SpectralSpace& space, const SpinorField& u);
SpinorField project_minus(const SpectralSpace& space, const SpinorField& u);

/// <u, v> = Re < |D|^(1/2) u, |D|^(1/2) v >_{L^2} = sum_k lambda(k) Re u_hat(k) . v_hat(k).
double graph_inner(const SpectralSpace& space, const SpinorField& u, const SpinorField& v);
double graph_norm(const SpectralSpace& space, const SpinorField& u);
/// Norm of a linear functional given by its L^2 representative r, in the
/// dual of the graph norm: (sum_k |r_hat(k)|^2 / lambda(k))^(1/2).
double graph_dual_norm(const SpectralSpace& space, const SpinorField& r);

/// Re <u, v>_{L^2}; either representation (Parseval).
double l2_inner(const SpinorField& u, const SpinorField& v);
double l2_norm(const SpinorField& u);
/// (sum_x |u(x)|^q dx^3)^(1/q); physical representation only.
double lq_norm(const SpinorField& u, double q);

SpinorField apply_dirac(const SpectralSpace& space, const SpinorField& u);

/// Pointwise C^4 modulus |u(x)| of a physical field.
std::vector<double> pointwise_modulus(const SpinorField& u);

/// Zero-pad the frequency content of u onto a finer grid with the same box.
SpinorField spectral_interpolate(const SpinorField& u, const Grid& fine);

/// Number of worker threads allowed, read from NDIRAC_THREADS (default:
/// hardware concurrency, at least 1).
unsigned thread_budget();

}  // namespace ndirac
