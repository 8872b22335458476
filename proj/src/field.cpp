#include "ndirac/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace ndirac {

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(int n, double half_length) : n_(n), half_length_(half_length) {
  if (n < 8 || n % 2 != 0) throw std::invalid_argument("Grid: n must be even and >= 8");
  if (!(half_length > 0.0)) throw std::invalid_argument("Grid: half length must be positive");
}

double Grid::frequency(int i) const {
  return std::numbers::pi * mode_number(i) / half_length_;
}

std::array<int, 3> Grid::unflat(std::size_t idx) const {
  const auto n = static_cast<std::size_t>(n_);
  return {static_cast<int>(idx % n), static_cast<int>((idx / n) % n), static_cast<int>(idx / (n * n))};
}

Vec3 Grid::position(std::size_t idx) const {
  const auto [ix, iy, iz] = unflat(idx);
  return {coordinate(ix), coordinate(iy), coordinate(iz)};
}

Vec3 Grid::wavevector(std::size_t idx) const {
  const auto [ix, iy, iz] = unflat(idx);
  return {frequency(ix), frequency(iy), frequency(iz)};
}

double Grid::radius(std::size_t idx) const {
  const Vec3 x = position(idx);
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

// ---------------------------------------------------------------------------
// SpinorField

SpinorField::SpinorField(Grid grid, Repr repr)
    : grid_(grid), repr_(repr), data_(4 * grid.points(), Complex{}) {}

SpinorField::SpinorField(Grid grid, Repr repr, std::vector<Complex> data)
    : grid_(grid), repr_(repr), data_(std::move(data)) {
  if (data_.size() != 4 * grid_.points())
    throw std::invalid_argument("SpinorField: data size does not match grid");
}

Spinor SpinorField::spinor(std::size_t idx) const {
  Spinor s;
  for (int c = 0; c < 4; ++c) s[c] = (*this)(c, idx);
  return s;
}

void SpinorField::set_spinor(std::size_t idx, const Spinor& s) {
  for (int c = 0; c < 4; ++c) (*this)(c, idx) = s[c];
}

void SpinorField::require_compatible(const SpinorField& o) const {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("SpinorField: grid mismatch");
  if (repr_ != o.repr_) throw std::invalid_argument("SpinorField: representation mismatch");
}

SpinorField& SpinorField::operator+=(const SpinorField& o) {
  require_compatible(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpinorField& SpinorField::operator-=(const SpinorField& o) {
  require_compatible(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SpinorField& SpinorField::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

SpinorField& SpinorField::axpy(Complex s, const SpinorField& o) {
  require_compatible(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
  return *this;
}

double SpinorField::coefficient_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// DFT

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans are created once per grid size and never destroyed; fftw_execute_dft
// on an existing plan is thread safe, planning is not.
const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int dims[3] = {n, n, n};
  const int dist = n * n * n;
  std::vector<Complex> scratch(4 * static_cast<std::size_t>(dist));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_many_dft(3, dims, 4, buf, nullptr, 1, dist, buf, nullptr, 1, dist,
                                 FFTW_FORWARD, flags);
  p.backward = fftw_plan_many_dft(3, dims, 4, buf, nullptr, 1, dist, buf, nullptr, 1, dist,
                                  FFTW_BACKWARD, flags);
  if (!p.forward || !p.backward) throw std::runtime_error("fftw planning failed");
  return cache.emplace(n, p).first->second;
}

void transform(SpinorField& f, bool forward) {
  const Grid& g = f.grid();
  const PlanPair& p = plans_for(g.n());
  auto* buf = reinterpret_cast<fftw_complex*>(f.data().data());
  fftw_execute_dft(forward ? p.forward : p.backward, buf, buf);
  const double n3 = static_cast<double>(g.points());
  const double unitary = std::sqrt(g.cell_volume() / n3);
  const double scale = forward ? unitary : 1.0 / (unitary * n3);
  for (auto& z : f.data()) z *= scale;
}

}  // namespace

SpinorField dft_forward(const SpinorField& u) {
  if (u.repr() != Repr::physical) throw std::invalid_argument("dft_forward: expects a physical field");
  SpinorField out(u.grid(), Repr::frequency, std::vector<Complex>(u.data().begin(), u.data().end()));
  transform(out, true);
  return out;
}

SpinorField dft_inverse(const SpinorField& u_hat) {
  if (u_hat.repr() != Repr::frequency) throw std::invalid_argument("dft_inverse: expects a frequency field");
  SpinorField out(u_hat.grid(), Repr::physical, std::vector<Complex>(u_hat.data().begin(), u_hat.data().end()));
  transform(out, false);
  return out;
}

SpinorField to_physical(const SpinorField& u) {
  return u.repr() == Repr::physical ? u : dft_inverse(u);
}

SpinorField to_frequency(const SpinorField& u) {
  return u.repr() == Repr::frequency ? u : dft_forward(u);
}

// ---------------------------------------------------------------------------
// SpectralSpace

SpectralSpace::SpectralSpace(Grid grid, double a) : grid_(grid), a_(a) {
  if (!(a > 0.0)) throw std::invalid_argument("SpectralSpace: mass a must be positive");
  k_.resize(grid_.points());
  lambda_.resize(grid_.points());
  for (std::size_t m = 0; m < lambda_.size(); ++m) {
    k_[m] = grid_.wavevector(m);
    lambda_[m] = dirac_lambda(k_[m], a_);
  }
}

double SpectralSpace::max_lambda() const {
  return *std::max_element(lambda_.begin(), lambda_.end());
}

namespace {

// D(k) acting on (u0..u3): beta = diag(1,1,-1,-1), alpha.k = [[0, s],[s, 0]]
// with s = sigma.k = [[k3, k1 - i k2], [k1 + i k2, -k3]].
inline void symbol_times(const Vec3& k, double a, const Complex in[4], Complex out[4]) {
  const Complex kp(k[0], k[1]);  // k1 + i k2
  const Complex km(k[0], -k[1]);
  const double k3 = k[2];
  out[0] = a * in[0] + k3 * in[2] + km * in[3];
  out[1] = a * in[1] + kp * in[2] - k3 * in[3];
  out[2] = k3 * in[0] + km * in[1] - a * in[2];
  out[3] = kp * in[0] - k3 * in[1] - a * in[3];
}

}  // namespace

void SpectralSpace::apply_symbol(std::span<Complex> coeffs) const {
  const std::size_t n3 = grid_.points();
  if (coeffs.size() != 4 * n3) throw std::invalid_argument("apply_symbol: size mismatch");
  for (std::size_t m = 0; m < n3; ++m) {
    const Complex in[4] = {coeffs[m], coeffs[n3 + m], coeffs[2 * n3 + m], coeffs[3 * n3 + m]};
    Complex out[4];
    symbol_times(k_[m], a_, in, out);
    for (int c = 0; c < 4; ++c) coeffs[c * n3 + m] = out[c];
  }
}

void SpectralSpace::apply_projector(std::span<Complex> coeffs, int sign) const {
  const std::size_t n3 = grid_.points();
  if (coeffs.size() != 4 * n3) throw std::invalid_argument("apply_projector: size mismatch");
  const double s = sign > 0 ? 1.0 : -1.0;
  for (std::size_t m = 0; m < n3; ++m) {
    const Complex in[4] = {coeffs[m], coeffs[n3 + m], coeffs[2 * n3 + m], coeffs[3 * n3 + m]};
    Complex out[4];
    symbol_times(k_[m], a_, in, out);
    const double w = s / lambda_[m];
    for (int c = 0; c < 4; ++c) coeffs[c * n3 + m] = 0.5 * (in[c] + w * out[c]);
  }
}

namespace {

void require_space(const SpectralSpace& space, const SpinorField& u) {
  if (!(space.grid() == u.grid())) throw std::invalid_argument("field grid does not match spectral space");
}

SpinorField projected(const SpectralSpace& space, const SpinorField& u, int sign) {
  require_space(space, u);
  SpinorField f = to_frequency(u);
  space.apply_projector(f.data(), sign);
  return u.repr() == Repr::physical ? dft_inverse(f) : f;
}

}  // namespace

std::pair<SpinorField, SpinorField> project_pm(const SpectralSpace& space, const SpinorField& u) {
  require_space(space, u);
  SpinorField plus = to_frequency(u);
  SpinorField minus = plus;
  space.apply_projector(plus.data(), +1);
  minus -= plus;
  if (u.repr() == Repr::physical) return {dft_inverse(plus), dft_inverse(minus)};
  return {std::move(plus), std::move(minus)};
}

SpinorField project_plus(const SpectralSpace& space, const SpinorField& u) { return projected(space, u, +1); }
SpinorField project_minus(const SpectralSpace& space, const SpinorField& u) { return projected(space, u, -1); }

double graph_inner(const SpectralSpace& space, const SpinorField& u, const SpinorField& v) {
  require_space(space, u);
  require_space(space, v);
  const SpinorField uh = to_frequency(u);
  const SpinorField vh = to_frequency(v);
  const std::size_t n3 = uh.points();
  double s = 0.0;
  for (std::size_t m = 0; m < n3; ++m) {
    double local = 0.0;
    for (int c = 0; c < 4; ++c) local += std::real(uh(c, m) * std::conj(vh(c, m)));
    s += space.lambda(m) * local;
  }
  return s;
}

double graph_norm(const SpectralSpace& space, const SpinorField& u) {
  return std::sqrt(std::max(0.0, graph_inner(space, u, u)));
}

double graph_dual_norm(const SpectralSpace& space, const SpinorField& r) {
  require_space(space, r);
  const SpinorField rh = to_frequency(r);
  const std::size_t n3 = rh.points();
  double s = 0.0;
  for (std::size_t m = 0; m < n3; ++m) {
    double local = 0.0;
    for (int c = 0; c < 4; ++c) local += std::norm(rh(c, m));
    s += local / space.lambda(m);
  }
  return std::sqrt(s);
}

double l2_inner(const SpinorField& u, const SpinorField& v) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("l2_inner: grid mismatch");
  if (u.repr() != v.repr()) {
    return u.repr() == Repr::frequency ? l2_inner(u, to_frequency(v)) : l2_inner(to_frequency(u), v);
  }
  double s = 0.0;
  const auto a = u.data();
  const auto b = v.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::real(a[i] * std::conj(b[i]));
  return u.repr() == Repr::physical ? s * u.grid().cell_volume() : s;
}

double l2_norm(const SpinorField& u) { return std::sqrt(std::max(0.0, l2_inner(u, u))); }

double lq_norm(const SpinorField& u, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be >= 1");
  if (u.repr() != Repr::physical) throw std::invalid_argument("lq_norm: expects a physical field");
  double s = 0.0;
  for (double m : pointwise_modulus(u)) s += std::pow(m, q);
  return std::pow(s * u.grid().cell_volume(), 1.0 / q);
}

SpinorField apply_dirac(const SpectralSpace& space, const SpinorField& u) {
  require_space(space, u);
  SpinorField f = to_frequency(u);
  space.apply_symbol(f.data());
  return u.repr() == Repr::physical ? dft_inverse(f) : f;
}

std::vector<double> pointwise_modulus(const SpinorField& u) {
  if (u.repr() != Repr::physical) throw std::invalid_argument("pointwise_modulus: expects a physical field");
  const std::size_t n3 = u.points();
  std::vector<double> out(n3);
  for (std::size_t i = 0; i < n3; ++i) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) s += std::norm(u(c, i));
    out[i] = std::sqrt(s);
  }
  return out;
}

SpinorField spectral_interpolate(const SpinorField& u, const Grid& fine) {
  const Grid& coarse = u.grid();
  if (fine.half_length() != coarse.half_length())
    throw std::invalid_argument("spectral_interpolate: box size differs");
  if (fine.n() <= coarse.n()) throw std::invalid_argument("spectral_interpolate: grid is not strictly finer");
  const SpinorField uh = to_frequency(u);
  SpinorField out(fine, Repr::frequency);
  const int nf = fine.n();
  auto wrap = [nf](int m) { return m < 0 ? m + nf : m; };
  for (std::size_t idx = 0; idx < coarse.points(); ++idx) {
    const auto [ix, iy, iz] = coarse.unflat(idx);
    const std::size_t j = fine.flat(wrap(coarse.mode_number(ix)), wrap(coarse.mode_number(iy)),
                                    wrap(coarse.mode_number(iz)));
    for (int c = 0; c < 4; ++c) out(c, j) = uh(c, idx);
  }
  return u.repr() == Repr::physical ? dft_inverse(out) : out;
}

unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NDIRAC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

}  // namespace ndirac
