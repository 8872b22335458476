#include "ndirac/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace ndirac {

namespace {

void require_model(const SpinorField& u, const ProblemModel& model) {
  if (!(u.grid() == model.grid())) throw std::invalid_argument("field grid does not match model grid");
}

// sum_k lambda |P+ u_hat|^2 and sum_k lambda |P- u_hat|^2
std::pair<double, double> split_graph_norms(const SpectralSpace& space, const SpinorField& uh) {
  SpinorField plus = uh;
  space.apply_projector(plus.data(), +1);
  const std::size_t n3 = uh.points();
  double np = 0.0, nm = 0.0;
  for (std::size_t m = 0; m < n3; ++m) {
    double sp = 0.0, sm = 0.0;
    for (int c = 0; c < 4; ++c) {
      const Complex p = plus(c, m);
      sp += std::norm(p);
      sm += std::norm(uh(c, m) - p);
    }
    np += space.lambda(m) * sp;
    nm += space.lambda(m) * sm;
  }
  return {np, nm};
}

}  // namespace

EnergyBreakdown energy(const SpinorField& u, const ProblemModel& model) {
  require_model(u, model);
  const SpinorField uh = to_frequency(u);
  const SpinorField ux = to_physical(u);
  const auto [np, nm] = split_graph_norms(model.space(), uh);

  const auto& V = model.V();
  const auto& K = model.K();
  const auto& nl = model.nonlinearity();
  const std::vector<double> mod = pointwise_modulus(ux);
  double pot = 0.0, nonlin = 0.0;
  for (std::size_t i = 0; i < mod.size(); ++i) {
    pot += V[i] * mod[i] * mod[i];
    nonlin += K[i] * nl.F_unchecked(mod[i]);
  }
  const double dv = model.grid().cell_volume();

  EnergyBreakdown e;
  e.quad_plus = 0.5 * np;
  e.quad_minus = 0.5 * nm;
  e.pot = 0.5 * pot * dv;
  e.nonlin = nonlin * dv;
  e.total = e.recombined();
  return e;
}

SpinorField local_residual(const SpinorField& u_phys, const ProblemModel& model) {
  if (u_phys.repr() != Repr::physical) throw std::invalid_argument("local_residual: expects a physical field");
  require_model(u_phys, model);
  const auto& V = model.V();
  const auto& K = model.K();
  const auto& nl = model.nonlinearity();
  const std::vector<double> mod = pointwise_modulus(u_phys);
  SpinorField out(u_phys.grid(), Repr::physical);
  for (std::size_t i = 0; i < mod.size(); ++i) {
    const double w = V[i] - K[i] * nl.f_unchecked(mod[i]);
    for (int c = 0; c < 4; ++c) out(c, i) = w * u_phys(c, i);
  }
  return out;
}

SpinorField residual_l2(const SpinorField& u, const ProblemModel& model) {
  require_model(u, model);
  SpinorField r = dft_forward(local_residual(to_physical(u), model));
  SpinorField du = to_frequency(u);
  model.space().apply_symbol(du.data());
  r += du;
  return u.repr() == Repr::physical ? dft_inverse(r) : r;
}

double derivative_along(const SpinorField& u, const SpinorField& v, const ProblemModel& model) {
  require_model(v, model);
  return l2_inner(residual_l2(u, model), v);
}

double nehari_excess(const SpinorField& u, const ProblemModel& model) {
  return energy(u, model).total - 0.5 * derivative_along(u, u, model);
}

double nehari_identity_gap(const SpinorField& u, const ProblemModel& model) {
  const SpinorField ux = to_physical(u);
  const auto& K = model.K();
  const auto& nl = model.nonlinearity();
  const std::vector<double> mod = pointwise_modulus(ux);
  double s = 0.0;
  for (std::size_t i = 0; i < mod.size(); ++i)
    s += K[i] * (0.5 * nl.f_unchecked(mod[i]) * mod[i] * mod[i] - nl.F_unchecked(mod[i]));
  s *= model.grid().cell_volume();
  return nehari_excess(u, model) - s;
}

}  // namespace ndirac
