#include "ndirac/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ndirac {

// ---------------------------------------------------------------------------
// Nonlinearity

Nonlinearity Nonlinearity::power(double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("Nonlinearity::power: exponent must be >= 2");
  Nonlinearity nl;
  nl.kind_ = Kind::power;
  nl.p_ = p;
  return nl;
}

Nonlinearity Nonlinearity::sampled(std::vector<double> nodes, std::vector<double> values, double growth_p) {
  if (nodes.size() < 2 || nodes.size() != values.size())
    throw std::invalid_argument("Nonlinearity::sampled: need >= 2 nodes with matching values");
  if (nodes.front() != 0.0) throw std::invalid_argument("Nonlinearity::sampled: first node must be 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("Nonlinearity::sampled: nodes must increase");
  Nonlinearity nl;
  nl.kind_ = Kind::sampled;
  nl.p_ = growth_p;
  nl.nodes_ = std::move(nodes);
  nl.values_ = std::move(values);
  nl.primitive_.assign(nl.nodes_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nl.nodes_.size(); ++i) {
    const double a = nl.nodes_[i], b = nl.nodes_[i + 1];
    const double slope = (nl.values_[i + 1] - nl.values_[i]) / (b - a);
    const double c0 = nl.values_[i] - slope * a;
    nl.primitive_[i + 1] = nl.primitive_[i] + c0 * (b * b - a * a) / 2.0 + slope * (b * b * b - a * a * a) / 3.0;
  }
  return nl;
}

double Nonlinearity::f(double s) const {
  if (!(s >= 0.0)) throw std::domain_error("Nonlinearity::f: negative argument");
  return f_unchecked(s);
}

double Nonlinearity::F(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("Nonlinearity::F: negative argument");
  return F_unchecked(t);
}

double Nonlinearity::f_unchecked(double s) const {
  if (kind_ == Kind::power) return std::pow(s, p_ - 2.0);
  if (s >= nodes_.back()) return values_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double w = (s - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

double Nonlinearity::F_unchecked(double t) const {
  if (kind_ == Kind::power) return std::pow(t, p_) / p_;
  if (t >= nodes_.back()) {
    const double b = nodes_.back();
    return primitive_.back() + values_.back() * (t * t - b * b) / 2.0;
  }
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double a = nodes_[i];
  const double slope = (values_[i + 1] - values_[i]) / (nodes_[i + 1] - a);
  const double c0 = values_[i] - slope * a;
  return primitive_[i] + c0 * (t * t - a * a) / 2.0 + slope * (t * t * t - a * a * a) / 3.0;
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::power) {
    os << "power(p=" << p_ << ")";
  } else {
    os << "sampled(" << nodes_.size() << " nodes, p=" << p_ << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Profiles and the model

std::vector<double> Profile::sample(const Grid& grid) const {
  const std::size_t n3 = grid.points();
  if (kind == Kind::table) {
    if (table.size() != n3) throw std::invalid_argument("Profile: table size does not match grid");
    return table;
  }
  std::vector<double> out(n3);
  for (std::size_t i = 0; i < n3; ++i) {
    const double r = grid.radius(i);
    switch (kind) {
      case Kind::constant: out[i] = scale; break;
      case Kind::rational_decay: out[i] = scale / std::pow(1.0 + r * r, gamma); break;
      case Kind::exponential: out[i] = scale * std::exp(-r / sigma); break;
      case Kind::table: break;
    }
  }
  return out;
}

std::string Profile::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::constant: os << "constant:" << scale; break;
    case Kind::rational_decay: os << "rational:" << scale << "," << gamma; break;
    case Kind::exponential: os << "exponential:" << scale << "," << sigma; break;
    case Kind::table: os << "table"; break;
  }
  return os.str();
}

ProblemModel::ProblemModel(Grid grid, double a, Profile v, Profile k, Nonlinearity nl)
    : space_(std::make_shared<const SpectralSpace>(grid, a)),
      v_profile_(std::move(v)),
      k_profile_(std::move(k)),
      nl_(std::move(nl)),
      v_(v_profile_.sample(grid)),
      k_(k_profile_.sample(grid)) {}

double ProblemModel::sup_V() const { return *std::max_element(v_.begin(), v_.end()); }
double ProblemModel::sup_K() const { return *std::max_element(k_.begin(), k_.end()); }

ProblemModel ProblemModel::on_grid(const Grid& grid) const {
  if (v_profile_.kind == Profile::Kind::table || k_profile_.kind == Profile::Kind::table)
    throw std::invalid_argument("ProblemModel::on_grid: tabulated potentials cannot be resampled");
  return ProblemModel(grid, mass(), v_profile_, k_profile_, nl_);
}

// ---------------------------------------------------------------------------
// Condition checkers

namespace {

// Log-log slope of a positive sampled function over [s/10, s].
double decade_slope(const std::function<double(double)>& g, double s) {
  const double hi = g(s), lo = g(s / 10.0);
  if (!(hi > 0.0) || !(lo > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log10(hi / lo);
}

}  // namespace

FConditionReport check_f_conditions(const Nonlinearity& nl, std::size_t sample_count) {
  if (sample_count < 100) throw std::invalid_argument("check_f_conditions: need at least 100 samples");
  constexpr double s_min = 1e-6, s_max = 1e3;
  std::vector<double> s(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i)
    s[i] = s_min * std::pow(s_max / s_min, static_cast<double>(i) / (sample_count - 1));

  FConditionReport rep;
  rep.samples = sample_count;
  auto f = [&](double x) { return nl.f(x); };
  auto F = [&](double x) { return nl.F(x); };

  // f1: f(s) -> 0 as s -> 0+, read off the smallest decade as a power law.
  {
    const double f0 = f(s_min);
    const double slope = decade_slope(f, 10.0 * s_min);
    rep.f1.name = "f1";
    rep.f1.witness = s_min;
    rep.f1.value = f0;
    rep.f1.pass = std::abs(f0) <= 1e-12 || (f0 > 0.0 && slope >= 1e-3);
    rep.f1.detail = "f(s_min) and log-log slope " + std::to_string(slope) + " on the smallest decade";
  }

  // f2: |f(s)s| <= c1 s + c2 s^(p-1); the sampled ratio must stay bounded.
  {
    const double p = nl.p();
    auto ratio = [&](double x) { return std::abs(f(x) * x) / (x + std::pow(x, p - 1.0)); };
    double worst = 0.0, at = s_min;
    for (double x : s) {
      const double r = ratio(x);
      if (!(r <= worst)) { worst = r; at = x; }
    }
    const double top = decade_slope(ratio, s_max);
    rep.f2.name = "f2";
    rep.f2.witness = at;
    rep.f2.value = worst;
    rep.f2.pass = p > 2.0 && p < 3.0 && std::isfinite(worst) && !(top > 0.1);
    rep.f2.detail = "sup |f(s)s|/(s+s^(p-1)); top-decade growth " + std::to_string(top);
  }

  // f3: F(t)/t^2 -> infinity, read off the top decade as a power law.
  {
    auto q = [&](double x) { return F(x) / (x * x); };
    const double slope = decade_slope(q, s_max);
    rep.f3.name = "f3";
    rep.f3.witness = s_max;
    rep.f3.value = q(s_max);
    rep.f3.pass = slope >= 1e-3;
    rep.f3.detail = "F(t)/t^2 log-log slope on the top decade " + std::to_string(slope);
  }

  // f4: nondecreasing (what the remark needs); strictness reported apart.
  {
    bool nondecreasing = true, strict = true;
    double at = 0.0, drop = 0.0;
    double prev = f(0.0);
    for (double x : s) {
      const double cur = f(x);
      const double tol = 1e-14 * std::max(1.0, std::abs(prev));
      if (cur < prev - tol && nondecreasing) {
        nondecreasing = false;
        at = x;
        drop = prev - cur;
      }
      if (!(cur > prev)) strict = false;
      prev = cur;
    }
    rep.f4.name = "f4";
    rep.f4.pass = nondecreasing;
    rep.f4.witness = at;
    rep.f4.value = drop;
    rep.f4.detail = strict ? "strictly increasing on samples" : "nondecreasing, not strictly increasing";
    rep.strictly_increasing = strict;
  }

  // f(t) t^2 / 2 - F(t) >= 0.
  {
    double worst = std::numeric_limits<double>::infinity(), at = s_min;
    bool ok = true;
    for (double t : s) {
      const double g = 0.5 * f(t) * t * t - F(t);
      const double tol = 1e-12 * std::max(1.0, std::abs(F(t)));
      if (g < -tol) ok = false;
      if (g < worst) { worst = g; at = t; }
    }
    rep.remark1.name = "remark1";
    rep.remark1.pass = ok;
    rep.remark1.witness = at;
    rep.remark1.value = worst;
    rep.remark1.detail = "min of f(t)t^2/2 - F(t) over samples";
  }
  return rep;
}

namespace {

bool decays(const std::vector<double>& seq) {
  if (seq.size() < 2 || !(seq.front() > 0.0)) return false;
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (seq[i] > seq[i - 1] * (1.0 + 1e-12)) return false;
  return seq.back() <= 0.5 * seq.front();
}

}  // namespace

VkReport check_vk_conditions(const ProblemModel& model, double q, int shells) {
  if (shells < 2) throw std::invalid_argument("check_vk_conditions: need at least 2 shells");
  const Grid& g = model.grid();
  const auto& V = model.V();
  const auto& K = model.K();
  VkReport rep;
  rep.q = q;
  rep.mass = model.mass();
  rep.min_V = *std::min_element(V.begin(), V.end());
  rep.max_V = *std::max_element(V.begin(), V.end());
  rep.min_K = *std::min_element(K.begin(), K.end());
  rep.max_K = *std::max_element(K.begin(), K.end());
  rep.vk0_pass = rep.min_V > 0.0 && rep.min_K > 0.0 && rep.max_V < model.mass();

  rep.vk2_sup_ratio = 0.0;
  for (std::size_t i = 0; i < V.size(); ++i)
    rep.vk2_sup_ratio = std::max(rep.vk2_sup_ratio, V[i] > 0.0 ? K[i] / V[i] : std::numeric_limits<double>::infinity());

  const double L = g.half_length();
  const double dv = g.cell_volume();
  const auto unit_cells = static_cast<std::size_t>(std::max(1.0, std::ceil(1.0 / dv)));
  for (int j = 0; j < shells; ++j) rep.radii.push_back(L * j / shells);

  std::vector<double> radius(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) radius[i] = g.radius(i);

  for (int j = 0; j < shells; ++j) {
    const double r0 = rep.radii[j];
    const double r1 = j + 1 < shells ? rep.radii[j + 1] : L;
    double sup3 = 0.0, shell = 0.0;
    std::vector<double> outside;
    for (std::size_t i = 0; i < V.size(); ++i) {
      if (radius[i] < r0) continue;
      const double ratio = V[i] > 0.0 ? K[i] / std::pow(V[i], 3.0 - q) : std::numeric_limits<double>::infinity();
      sup3 = std::max(sup3, ratio);
      outside.push_back(K[i]);
      if (radius[i] < r1) shell += K[i] * dv;
    }
    const std::size_t take = std::min(unit_cells, outside.size());
    std::partial_sort(outside.begin(), outside.begin() + static_cast<std::ptrdiff_t>(take), outside.end(),
                      std::greater<>());
    double mass = 0.0;
    for (std::size_t i = 0; i < take; ++i) mass += outside[i] * dv;
    rep.vk3_tail_sup.push_back(sup3);
    rep.vk1_shell_integral.push_back(shell);
    rep.vk1_tail_mass.push_back(mass);
  }
  rep.vk1_decaying = decays(rep.vk1_tail_mass);
  rep.vk3_decaying = decays(rep.vk3_tail_sup);
  return rep;
}

double cq_constant(double q) {
  if (!(q > 2.0 && q < 3.0)) throw std::invalid_argument("cq_constant: q must lie in (2, 3)");
  return std::pow((q - 2.0) / (3.0 - q), 2.0 - q) / (3.0 - q);
}

}  // namespace ndirac
