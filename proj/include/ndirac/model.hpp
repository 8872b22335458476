#pragma once

#include "ndirac/field.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ndirac {

/// The scalar nonlinearity f of K(x) f(|u|) u together with its primitive
/// F(t) = int_0^t f(s) s ds.
class Nonlinearity {
 public:
  enum class Kind { power, sampled };

  /// f(s) = s^(p-2), F(t) = t^p / p. Any p >= 2 is accepted so that the
  /// condition checkers can be pointed at boundary cases.
  static Nonlinearity power(double p);

  /// Piecewise-linear f through (nodes[i], values[i]) with nodes[0] == 0,
  /// held constant past the last node. `growth_p` is the exponent used for
  /// the growth bound |f(s) s| <= c1 s + c2 s^(p-1).
  static Nonlinearity sampled(std::vector<double> nodes, std::vector<double> values, double growth_p);

  Kind kind() const { return kind_; }
  double p() const { return p_; }

  double f(double s) const;
  double F(double t) const;

  // Unchecked variants for inner loops; arguments are moduli, hence >= 0.
  double f_unchecked(double s) const;
  double F_unchecked(double t) const;

  std::string describe() const;

 private:
  Nonlinearity() = default;

  Kind kind_ = Kind::power;
  double p_ = 2.5;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> primitive_;  // F at the nodes
};

/// A radial profile used for V or K.
struct Profile {
  enum class Kind { constant, rational_decay, exponential, table };

  Kind kind = Kind::constant;
  double scale = 1.0;  ///< value at the origin
  double gamma = 1.0;  ///< rational_decay: scale / (1 + |x|^2)^gamma
  double sigma = 1.0;  ///< exponential: scale * exp(-|x| / sigma)
  std::vector<double> table;  ///< table: one value per grid point

  static Profile constant(double c) { return {Kind::constant, c, 1.0, 1.0, {}}; }
  static Profile rational_decay(double c, double g) { return {Kind::rational_decay, c, g, 1.0, {}}; }
  static Profile exponential(double c, double s) { return {Kind::exponential, c, 1.0, s, {}}; }
  static Profile from_table(std::vector<double> values) { return {Kind::table, 1.0, 1.0, 1.0, std::move(values)}; }

  std::vector<double> sample(const Grid& grid) const;
  std::string describe() const;
};

/// Potentials V, K and nonlinearity f on a concrete spectral space.
class ProblemModel {
 public:
  ProblemModel(Grid grid, double a, Profile v, Profile k, Nonlinearity nl);

  const SpectralSpace& space() const { return *space_; }
  std::shared_ptr<const SpectralSpace> space_ptr() const { return space_; }
  const Grid& grid() const { return space_->grid(); }
  double mass() const { return space_->mass(); }
  const Nonlinearity& nonlinearity() const { return nl_; }
  const Profile& v_profile() const { return v_profile_; }
  const Profile& k_profile() const { return k_profile_; }
  const std::vector<double>& V() const { return v_; }
  const std::vector<double>& K() const { return k_; }
  double sup_V() const;
  double sup_K() const;

  /// Same potentials and nonlinearity on another grid.
  ProblemModel on_grid(const Grid& grid) const;

 private:
  std::shared_ptr<const SpectralSpace> space_;
  Profile v_profile_;
  Profile k_profile_;
  Nonlinearity nl_;
  std::vector<double> v_;
  std::vector<double> k_;
};

struct ConditionResult {
  std::string name;
  bool pass = false;
  double witness = 0.0;  ///< sample location of the decisive value
  double value = 0.0;    ///< the decisive sampled quantity
  std::string detail;
};

struct FConditionReport {
  ConditionResult f1, f2, f3, f4, remark1;
  bool strictly_increasing = false;
  std::size_t samples = 0;

  bool all_pass() const { return f1.pass && f2.pass && f3.pass && f4.pass && remark1.pass; }
};

/// Samples f on sample_count log-spaced points in [1e-6, 1e3] (sample_count
/// >= 100) and evaluates the conditions f1-f4 and the inequality
/// f(t) t^2 / 2 - F(t) >= 0.
FConditionReport check_f_conditions(const Nonlinearity& nl, std::size_t sample_count = 2000);

struct VkReport {
  bool vk0_pass = false;
  double min_V = 0.0, max_V = 0.0, min_K = 0.0, max_K = 0.0;
  double mass = 0.0;
  double vk2_sup_ratio = 0.0;             ///< max_x K/V
  std::vector<double> radii;              ///< shell edges r_0 < r_1 < ...
  std::vector<double> vk3_tail_sup;       ///< sup_{|x| >= r_j} K / V^(3-q)
  std::vector<double> vk1_shell_integral; ///< int_{r_j <= |x| < r_{j+1}} K
  std::vector<double> vk1_tail_mass;      ///< sup over |A| <= 1, A outside B_{r_j}, of int_A K
  bool vk1_decaying = false;
  bool vk3_decaying = false;
  double q = 0.0;
};

VkReport check_vk_conditions(const ProblemModel& model, double q, int shells = 4);

/// C_q = (1 / (3 - q)) ((q - 2) / (3 - q))^(2 - q), the constant for which
/// min_{t > 0} (V t^(2-q) + t^(3-q)) = C_q V^(3-q). Requires 2 < q < 3.
double cq_constant(double q);

}  // namespace ndirac
