#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace rwapg {

/**
 * An acceleration schedule: the pair of sequences (alpha_k)_{k>=0} and
 * (rho_k)_{k>=0} that drive every solver form, together with the curvature
 * ratio q = mu/L it was built for. A valid schedule has alpha_0 in (0, 1],
 * alpha_k in (q, 1) for k >= 1, and rho tied to alpha by
 *
 *   rho_k = (alpha_{k+1}^2 - q * alpha_{k+1}) / ((1 - alpha_{k+1}) * alpha_k^2),
 *
 * equivalently alpha_{k+1}^2 = (1 - alpha_{k+1}) rho_k alpha_k^2 + q alpha_{k+1}.
 *
 * Schedules are value objects; all accessors are const and thread-safe.
 */
class Schedule {
 public:
  enum class Kind { chambolle_dossal, constant, inverted_fista, custom };

  // alpha_k = a/(k + a) with a >= 2, rho_k = (k + a)^2 / ((k + 1)(k + a + 1)),
  // q = 0. The classic O(1/k^2) decay with rho_k >= 1 throughout.
  static Schedule chambolle_dossal(double a);

  // alpha_k = r * sqrt(q) for all k, with q in (0, 1) and r in (sqrt(q),
  // 1/sqrt(q)); rho is the matching constant. r = 1 reproduces the familiar
  // (1 - sqrt(q)) linear rate with rho = 1.
  static Schedule constant(double r, double q);

  // alpha_k = 1/t_k where t_0 = 1 and t_{k+1} = (1 + sqrt(1 + 4 t_k^2))/2,
  // q = 0. Values are precomputed up to `horizon` (inclusive).
  static Schedule inverted_fista(long horizon = 20000);

  // Explicit alpha array with the given q; rho is derived from consecutive
  // alphas. alphas[k] is alpha_k, so the last usable rho index is size - 2.
  static Schedule custom(std::vector<double> alphas, double q);

  double alpha(long k) const;
  double rho(long k) const;
  double q() const { return q_; }
  Kind kind() const { return kind_; }

  // Largest k for which alpha(k) is defined; LONG_MAX for closed forms.
  long max_alpha_index() const;

  // Parameters of the closed forms; meaningful only for the matching kind.
  double parameter_a() const { return a_; }
  double parameter_r() const { return r_; }

  // Momentum coefficient of the constant schedule:
  // (1 - sqrt(q)/r)(1 - r sqrt(q)) / (1 - q).
  double constant_theta() const;

  std::string kind_name() const;

 private:
  Schedule() = default;

  Kind kind_ = Kind::custom;
  double q_ = 0.0;
  double a_ = 0.0;
  double r_ = 0.0;
  std::vector<double> alphas_;
};

// rho from two consecutive alphas at curvature ratio q. alpha_next = 1 is
// degenerate and raises std::domain_error.
double rho_from_alpha(double alpha_k, double alpha_next, double q);

// Positive root of alpha^2 + (alpha_k^2 - q_k) alpha - alpha_k^2 = 0:
//   (1/2) (q_k - alpha_k^2 + sqrt((q_k - alpha_k^2)^2 + 4 alpha_k^2)).
// Fixed point sqrt(q_k); maps q_k = alpha_k^2 to alpha_k.
double free_alpha_update(double alpha_k, double q_k);

// theta_{k+1} = rho_k alpha_k (1 - alpha_k) / (rho_k alpha_k^2 + alpha_{k+1}),
// the momentum weight equivalent to one accelerated step.
double momentum_coefficient(double alpha_k, double alpha_next, double rho_k);

/**
 * prod_{i=0}^{k-1} max(1, rho_i) * prod_{i=1}^{k} (1 - alpha_i), accumulated
 * in log space. `value` is exp(log_value), clamped to 0 with `underflow` set
 * once the factor drops below 1e-300. bound_factor(s, 0) = 1.
 */
struct BoundFactor {
  double value = 1.0;
  double log_value = 0.0;
  bool underflow = false;
};

BoundFactor bound_factor(const Schedule& s, long k);

/**
 * Checks the admissibility conditions up to `horizon`: alpha_0 in (0, 1],
 * alpha_k in (q, 1) for 1 <= k <= horizon, rho finite and positive where
 * defined. Also reports the largest residual of the coupling recurrence
 *   alpha_k^2 - (1 - alpha_k) rho_{k-1} alpha_{k-1}^2 - q alpha_k
 * over the checked range (in units of L, i.e. already divided through by L).
 */
struct ValidationReport {
  bool valid = true;
  long first_invalid_index = -1;
  std::string reason;
  double max_recurrence_residual = 0.0;
  long checked_horizon = 0;
};

ValidationReport validate(const Schedule& s, long horizon);

/**
 * For a schedule with q = 0, rho_k >= 1 and alpha_0 = 1, the reciprocals
 * t_k = 1/alpha_k obey the classic relaxed recursion
 *   0 < t_{k+1} <= (1 + sqrt(1 + 4 t_k^2))/2,
 * and the running product prod_{i=1}^{k} max(1, rho_{i-1})(1 - alpha_i)
 * collapses to alpha_k^2. This verifies both up to `horizon`; a premise
 * violation is reported with its index instead.
 */
struct TSequenceReport {
  bool premises_ok = true;
  bool recursion_ok = true;
  long first_bad_index = -1;
  std::string reason;
  // rolling_product[k] = the product above at k, for k = 0..horizon, with
  // the empty product 1 at slot 0.
  std::vector<double> rolling_product;
  double max_product_deviation = 0.0;  // max |product/alpha_k^2 - 1|
};

TSequenceReport inverted_fista_check(const Schedule& s, long horizon);

}  // namespace rwapg
