#include "rwapg/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rwapg {

namespace {

void check_index(long k, const char* what) {
  if (k < 0) {
    throw std::invalid_argument(std::string(what) + " index must be nonnegative, got " +
                                std::to_string(k));
  }
}

}  // namespace

Schedule Schedule::chambolle_dossal(double a) {
  if (!(a >= 2.0) || !std::isfinite(a)) {
    throw std::invalid_argument("chambolle_dossal requires a >= 2, got " +
                                std::to_string(a));
  }
  Schedule s;
  s.kind_ = Kind::chambolle_dossal;
  s.a_ = a;
  s.q_ = 0.0;
  return s;
}

Schedule Schedule::constant(double r, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("constant schedule requires q in (0, 1), got " +
                                std::to_string(q));
  }
  const double rq = std::sqrt(q);
  if (!(r > rq && r < 1.0 / rq)) {
    throw std::invalid_argument("constant schedule requires r in (sqrt(q), 1/sqrt(q))");
  }
  Schedule s;
  s.kind_ = Kind::constant;
  s.r_ = r;
  s.q_ = q;
  return s;
}

Schedule Schedule::inverted_fista(long horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  Schedule s;
  s.kind_ = Kind::inverted_fista;
  s.q_ = 0.0;
  s.alphas_.resize(static_cast<std::size_t>(horizon) + 1);
  double t = 1.0;  // t_0
  s.alphas_[0] = 1.0;
  for (long k = 1; k <= horizon; ++k) {
    t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    s.alphas_[static_cast<std::size_t>(k)] = 1.0 / t;
  }
  return s;
}

Schedule Schedule::custom(std::vector<double> alphas, double q) {
  if (alphas.empty()) throw std::invalid_argument("custom schedule needs at least alpha_0");
  if (!(q >= 0.0 && q < 1.0)) {
    throw std::invalid_argument("custom schedule requires q in [0, 1)");
  }
  Schedule s;
  s.kind_ = Kind::custom;
  s.q_ = q;
  s.alphas_ = std::move(alphas);
  return s;
}

double Schedule::alpha(long k) const {
  check_index(k, "alpha");
  switch (kind_) {
    case Kind::chambolle_dossal:
      return a_ / (static_cast<double>(k) + a_);
    case Kind::constant:
      return r_ * std::sqrt(q_);
    case Kind::inverted_fista:
    case Kind::custom:
      if (static_cast<std::size_t>(k) >= alphas_.size()) {
        throw std::out_of_range("alpha index " + std::to_string(k) +
                                " beyond schedule horizon " +
                                std::to_string(alphas_.size() - 1));
      }
      return alphas_[static_cast<std::size_t>(k)];
  }
  throw std::logic_error("unreachable schedule kind");
}

double Schedule::rho(long k) const {
  check_index(k, "rho");
  switch (kind_) {
    case Kind::chambolle_dossal: {
      const double ka = static_cast<double>(k) + a_;
      return ka * ka / ((static_cast<double>(k) + 1.0) * (ka + 1.0));
    }
    case Kind::constant: {
      const double rq = std::sqrt(q_);
      return (1.0 - rq / r_) / (1.0 - r_ * rq);
    }
    case Kind::inverted_fista:
    case Kind::custom:
      return rho_from_alpha(alpha(k), alpha(k + 1), q_);
  }
  throw std::logic_error("unreachable schedule kind");
}

long Schedule::max_alpha_index() const {
  if (kind_ == Kind::inverted_fista || kind_ == Kind::custom) {
    return static_cast<long>(alphas_.size()) - 1;
  }
  return std::numeric_limits<long>::max();
}

double Schedule::constant_theta() const {
  if (kind_ != Kind::constant) {
    throw std::logic_error("constant_theta is defined for constant schedules only");
  }
  const double rq = std::sqrt(q_);
  return (1.0 - rq / r_) * (1.0 - r_ * rq) / (1.0 - q_);
}

std::string Schedule::kind_name() const {
  switch (kind_) {
    case Kind::chambolle_dossal: return "chambolle_dossal";
    case Kind::constant: return "constant";
    case Kind::inverted_fista: return "inverted_fista";
    case Kind::custom: return "custom";
  }
  return "unknown";
}

double rho_from_alpha(double alpha_k, double alpha_next, double q) {
  if (alpha_next == 1.0) {
    throw std::domain_error("rho is undefined at alpha_next = 1 (degenerate schedule)");
  }
  if (alpha_k == 0.0) {
    throw std::domain_error("rho is undefined at alpha_k = 0");
  }
  return (alpha_next * alpha_next - q * alpha_next) /
         ((1.0 - alpha_next) * alpha_k * alpha_k);
}

double free_alpha_update(double alpha_k, double q_k) {
  if (!(alpha_k > 0.0 && alpha_k <= 1.0)) {
    throw std::invalid_argument("free_alpha_update requires alpha_k in (0, 1]");
  }
  if (!(q_k >= 0.0 && q_k < 1.0)) {
    throw std::invalid_argument("free_alpha_update requires q_k in [0, 1)");
  }
  const double d = q_k - alpha_k * alpha_k;
  return 0.5 * (d + std::sqrt(d * d + 4.0 * alpha_k * alpha_k));
}

double momentum_coefficient(double alpha_k, double alpha_next, double rho_k) {
  const double denom = rho_k * alpha_k * alpha_k + alpha_next;
  if (!(denom > 0.0)) {
    throw std::domain_error("momentum coefficient denominator must be positive");
  }
  return rho_k * alpha_k * (1.0 - alpha_k) / denom;
}

BoundFactor bound_factor(const Schedule& s, long k) {
  check_index(k, "bound factor");
  BoundFactor out;
  double acc = 0.0;
  for (long i = 0; i < k; ++i) {
    const double r = s.rho(i);
    if (r > 1.0) acc += std::log(r);
  }
  for (long i = 1; i <= k; ++i) {
    const double one_minus = 1.0 - s.alpha(i);
    if (!(one_minus > 0.0)) {
      throw std::domain_error("bound factor needs alpha_k < 1 for k >= 1; violated at " +
                              std::to_string(i));
    }
    acc += std::log(one_minus);
  }
  out.log_value = acc;
  if (acc < std::log(1e-300)) {
    out.value = 0.0;
    out.underflow = true;
  } else {
    out.value = std::exp(acc);
  }
  return out;
}

ValidationReport validate(const Schedule& s, long horizon) {
  if (horizon < 1) throw std::invalid_argument("validation horizon must be at least 1");
  ValidationReport rep;
  const long limit = std::min(horizon, s.max_alpha_index());
  rep.checked_horizon = limit;

  const double a0 = s.alpha(0);
  if (!(a0 > 0.0 && a0 <= 1.0)) {
    rep.valid = false;
    rep.first_invalid_index = 0;
    rep.reason = "alpha_0 must lie in (0, 1], got " + std::to_string(a0);
    return rep;
  }
  for (long k = 1; k <= limit; ++k) {
    const double a = s.alpha(k);
    if (!(a > s.q() && a < 1.0) || !std::isfinite(a)) {
      rep.valid = false;
      rep.first_invalid_index = k;
      rep.reason = "alpha_" + std::to_string(k) + " = " + std::to_string(a) +
                   " outside (q, 1) with q = " + std::to_string(s.q());
      return rep;
    }
  }
  for (long k = 0; k + 1 <= limit; ++k) {
    const double r = s.rho(k);
    if (!std::isfinite(r) || !(r > 0.0)) {
      rep.valid = false;
      rep.first_invalid_index = k;
      rep.reason = "rho_" + std::to_string(k) + " = " + std::to_string(r) +
                   " is not positive and finite";
      return rep;
    }
    // Residual of alpha_{k+1}^2 = (1 - alpha_{k+1}) rho_k alpha_k^2 + q alpha_{k+1}.
    const double an = s.alpha(k + 1);
    const double ak = s.alpha(k);
    const double res = std::abs(an * an - (1.0 - an) * r * ak * ak - s.q() * an);
    if (res > rep.max_recurrence_residual) rep.max_recurrence_residual = res;
  }
  return rep;
}

TSequenceReport inverted_fista_check(const Schedule& s, long horizon) {
  if (horizon < 1) throw std::invalid_argument("check horizon must be at least 1");
  TSequenceReport rep;
  const long limit = std::min(horizon, s.max_alpha_index());

  if (s.q() != 0.0) {
    rep.premises_ok = false;
    rep.reason = "requires q = 0";
    return rep;
  }
  if (s.alpha(0) != 1.0) {
    rep.premises_ok = false;
    rep.first_bad_index = 0;
    rep.reason = "requires alpha_0 = 1";
    return rep;
  }
  for (long k = 0; k + 1 <= limit; ++k) {
    if (s.rho(k) < 1.0 - 1e-12) {
      rep.premises_ok = false;
      rep.first_bad_index = k;
      rep.reason = "requires rho_k >= 1, violated at k = " + std::to_string(k);
      return rep;
    }
  }

  double prod = 1.0;
  rep.rolling_product.reserve(static_cast<std::size_t>(limit) + 1);
  rep.rolling_product.push_back(prod);  // slot 0: the empty product
  double t_prev = 1.0 / s.alpha(0);
  for (long k = 1; k <= limit; ++k) {
    const double t = 1.0 / s.alpha(k);
    if (!(t > 0.0) || t > 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev)) + 1e-12) {
      rep.recursion_ok = false;
      rep.first_bad_index = k;
      rep.reason = "t_" + std::to_string(k) + " exceeds the recursion bound";
      return rep;
    }
    t_prev = t;
    prod *= std::max(1.0, s.rho(k - 1)) * (1.0 - s.alpha(k));
    rep.rolling_product.push_back(prod);
    const double target = s.alpha(k) * s.alpha(k);
    const double dev = std::abs(prod / target - 1.0);
    if (dev > rep.max_product_deviation) rep.max_product_deviation = dev;
  }
  return rep;
}

}  // namespace rwapg
