#include "txtree/priors.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/beta.hpp>

namespace txtree {

namespace {
constexpr auto kNegInf = -std::numeric_limits<double>::infinity();
}

auto to_string(Genetic_model m) -> std::string_view {
  return m == Genetic_model::transmission_diversity ? "transmission_diversity"
                                                    : "importation_structure";
}

auto to_string(Distance_family f) -> std::string_view {
  return f == Distance_family::geometric ? "geometric" : "poisson";
}

auto parse_genetic_model(std::string_view text) -> Genetic_model {
  if (text == "td" || text == "transmission_diversity") return Genetic_model::transmission_diversity;
  if (text == "is" || text == "importation_structure") return Genetic_model::importation_structure;
  throw std::invalid_argument{"unknown genetic model '" + std::string{text} + "'"};
}

auto parse_distance_family(std::string_view text) -> Distance_family {
  if (text == "geometric") return Distance_family::geometric;
  if (text == "poisson") return Distance_family::poisson;
  throw std::invalid_argument{"unknown distance family '" + std::string{text} + "'"};
}

auto Beta_prior::log_density(double x) const -> double {
  if (!(x >= 0.0 && x <= 1.0)) return kNegInf;
  if ((x == 0.0 && a < 1.0) || (x == 1.0 && b < 1.0)) return std::numeric_limits<double>::infinity();
  auto log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  auto term_a = (a == 1.0) ? 0.0 : (a - 1.0) * std::log(x);
  auto term_b = (b == 1.0) ? 0.0 : (b - 1.0) * std::log1p(-x);
  return log_norm + term_a + term_b;
}

auto Beta_prior::cdf(double x) const -> double {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::cdf(boost::math::beta_distribution<double>{a, b}, x);
}

auto Beta_prior::quantile(double u) const -> double {
  return boost::math::quantile(boost::math::beta_distribution<double>{a, b}, u);
}

auto Exponential_prior::log_density(double x) const -> double {
  if (!(x >= 0.0)) return kNegInf;
  if (upper > 0.0) {
    if (x > upper) return kNegInf;
    return std::log(rate) - rate * x - std::log(-std::expm1(-rate * upper));
  }
  return std::log(rate) - rate * x;
}

auto Exponential_prior::cdf(double x) const -> double {
  if (x <= 0.0) return 0.0;
  if (upper > 0.0) {
    if (x >= upper) return 1.0;
    return std::expm1(-rate * x) / std::expm1(-rate * upper);
  }
  return -std::expm1(-rate * x);
}

auto Exponential_prior::quantile(double u) const -> double {
  if (upper > 0.0) return -std::log1p(u * std::expm1(-rate * upper)) / rate;
  return -std::log1p(-u) / rate;
}

void PriorSpec::validate() const {
  for (const auto* b : {&p, &z, &gamma, &gamma_G, &c}) {
    if (!(b->a > 0.0 && b->b > 0.0)) throw std::invalid_argument{"Beta prior shapes must be positive"};
  }
  for (const auto* e : {&beta, &k}) {
    if (!(e->rate > 0.0)) throw std::invalid_argument{"Exponential prior rate must be positive"};
    if (e->upper < 0.0) throw std::invalid_argument{"prior truncation must be nonnegative"};
  }
}

auto log_prior(const ModelParams& theta, const PriorSpec& priors, Genetic_model model) -> double {
  auto lp = priors.p.log_density(theta.p) + priors.z.log_density(theta.z) +
            priors.beta.log_density(theta.beta) + priors.gamma.log_density(theta.gamma) +
            priors.gamma_G.log_density(theta.gamma_G);
  if (model == Genetic_model::transmission_diversity) {
    lp += priors.k.log_density(theta.k);
  } else {
    lp += priors.c.log_density(theta.c);
  }
  return lp;
}

}  // namespace txtree
