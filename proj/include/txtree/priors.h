#pragma once

#include <string_view>

namespace txtree {

enum class Genetic_model { transmission_diversity, importation_structure };
enum class Distance_family { geometric, poisson };

auto to_string(Genetic_model m) -> std::string_view;
auto to_string(Distance_family f) -> std::string_view;
auto parse_genetic_model(std::string_view text) -> Genetic_model;   // "td" / "is" or full names
auto parse_distance_family(std::string_view text) -> Distance_family;

// θ = {p, z, β, γ, γ_G, k, c}.
struct ModelParams {
  double p = 0.5;        // probability of colonization on admission
  double z = 0.5;        // screening sensitivity
  double beta = 0.01;    // per-colonized daily transmission rate
  double gamma = 0.5;    // within-chain / within-group geometric parameter
  double gamma_G = 0.5;  // between-chain / between-group geometric parameter
  double k = 1.0;        // chain diversity factor (transmission diversity model)
  double c = 0.5;        // group clustering probability (importation structure model)
  Distance_family distance_family = Distance_family::geometric;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct Beta_prior {
  double a = 1.0;
  double b = 1.0;
  auto mean() const -> double { return a / (a + b); }
  auto log_density(double x) const -> double;
  auto cdf(double x) const -> double;
  auto quantile(double u) const -> double;
};

// Optionally truncated to [0, upper].
struct Exponential_prior {
  double rate = 1e-6;
  double upper = 0.0;  // 0 means untruncated
  auto log_density(double x) const -> double;
  auto cdf(double x) const -> double;
  auto quantile(double u) const -> double;
};

struct PriorSpec {
  Beta_prior p;
  Beta_prior z;
  Beta_prior gamma;
  Beta_prior gamma_G;
  Beta_prior c;
  Exponential_prior beta;
  Exponential_prior k;

  // Restricts k to [0,1].
  void constrain_k() { k.upper = 1.0; }
  auto k_constrained() const -> bool { return k.upper > 0.0; }
  void validate() const;  // throws std::invalid_argument
};

// Sum of log prior densities of the parameters the model uses (c only for importation
// structure, k only for transmission diversity).
auto log_prior(const ModelParams& theta, const PriorSpec& priors, Genetic_model model) -> double;

}  // namespace txtree
