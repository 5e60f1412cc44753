#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "txtree/data_model.h"
#include "txtree/likelihood.h"
#include "txtree/moves.h"
#include "txtree/priors.h"
#include "txtree/random.h"
#include "txtree/state.h"

namespace txtree {

class Initialization_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Step_sizes {
  double log_beta = 0.3;
  double log_k = 0.15;
  double logit_gamma = 0.3;
  double logit_gamma_G = 0.3;
};

struct SamplerConfig {
  long iterations = 100000;
  long burn_in = 20000;
  long thin = 10;
  std::uint64_t seed = 1;
  double w = 0.3;
  double w_prime = 0.5;
  bool full_augmentation = false;
  double phantom_pmf_gamma = 0.2;
  double phantom_pmf_gamma_G = 0.01;
  Step_sizes mh_step_sizes;
  Genetic_model model = Genetic_model::transmission_diversity;
  Distance_family distance_family = Distance_family::geometric;
  bool data_free = false;            // likelihood forced to zero; samples the prior
  bool validate_every_move = false;  // run state validation after every accepted move
  std::optional<ModelParams> initial_theta;

  void validate() const;  // throws std::invalid_argument
  auto move_settings() const -> Move_settings;
};

struct Move_counters {
  long attempted = 0;
  long accepted = 0;
  long rejected_outright = 0;  // proposal could not be constructed
  long rejected = 0;           // constructed but failed the Metropolis–Hastings test
};

struct Param_counters {
  long attempted = 0;
  long accepted = 0;
};

// Random-walk updates, indexed by Mh_param.
enum class Mh_param { beta, k, gamma, gamma_G };
inline constexpr int kNumMhParams = 4;

struct Tree_entry {
  Patient patient;
  int col_day;
  int source;  // kImported for importations
  int group;
};

struct Trace_sample {
  long iteration = 0;
  ModelParams theta;
  double log_post = 0.0;
  std::vector<Tree_entry> tree;  // colonized patients only, ordered by patient
};

struct PosteriorTrace {
  Genetic_model model = Genetic_model::transmission_diversity;
  std::vector<std::string> patient_ids;
  std::vector<Trace_sample> samples;
  std::array<Move_counters, kNumMoveKinds> moves{};
  std::array<Param_counters, kNumMhParams> params{};
};

auto snapshot(const AugmentedState& state) -> std::vector<Tree_entry>;

// Metropolis–Hastings acceptance probability min(1, exp(Δ) q).
auto acceptance_probability(double delta_log_target, double log_q_ratio) -> double;

struct Accept_result {
  bool accepted = false;
  double probability = 0.0;
};
auto accept(double current_log_target, double proposed_log_target, double log_q_ratio, Rng& rng)
    -> Accept_result;

// Gibbs draws where conjugate, random-walk MH on the rest. The sufficient statistics describe
// the current state.
auto update_params(const Model_stats& stats, const ModelParams& theta, const PriorSpec& priors,
                   const SamplerConfig& cfg, Rng& rng,
                   std::array<Param_counters, kNumMhParams>* counters = nullptr) -> ModelParams;

auto update_params(const AugmentedState& state, const ModelParams& theta, const PriorSpec& priors,
                   const SamplerConfig& cfg, Rng& rng) -> ModelParams;

// Starting parameters: prior means for the Beta parameters, β = 0.01 and k = 1.
auto initial_params(const PriorSpec& priors, const SamplerConfig& cfg) -> ModelParams;

// A single chain, advanced one iteration at a time.
class Chain {
 public:
  Chain(const Dataset& d, const PriorSpec& priors, const SamplerConfig& cfg);

  void step();
  auto iteration() const -> long { return iteration_; }
  auto state() const -> const AugmentedState& { return state_; }
  auto theta() const -> const ModelParams& { return theta_; }
  auto stats() const -> const Model_stats& { return stats_; }
  auto log_likelihood() const -> double { return log_lik_; }
  auto log_posterior() const -> double;
  auto move_counters() const -> const std::array<Move_counters, kNumMoveKinds>& { return moves_; }
  auto param_counters() const -> const std::array<Param_counters, kNumMhParams>& {
    return params_;
  }

 private:
  const Dataset* data_;
  PriorSpec priors_;
  SamplerConfig cfg_;
  Move_settings settings_;
  Likelihood_options options_;
  Pair_index pairs_;
  Rng rng_;
  AugmentedState state_;
  ModelParams theta_;
  Model_stats stats_;
  double log_lik_ = 0.0;
  long iteration_ = 0;
  std::array<Move_counters, kNumMoveKinds> moves_{};
  std::array<Param_counters, kNumMhParams> params_{};
};

auto is_retained(long iteration, const SamplerConfig& cfg) -> bool;

auto run_chain(const Dataset& d, Genetic_model model, const PriorSpec& priors,
               const SamplerConfig& cfg) -> PosteriorTrace;

// Independent chains with seeds derived from cfg.seed, run on up to `workers` threads.
auto run_chains(const Dataset& d, Genetic_model model, const PriorSpec& priors,
                const SamplerConfig& cfg, int chains, int workers) -> std::vector<PosteriorTrace>;

// Concatenates the samples of several chains; counters are summed.
auto merge_traces(const std::vector<PosteriorTrace>& traces) -> PosteriorTrace;

}  // namespace txtree
