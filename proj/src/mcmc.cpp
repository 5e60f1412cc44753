#include "txtree/mcmc.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

namespace txtree {

namespace {

constexpr auto kNegInf = -std::numeric_limits<double>::infinity();

auto logit(double x) -> double { return std::log(x) - std::log1p(-x); }
auto logistic(double y) -> double { return 1.0 / (1.0 + std::exp(-y)); }

auto options_for(const SamplerConfig& cfg) -> Likelihood_options {
  // Without a likelihood the phantom distances would have an improper target, so prior
  // sampling runs without them.
  return {cfg.model, cfg.full_augmentation && !cfg.data_free, cfg.data_free};
}

auto settings_for(const SamplerConfig& cfg) -> Move_settings {
  auto s = cfg.move_settings();
  s.full_augmentation = s.full_augmentation && !cfg.data_free;
  return s;
}

// One random-walk MH step on a transformed scale. `to_natural` maps the walk coordinate back,
// `log_jacobian` is log |d natural / d walk| at a natural value.
template <typename Target, typename To_natural, typename To_walk, typename Log_jacobian>
auto mh_step(double current, double step, Target&& log_target, To_natural&& to_natural,
             To_walk&& to_walk, Log_jacobian&& log_jacobian, Rng& rng, Param_counters* counter)
    -> double {
  if (counter) ++counter->attempted;
  auto proposed = to_natural(to_walk(current) + rng.normal(0.0, step));
  auto target_new = log_target(proposed);
  if (!std::isfinite(target_new)) return current;
  auto log_alpha =
      target_new - log_target(current) + log_jacobian(proposed) - log_jacobian(current);
  if (log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha) {
    if (counter) ++counter->accepted;
    return proposed;
  }
  return current;
}

auto update_unit(double current, double step, const Beta_prior& prior,
                 const std::function<double(double)>& log_lik, Rng& rng, Param_counters* counter)
    -> double {
  return mh_step(
      current, step,
      [&](double x) {
        if (!(x > 0.0 && x < 1.0)) return kNegInf;
        auto lp = prior.log_density(x);
        return lp == kNegInf ? kNegInf : lp + log_lik(x);
      },
      logistic, logit, [](double x) { return std::log(x) + std::log1p(-x); }, rng, counter);
}

auto update_positive(double current, double step, const Exponential_prior& prior,
                     const std::function<double(double)>& log_lik, Rng& rng,
                     Param_counters* counter) -> double {
  return mh_step(
      current, step,
      [&](double x) {
        if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
        auto lp = prior.log_density(x);
        return lp == kNegInf ? kNegInf : lp + log_lik(x);
      },
      [](double y) { return std::exp(y); }, [](double x) { return std::log(x); },
      [](double x) { return std::log(x); }, rng, counter);
}

auto counter_at(std::array<Param_counters, kNumMhParams>* counters, Mh_param p)
    -> Param_counters* {
  return counters ? &(*counters)[static_cast<int>(p)] : nullptr;
}

}  // namespace

void SamplerConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument{"sampler config: " + msg}; };
  if (iterations < 0) fail("iterations must be nonnegative");
  if (burn_in < 0 || burn_in > iterations) fail("burn_in must lie in [0, iterations]");
  if (thin < 1) fail("thin must be at least 1");
  if (!(w > 0.0 && w < 1.0)) fail("w must lie in (0,1)");
  if (!(w_prime > 0.0 && w_prime < 1.0)) fail("w_prime must lie in (0,1)");
  if (!(phantom_pmf_gamma > 0.0 && phantom_pmf_gamma <= 1.0) ||
      !(phantom_pmf_gamma_G > 0.0 && phantom_pmf_gamma_G <= 1.0)) {
    fail("phantom pmf parameters must lie in (0,1]");
  }
  const auto& s = mh_step_sizes;
  if (!(s.log_beta > 0 && s.log_k > 0 && s.logit_gamma > 0 && s.logit_gamma_G > 0)) {
    fail("step sizes must be positive");
  }
}

auto SamplerConfig::move_settings() const -> Move_settings {
  return {model, w, w_prime, full_augmentation, phantom_pmf_gamma, phantom_pmf_gamma_G};
}

auto snapshot(const AugmentedState& state) -> std::vector<Tree_entry> {
  auto out = std::vector<Tree_entry>{};
  for (auto j = 0; j < state.num_patients(); ++j) {
    if (state.colonized(j)) out.push_back({j, state.col_day(j), state.source(j), state.group(j)});
  }
  return out;
}

auto acceptance_probability(double delta_log_target, double log_q_ratio) -> double {
  if (std::isnan(delta_log_target)) return 0.0;
  auto log_alpha = delta_log_target + log_q_ratio;
  if (log_alpha >= 0.0) return 1.0;
  return std::exp(log_alpha);
}

auto accept(double current_log_target, double proposed_log_target, double log_q_ratio, Rng& rng)
    -> Accept_result {
  if (proposed_log_target == kNegInf) return {false, 0.0};
  if (current_log_target == kNegInf) return {true, 1.0};
  auto alpha = acceptance_probability(proposed_log_target - current_log_target, log_q_ratio);
  if (alpha >= 1.0) return {true, 1.0};
  return {rng.uniform() < alpha, alpha};
}

auto initial_params(const PriorSpec& priors, const SamplerConfig& cfg) -> ModelParams {
  if (cfg.initial_theta) {
    auto theta = *cfg.initial_theta;
    theta.distance_family = cfg.distance_family;
    return theta;
  }
  auto theta = ModelParams{};
  theta.p = priors.p.mean();
  theta.z = priors.z.mean();
  theta.gamma = priors.gamma.mean();
  theta.gamma_G = priors.gamma_G.mean();
  theta.c = priors.c.mean();
  theta.beta = 0.01;
  theta.k = 1.0;
  theta.distance_family = cfg.distance_family;
  return theta;
}

auto update_params(const Model_stats& stats, const ModelParams& theta, const PriorSpec& priors,
                   const SamplerConfig& cfg, Rng& rng,
                   std::array<Param_counters, kNumMhParams>* counters) -> ModelParams {
  auto next = theta;
  auto use_data = cfg.data_free ? 0.0 : 1.0;
  const auto& tx = stats.transmission;

  next.p = rng.beta(priors.p.a + use_data * tx.num_imported,
                    priors.p.b + use_data * (tx.num_patients - tx.num_imported));
  next.z = rng.beta(priors.z.a + use_data * stats.screens.tp,
                    priors.z.b + use_data * stats.screens.fn_);

  next.beta = update_positive(
      next.beta, cfg.mh_step_sizes.log_beta, priors.beta,
      [&](double b) { return cfg.data_free ? 0.0 : transmission_beta_log_lik(tx, b); }, rng,
      counter_at(counters, Mh_param::beta));

  auto genetic = [&](const ModelParams& t) {
    return cfg.data_free ? 0.0 : genetic_log_lik(stats.genetic, t, cfg.model);
  };
  auto with = [&](auto field, double value) {
    auto t = next;
    t.*field = value;
    return t;
  };
  auto gibbs_genetic = cfg.model == Genetic_model::importation_structure &&
                       theta.distance_family == Distance_family::geometric;

  if (gibbs_genetic) {
    auto within = Distance_bin{};
    for (const auto& b : stats.genetic.within) within.add(b);
    next.gamma = rng.beta(priors.gamma.a + use_data * within.pairs,
                          priors.gamma.b + use_data * within.sum_snps);
    next.gamma_G = rng.beta(priors.gamma_G.a + use_data * stats.genetic.between.pairs,
                            priors.gamma_G.b + use_data * stats.genetic.between.sum_snps);
  } else {
    next.gamma = update_unit(
        next.gamma, cfg.mh_step_sizes.logit_gamma, priors.gamma,
        [&](double g) { return genetic(with(&ModelParams::gamma, g)); }, rng,
        counter_at(counters, Mh_param::gamma));
    next.gamma_G = update_unit(
        next.gamma_G, cfg.mh_step_sizes.logit_gamma_G, priors.gamma_G,
        [&](double g) { return genetic(with(&ModelParams::gamma_G, g)); }, rng,
        counter_at(counters, Mh_param::gamma_G));
  }

  if (cfg.model == Genetic_model::transmission_diversity) {
    next.k = update_positive(
        next.k, cfg.mh_step_sizes.log_k, priors.k,
        [&](double k) { return genetic(with(&ModelParams::k, k)); }, rng,
        counter_at(counters, Mh_param::k));
  } else {
    next.c = rng.beta(priors.c.a + use_data * stats.num_groups,
                      priors.c.b + use_data * (tx.num_imported - stats.num_groups));
  }
  return next;
}

auto update_params(const AugmentedState& state, const ModelParams& theta, const PriorSpec& priors,
                   const SamplerConfig& cfg, Rng& rng) -> ModelParams {
  auto stats = compute_stats(state, Pair_index{state.data()}, options_for(cfg));
  return update_params(stats, theta, priors, cfg, rng);
}

Chain::Chain(const Dataset& d, const PriorSpec& priors, const SamplerConfig& cfg)
    : data_{&d},
      priors_{priors},
      cfg_{cfg},
      settings_{settings_for(cfg)},
      options_{options_for(cfg)},
      pairs_{d},
      rng_{cfg.seed},
      state_{initial_state(d)},
      theta_{initial_params(priors, cfg)} {
  priors_.validate();
  cfg_.validate();
  if (settings_.full_augmentation) {
    for (auto j : phantom_patients(state_)) draw_phantom_row(state_, j, settings_, rng_);
  }
  stats_ = compute_stats(state_, pairs_, options_);
  log_lik_ = txtree::log_likelihood(stats_, theta_, options_);
  if (log_lik_ == kNegInf || std::isnan(log_lik_)) {
    throw Initialization_error{"observed data admit no state with positive likelihood"};
  }
  if (log_prior(theta_, priors_, cfg_.model) == kNegInf) {
    throw Initialization_error{"initial parameters have zero prior density"};
  }
}

auto Chain::log_posterior() const -> double {
  return log_lik_ + log_prior(theta_, priors_, cfg_.model);
}

void Chain::step() {
  ++iteration_;
  auto moves = applicable_moves(state_, settings_);
  if (!moves.empty()) {
    auto kind = moves[rng_.uniform_int(0, static_cast<int>(moves.size()) - 1)];
    auto& counter = moves_[static_cast<int>(kind)];
    ++counter.attempted;
    auto proposal = propose(kind, state_, settings_, rng_);
    if (!proposal.state) {
      ++counter.rejected_outright;
    } else {
      // The applicable set depends on the state, so the move-selection probabilities enter
      // the proposal ratio.
      auto reverse_moves = applicable_moves(*proposal.state, settings_).size();
      auto log_q = proposal.log_q_ratio + std::log(static_cast<double>(moves.size())) -
                   std::log(static_cast<double>(reverse_moves));
      auto next_stats = compute_stats(*proposal.state, pairs_, options_);
      auto next_ll = txtree::log_likelihood(next_stats, theta_, options_);
      if (accept(log_lik_, next_ll, log_q, rng_).accepted) {
        ++counter.accepted;
        state_ = std::move(*proposal.state);
        stats_ = std::move(next_stats);
        log_lik_ = next_ll;
        if (cfg_.validate_every_move) {
          auto violations = validate(state_, *data_);
          if (!violations.empty()) {
            throw std::logic_error{"invalid state after " + std::string{to_string(kind)} + ": " +
                                   violations.front().message};
          }
        }
      } else {
        ++counter.rejected;
      }
    }
  }
  theta_ = update_params(stats_, theta_, priors_, cfg_, rng_, &params_);
  log_lik_ = txtree::log_likelihood(stats_, theta_, options_);
}

auto is_retained(long iteration, const SamplerConfig& cfg) -> bool {
  return iteration > cfg.burn_in && (iteration - cfg.burn_in) % cfg.thin == 0;
}

auto run_chain(const Dataset& d, Genetic_model model, const PriorSpec& priors,
               const SamplerConfig& cfg) -> PosteriorTrace {
  auto config = cfg;
  config.model = model;
  auto chain = Chain{d, priors, config};
  auto trace = PosteriorTrace{};
  trace.model = model;
  for (const auto& e : d.episodes) trace.patient_ids.push_back(e.patient_id);
  trace.samples.reserve(std::max(0L, (config.iterations - config.burn_in) / config.thin));
  for (long i = 1; i <= config.iterations; ++i) {
    chain.step();
    if (is_retained(i, config)) {
      trace.samples.push_back({i, chain.theta(), chain.log_posterior(), snapshot(chain.state())});
    }
  }
  trace.moves = chain.move_counters();
  trace.params = chain.param_counters();
  return trace;
}

auto run_chains(const Dataset& d, Genetic_model model, const PriorSpec& priors,
                const SamplerConfig& cfg, int chains, int workers) -> std::vector<PosteriorTrace> {
  auto traces = std::vector<PosteriorTrace>(std::max(0, chains));
  auto next = std::atomic<int>{0};
  auto errors = std::vector<std::exception_ptr>(traces.size());
  auto work = [&] {
    for (auto c = next++; c < chains; c = next++) {
      try {
        auto config = cfg;
        config.seed = c == 0 ? cfg.seed : derive_seed(cfg.seed, static_cast<std::uint64_t>(c));
        traces[c] = run_chain(d, model, priors, config);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  auto pool = std::vector<std::thread>{};
  auto n_workers = std::clamp(workers, 1, std::max(1, chains));
  for (auto w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return traces;
}

auto merge_traces(const std::vector<PosteriorTrace>& traces) -> PosteriorTrace {
  auto out = PosteriorTrace{};
  if (traces.empty()) return out;
  out.model = traces.front().model;
  out.patient_ids = traces.front().patient_ids;
  for (const auto& t : traces) {
    out.samples.insert(out.samples.end(), t.samples.begin(), t.samples.end());
    for (auto m = 0; m < kNumMoveKinds; ++m) {
      out.moves[m].attempted += t.moves[m].attempted;
      out.moves[m].accepted += t.moves[m].accepted;
      out.moves[m].rejected_outright += t.moves[m].rejected_outright;
      out.moves[m].rejected += t.moves[m].rejected;
    }
    for (auto p = 0; p < kNumMhParams; ++p) {
      out.params[p].attempted += t.params[p].attempted;
      out.params[p].accepted += t.params[p].accepted;
    }
  }
  return out;
}

}  // namespace txtree
