#pragma once

#include <stdexcept>
#include <vector>

#include "txtree/data_model.h"
#include "txtree/priors.h"
#include "txtree/state.h"

namespace txtree {

class Parameter_domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ScreenCounts {
  int tp = 0;
  int fn_ = 0;
  int fp = 0;
  friend bool operator==(const ScreenCounts&, const ScreenCounts&) = default;
};

// ---- Reference kernels, evaluated directly from a state ----

// log π(T|θ): importation Bernoulli terms, escape of every non-imported patient, and the
// per-acquisition term (1 − e^{−βC(t^c)}) / C(t^c).
auto transmission_log_lik(const AugmentedState& state, const ColonizedCensus& census,
                          const Dataset& d, const ModelParams& theta) -> double;

auto screen_counts(const AugmentedState& state, const Dataset& d) -> ScreenCounts;

// z^TP (1 − z)^FN, or −∞ when any false positive is present.
auto observation_log_lik(const ScreenCounts& counts, const ModelParams& theta) -> double;

// Geometric parameter for a pair at tree distance t (kInfinite across chains). May exceed 1.
auto td_parameter(int tree_distance, const ModelParams& theta) -> double;

// log pmf of `snps` under the family's distribution with geometric parameter q (Poisson: mean
// (1 − q)/q). q must lie in (0,1].
auto log_pmf(int snps, double q, Distance_family family) -> double;

auto pair_log_pmf_td(int snps, int tree_distance, const ModelParams& theta) -> double;
auto pair_log_pmf_is(int snps, bool same_group, const ModelParams& theta) -> double;

// Sums over all unordered isolate pairs; with include_phantoms, also every pair that involves
// an imputed phantom row.
auto genetic_log_lik_td(const AugmentedState& state, const Dataset& d, const ModelParams& theta,
                        bool include_phantoms = false) -> double;
auto genetic_log_lik_is(const AugmentedState& state, const Dataset& d, const ModelParams& theta,
                        bool include_phantoms = false) -> double;

// Number of distinct groups founded by importations.
auto count_groups(const AugmentedState& state) -> int;
auto grouping_log_lik(const AugmentedState& state, const ModelParams& theta) -> double;

struct Likelihood_options {
  Genetic_model model = Genetic_model::transmission_diversity;
  bool include_phantoms = false;
  bool data_free = false;  // every likelihood factor forced to zero (prior sampling)
};

auto total_log_posterior(const AugmentedState& state, const Dataset& d, const ModelParams& theta,
                         Genetic_model model, const PriorSpec& priors,
                         bool include_phantoms = false) -> double;

// ---- Sufficient statistics used by the sampler ----

struct Distance_bin {
  double pairs = 0.0;
  double sum_snps = 0.0;
  double sum_log_factorial = 0.0;  // Σ log(d!) for the Poisson family

  void add(int snps);
  void add(const Distance_bin& other);
  friend bool operator==(const Distance_bin&, const Distance_bin&) = default;
};

struct Transmission_stats {
  int num_patients = 0;
  int num_imported = 0;
  double escape_pressure = 0.0;          // Σ_i Σ_{escape days} C(t)
  std::vector<int> acquisitions_by_pressure;  // index C(t^c) -> number of acquisitions
  bool impossible = false;               // an acquisition day with C(t^c) = 0
};

struct Genetic_stats {
  std::vector<Distance_bin> within;  // tree distance t (td) or index 0 = same group (is)
  Distance_bin between;
};

struct Model_stats {
  Transmission_stats transmission;
  ScreenCounts screens;
  Genetic_stats genetic;
  int num_groups = 0;
};

// Static per-dataset aggregation of isolate pairs by host pair.
class Pair_index {
 public:
  explicit Pair_index(const Dataset& d);

  struct Host_pair {
    Patient a;
    Patient b;
    Distance_bin bin;
  };
  auto sequenced_hosts() const -> const std::vector<Patient>& { return hosts_; }
  auto within_host() const -> const Distance_bin& { return within_host_; }
  auto host_pairs() const -> const std::vector<Host_pair>& { return pairs_; }

 private:
  std::vector<Patient> hosts_;
  Distance_bin within_host_;
  std::vector<Host_pair> pairs_;
};

auto compute_stats(const AugmentedState& state, const Pair_index& pairs,
                   const Likelihood_options& options) -> Model_stats;

auto genetic_stats(const AugmentedState& state, const Pair_index& pairs,
                   const Likelihood_options& options) -> Genetic_stats;

auto transmission_log_lik(const Transmission_stats& s, const ModelParams& theta) -> double;
// The β-dependent part only (drops the p terms and the −log C(t^c) constants).
auto transmission_beta_log_lik(const Transmission_stats& s, double beta) -> double;
auto bin_log_lik(const Distance_bin& bin, double q, Distance_family family) -> double;
auto genetic_log_lik(const Genetic_stats& s, const ModelParams& theta, Genetic_model model)
    -> double;
auto grouping_log_lik(int num_groups, int num_imported, double c) -> double;

// log π(X,Ψ|T,θ) π(T|θ) (and π(g|θ) under importation structure); zero when data_free.
auto log_likelihood(const Model_stats& s, const ModelParams& theta,
                    const Likelihood_options& options) -> double;

}  // namespace txtree
