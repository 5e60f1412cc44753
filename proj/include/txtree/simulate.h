#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "txtree/data_model.h"
#include "txtree/priors.h"
#include "txtree/random.h"
#include "txtree/state.h"

namespace txtree {

struct ScenarioConfig {
  int n_patients = 500;
  int horizon_days = 250;
  double mean_los = 7.0;    // D, Poisson mean length of stay
  int screen_interval = 3;  // x, days between screens
  ModelParams theta{0.05, 0.8, 0.005, 0.2, 0.05, 0.8, 0.2, Distance_family::geometric};
  Genetic_model model = Genetic_model::transmission_diversity;
  bool sequence_all_positives = true;  // otherwise only each patient's first positive screen
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

// The generating tree, one entry per patient (kNever / kUncolonized / kNoGroup when never
// colonized).
struct Truth_tree {
  std::vector<int> col_day;
  std::vector<int> source;
  std::vector<int> group;
};

struct SimulatedTruth {
  Dataset dataset;
  Truth_tree tree;

  // The generating tree as an AugmentedState referring to `dataset`.
  auto state() const -> AugmentedState;
};

auto simulate_outbreak(const ScenarioConfig& cfg) -> SimulatedTruth;

// Which positive screens yield a sequenced isolate.
struct Sequencing {
  enum class Kind { all_positive, first_positive, random } kind = Kind::all_positive;
  double probability = 1.0;  // random: each positive screen independently
};

// Forward simulation on a fixed schedule: admissions, discharges and screen days are taken from
// `schedule` (its screen results, isolates and distances are ignored).
auto simulate_on_schedule(const Dataset& schedule, const ModelParams& theta, Genetic_model model,
                          const Sequencing& sequencing, Rng& rng) -> SimulatedTruth;

// Draws every pairwise isolate distance from the model's pair distribution given the tree.
auto simulate_distances(const AugmentedState& state, const Dataset& d, const ModelParams& theta,
                        Genetic_model model, Rng& rng) -> DistanceMatrix;

struct Weighted_edge {
  Patient source;
  Patient recipient;
  double weight;
};

// Equal weight 1/C(t^c) on every patient able to transmit on each true acquisition day.
auto uninformed_tree(const SimulatedTruth& truth) -> std::vector<Weighted_edge>;

auto perturb_distances(const DistanceMatrix& m, double noise_mean, std::uint64_t seed)
    -> DistanceMatrix;

// recipient,source,col_day,import_flag,group for every colonized patient.
void write_truth_csv(const SimulatedTruth& truth, const std::filesystem::path& path);
auto read_truth_csv(const Dataset& d, const std::filesystem::path& path) -> Truth_tree;

}  // namespace txtree
