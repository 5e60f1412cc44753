#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "txtree/evaluate.h"
#include "txtree/mcmc.h"
#include "txtree/simulate.h"

namespace txtree {

// One row of the simulation study grid, with the published mean AUCs for comparison.
struct Table1_scenario {
  std::string name;
  std::string parameters;  // the values that differ from baseline
  ModelParams theta;
  double uninformed_auc = 0.0;
  double informed_auc = 0.0;
};

auto table1_scenarios() -> std::vector<Table1_scenario>;
auto find_table1_scenario(const std::string& name) -> Table1_scenario;  // throws std::out_of_range

// Seed of replicate r in the grid; independent of how many replicates are run.
auto replicate_seed(std::uint64_t base, int scenario, int replicate) -> std::uint64_t;

struct Replicate_result {
  SimulatedTruth truth;
  PosteriorTrace trace;
  double informed_auc = 0.0;
  double uninformed_auc = 0.0;
};

// Fit one simulated dataset and score it against its generating tree.
auto fit_replicate(SimulatedTruth truth, Genetic_model model, const PriorSpec& priors,
                   const SamplerConfig& sampler) -> Replicate_result;

// Calls body(i) for i in [0, n) on up to `workers` threads; the first exception is rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& body);

// Worker count from TXTREE_WORKERS, else the hardware concurrency.
auto default_workers() -> int;

// Mean ignoring NaN entries (replicates whose ROC is undefined); NaN if none remain.
auto nan_mean(const std::vector<double>& values) -> double;

struct Table1_row {
  Table1_scenario scenario;
  double uninformed_auc = 0.0;
  double informed_auc = 0.0;
  int replicates = 0;
};

auto table1_markdown(const std::vector<Table1_row>& rows) -> std::string;

}  // namespace txtree
