#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "txtree/data_model.h"
#include "txtree/mcmc.h"
#include "txtree/simulate.h"

namespace txtree {

class Empty_trace_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Edge_key = std::pair<Patient, Patient>;  // (source, recipient)

struct PosteriorTree {
  std::vector<std::string> patient_ids;
  long samples = 0;
  std::map<Edge_key, double> edges;
  std::vector<double> import_prob;
  std::vector<double> colonized_prob;
  std::map<std::pair<Patient, Patient>, double> group_cooccurrence;  // a < b, importation structure

  auto never_colonized_prob(Patient j) const -> double { return 1.0 - colonized_prob[j]; }
  auto weighted_edges() const -> std::vector<Weighted_edge>;
};

auto summarize_trace(const PosteriorTrace& trace) -> PosteriorTree;

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (false positive rate, true positive rate)
  double auc = 0.0;
  int positives = 0;
  int negatives = 0;
};

// Candidate pairs scored by the ROC: ordered pairs (a, b) of truly colonized patients whose
// episodes overlap, so that a could have infected b under some assignment of colonization
// times. True transmission edges are the positives; all other candidates are negatives.
auto roc_candidates(const SimulatedTruth& truth) -> std::vector<Edge_key>;

// Equal weights form one threshold step. Edges outside the candidate set are ignored and
// candidates without an edge score 0.
auto roc(const std::vector<Weighted_edge>& edges, const SimulatedTruth& truth) -> RocCurve;
auto roc(const PosteriorTree& tree, const SimulatedTruth& truth) -> RocCurve;

// Curve for arbitrary labelled scores (higher = more likely positive).
auto roc_from_scores(std::vector<std::pair<double, bool>> scored) -> RocCurve;

// Per-patient posterior probability of sharing a group with the true founder of its group.
// Entries for patients never colonized in the truth are NaN.
auto group_recovery(const PosteriorTrace& trace, const SimulatedTruth& truth)
    -> std::vector<double>;

struct Network_summary {
  std::vector<double> secondary_distribution;   // P(a colonized patient has k secondary cases)
  std::vector<double> chain_size_distribution;  // P(a chain has s members)
  std::vector<double> mean_secondary;           // per patient, over samples where colonized
  std::vector<double> fraction_with_secondary;  // per sample
  double mean_fraction_with_secondary = 0.0;
};

auto network_summaries(const PosteriorTrace& trace) -> Network_summary;

struct Ppc_config {
  int draws = 200;  // retained samples used, evenly spaced
  std::uint64_t seed = 1;
  Genetic_model model = Genetic_model::transmission_diversity;
  double level = 0.95;
};

struct Ppc_statistic {
  std::string name;
  double observed = 0.0;
  std::vector<double> predicted;
  double lower = 0.0;
  double upper = 0.0;
  bool covered = false;
};

struct Ppc_result {
  std::vector<Ppc_statistic> statistics;  // importations, acquisitions, mean pairwise diversity
  auto all_covered() const -> bool;
};

struct Observed_statistics {
  int importations = 0;  // first screen positive
  int acquisitions = 0;  // a negative screen followed by a positive one
  double mean_diversity = 0.0;  // NaN with fewer than two isolates
};

auto observed_statistics(const Dataset& d) -> Observed_statistics;

auto posterior_predictive(const PosteriorTrace& trace, const Dataset& d, const Ppc_config& cfg)
    -> Ppc_result;

}  // namespace txtree
