#pragma once

#include <filesystem>

#include "txtree/config.h"
#include "txtree/evaluate.h"
#include "txtree/mcmc.h"

namespace txtree {

// iteration,p,z,beta,gamma,gamma_G,k,c,log_post
void write_param_csv(const PosteriorTrace& trace, const std::filesystem::path& path);
// One JSON object per retained iteration: {"iteration", "tree": [{patient, col_day, source,
// import_flag, group}]}, with patient identifiers and null sources for importations.
void write_tree_jsonl(const PosteriorTrace& trace, const std::filesystem::path& path);
auto acceptance_json(const PosteriorTrace& trace) -> Json;

// params.csv, trees.jsonl, acceptance.json and trace_meta.json inside `dir`.
void write_trace(const PosteriorTrace& trace, const std::filesystem::path& dir);
auto read_trace(const std::filesystem::path& dir, const Dataset& d) -> PosteriorTrace;

auto state_to_json(const AugmentedState& state) -> Json;

void write_posterior_tree_csv(const PosteriorTree& tree, const std::filesystem::path& path);
void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

}  // namespace txtree
