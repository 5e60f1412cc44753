#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "txtree/data_model.h"

namespace txtree {

inline constexpr int kNever = std::numeric_limits<int>::max();       // t^c = ∞
inline constexpr int kInfinite = std::numeric_limits<int>::max();    // tree distance across chains
inline constexpr int kImported = -1;    // s_j = 0
inline constexpr int kUncolonized = -2; // s_j = ∞
inline constexpr int kNoGroup = -1;

// Imputed distances for a colonized host without a sequenced isolate: one entry per observed
// isolate plus one entry per other phantom host.
class PhantomStore {
 public:
  auto has(Patient j) const -> bool { return to_observed_.contains(j); }
  auto hosts() const -> std::vector<Patient>;
  auto size() const -> int { return static_cast<int>(to_observed_.size()); }
  auto to_observed(Patient j) const -> const std::vector<int>& { return to_observed_.at(j); }
  auto between(Patient i, Patient j) const -> int;

  // Installs j's row. `to_others` pairs each existing phantom host with its distance to j.
  void set(Patient j, std::vector<int> to_observed, const std::vector<std::pair<Patient, int>>& to_others);
  void erase(Patient j);
  void clear() { to_observed_.clear(), between_.clear(); }

  friend bool operator==(const PhantomStore&, const PhantomStore&) = default;

 private:
  std::map<Patient, std::vector<int>> to_observed_;
  std::map<std::pair<Patient, Patient>, int> between_;
};

// Per-day count C(t) of patients able to transmit, over the dataset's day range.
struct ColonizedCensus {
  int first_day = 0;
  std::vector<int> counts;

  auto at(int day) const -> int {
    auto i = day - first_day;
    return (i < 0 || i >= static_cast<int>(counts.size())) ? 0 : counts[i];
  }
  friend bool operator==(const ColonizedCensus&, const ColonizedCensus&) = default;
};

// The latent transmission forest {t^c, s, φ, g, Ψ^c}. Structural setters keep the census and
// offspring counts in step; group labels are the caller's responsibility (see relabel_subtree).
class AugmentedState {
 public:
  explicit AugmentedState(const Dataset& d);

  auto data() const -> const Dataset& { return *data_; }
  auto num_patients() const -> int { return static_cast<int>(col_day_.size()); }

  auto col_day(Patient j) const -> int { return col_day_[j]; }
  auto source(Patient j) const -> int { return source_[j]; }
  auto group(Patient j) const -> int { return group_[j]; }
  auto colonized(Patient j) const -> bool { return source_[j] != kUncolonized; }
  auto imported(Patient j) const -> bool { return source_[j] == kImported; }
  auto acquired(Patient j) const -> bool { return source_[j] >= 0; }
  auto offspring_count(Patient j) const -> int { return offspring_[j]; }
  auto added_by_sampler(Patient j) const -> bool {
    return colonized(j) && !data_->has_positive(j);
  }

  // First day j contributes to C(t): t^a for importations, t^c + 1 for acquisitions.
  auto transmit_start(Patient j) const -> int;
  auto can_transmit(Patient j, int day) const -> bool {
    return colonized(j) && transmit_start(j) <= day && day <= data_->episodes[j].discharge_day;
  }

  auto census() const -> const ColonizedCensus& { return census_; }

  void set_importation(Patient j, int group);
  void set_acquisition(Patient j, int day, Patient source, int group);
  void clear(Patient j);
  void set_group(Patient j, int group) { group_[j] = group; }

  // Assigns `group` to j and every descendant of j.
  void relabel_subtree(Patient j, int group);
  auto descendants(Patient j) const -> std::vector<Patient>;
  auto chain_root(Patient j) const -> Patient;

  PhantomStore phantoms;

  auto num_imported() const -> int;
  auto colonized_patients() const -> std::vector<Patient>;

 private:
  void add_census(Patient j, int delta);

  const Dataset* data_;
  std::vector<int> col_day_;
  std::vector<int> source_;
  std::vector<int> group_;
  std::vector<int> offspring_;
  ColonizedCensus census_;
};

// Number of transmission links between the hosts of two colonized patients; 0 for the same
// host, kInfinite when the hosts lie in different chains.
auto host_tree_distance(const AugmentedState& state, Patient a, Patient b) -> int;

auto tree_distance(const AugmentedState& state, const IsolateRecord& x, const IsolateRecord& y)
    -> int;

// Full recompute of C(t) from scratch.
auto census(const AugmentedState& state, const Dataset& d) -> ColonizedCensus;

// l_j: min of discharge, first positive screen, and (earliest offspring colonization − 1).
auto last_colonization_day(const AugmentedState& state, const Dataset& d, Patient j) -> int;

enum class Violation_kind {
  import_flag,
  source_not_colonized,
  source_timing,
  false_positive,
  cycle,
  group,
  outside_episode,
  census_mismatch,
  offspring_mismatch,
  phantom,
};

struct Violation {
  Violation_kind kind;
  Patient patient;
  std::string message;
};

auto validate(const AugmentedState& state, const Dataset& d) -> std::vector<Violation>;

// Every positive-screen patient imported as the founder of its own group.
auto initial_state(const Dataset& d) -> AugmentedState;

}  // namespace txtree
