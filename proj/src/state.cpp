#include "txtree/state.h"

#include <algorithm>
#include <cassert>

namespace txtree {

auto PhantomStore::hosts() const -> std::vector<Patient> {
  auto out = std::vector<Patient>{};
  out.reserve(to_observed_.size());
  for (const auto& [j, row] : to_observed_) out.push_back(j);
  return out;
}

auto PhantomStore::between(Patient i, Patient j) const -> int {
  return between_.at({std::min(i, j), std::max(i, j)});
}

void PhantomStore::set(Patient j, std::vector<int> to_observed,
                       const std::vector<std::pair<Patient, int>>& to_others) {
  erase(j);
  to_observed_[j] = std::move(to_observed);
  for (const auto& [i, snps] : to_others) between_[{std::min(i, j), std::max(i, j)}] = snps;
}

void PhantomStore::erase(Patient j) {
  if (to_observed_.erase(j) == 0) return;
  for (auto it = between_.begin(); it != between_.end();) {
    if (it->first.first == j || it->first.second == j) {
      it = between_.erase(it);
    } else {
      ++it;
    }
  }
}

AugmentedState::AugmentedState(const Dataset& d)
    : data_{&d},
      col_day_(d.num_patients(), kNever),
      source_(d.num_patients(), kUncolonized),
      group_(d.num_patients(), kNoGroup),
      offspring_(d.num_patients(), 0),
      census_{d.first_day, std::vector<int>(std::max(0, d.num_days()), 0)} {}

auto AugmentedState::transmit_start(Patient j) const -> int {
  if (source_[j] == kUncolonized) return kNever;
  if (source_[j] == kImported) return data_->episodes[j].admit_day;
  return col_day_[j] + 1;
}

void AugmentedState::add_census(Patient j, int delta) {
  auto start = transmit_start(j);
  if (start == kNever) return;
  auto end = data_->episodes[j].discharge_day;
  for (auto t = start; t <= end; ++t) census_.counts[t - census_.first_day] += delta;
}

void AugmentedState::set_importation(Patient j, int group) {
  clear(j);
  col_day_[j] = data_->episodes[j].admit_day;
  source_[j] = kImported;
  group_[j] = group;
  add_census(j, +1);
}

void AugmentedState::set_acquisition(Patient j, int day, Patient source, int group) {
  assert(source >= 0 && source != j);
  clear(j);
  col_day_[j] = day;
  source_[j] = source;
  group_[j] = group;
  ++offspring_[source];
  add_census(j, +1);
}

void AugmentedState::clear(Patient j) {
  if (!colonized(j)) return;
  add_census(j, -1);
  if (source_[j] >= 0) --offspring_[source_[j]];
  col_day_[j] = kNever;
  source_[j] = kUncolonized;
  group_[j] = kNoGroup;
}

auto AugmentedState::descendants(Patient j) const -> std::vector<Patient> {
  // An acquisition is colonized strictly after its source, except that an importation can
  // transmit on its admission day. One pass in order of colonization day therefore suffices.
  auto order = std::vector<Patient>{};
  for (auto i = 0; i < num_patients(); ++i) {
    if (i != j && acquired(i) && col_day_[i] >= col_day_[j]) order.push_back(i);
  }
  std::sort(order.begin(), order.end(),
            [&](Patient a, Patient b) { return col_day_[a] < col_day_[b]; });
  auto in_subtree = std::vector<char>(num_patients(), 0);
  in_subtree[j] = 1;
  auto out = std::vector<Patient>{};
  for (auto i : order) {
    if (in_subtree[source_[i]]) {
      in_subtree[i] = 1;
      out.push_back(i);
    }
  }
  return out;
}

void AugmentedState::relabel_subtree(Patient j, int group) {
  group_[j] = group;
  if (offspring_[j] == 0) return;
  for (auto i : descendants(j)) group_[i] = group;
}

auto AugmentedState::chain_root(Patient j) const -> Patient {
  auto steps = 0;
  while (source_[j] >= 0 && steps++ <= num_patients()) j = source_[j];
  return j;
}

auto AugmentedState::num_imported() const -> int {
  return static_cast<int>(std::count(source_.begin(), source_.end(), kImported));
}

auto AugmentedState::colonized_patients() const -> std::vector<Patient> {
  auto out = std::vector<Patient>{};
  for (auto j = 0; j < num_patients(); ++j) {
    if (colonized(j)) out.push_back(j);
  }
  return out;
}

auto host_tree_distance(const AugmentedState& state, Patient a, Patient b) -> int {
  if (a == b) return 0;
  auto path_a = std::vector<Patient>{a};
  while (state.acquired(path_a.back())) path_a.push_back(state.source(path_a.back()));
  auto steps_b = 0;
  for (auto y = b;; y = state.source(y), ++steps_b) {
    auto it = std::find(path_a.begin(), path_a.end(), y);
    if (it != path_a.end()) return static_cast<int>(it - path_a.begin()) + steps_b;
    if (!state.acquired(y)) return kInfinite;
  }
}

auto tree_distance(const AugmentedState& state, const IsolateRecord& x, const IsolateRecord& y)
    -> int {
  if (!state.colonized(x.host) || !state.colonized(y.host)) {
    throw std::logic_error{"tree_distance: isolate host not colonized"};
  }
  return host_tree_distance(state, x.host, y.host);
}

auto census(const AugmentedState& state, const Dataset& d) -> ColonizedCensus {
  auto c = ColonizedCensus{d.first_day, std::vector<int>(std::max(0, d.num_days()), 0)};
  for (auto j = 0; j < d.num_patients(); ++j) {
    if (!state.colonized(j)) continue;
    for (auto t = state.transmit_start(j); t <= d.episodes[j].discharge_day; ++t) {
      ++c.counts[t - d.first_day];
    }
  }
  return c;
}

auto last_colonization_day(const AugmentedState& state, const Dataset& d, Patient j) -> int {
  auto last = std::min(d.episodes[j].discharge_day, d.first_positive_day[j]);
  if (state.offspring_count(j) > 0) {
    for (auto i = 0; i < state.num_patients(); ++i) {
      if (state.source(i) == j) last = std::min(last, state.col_day(i) - 1);
    }
  }
  return last;
}

auto validate(const AugmentedState& state, const Dataset& d) -> std::vector<Violation> {
  auto out = std::vector<Violation>{};
  auto report = [&](Violation_kind kind, Patient j, std::string msg) {
    out.push_back({kind, j, "patient '" + d.episodes[j].patient_id + "': " + std::move(msg)});
  };
  auto n = d.num_patients();
  auto offspring = std::vector<int>(n, 0);

  for (auto j = 0; j < n; ++j) {
    const auto& e = d.episodes[j];
    if (!state.colonized(j)) {
      if (state.col_day(j) != kNever || state.group(j) != kNoGroup) {
        report(Violation_kind::import_flag, j, "uncolonized but carries a day or group");
      }
      if (d.has_positive(j)) report(Violation_kind::false_positive, j, "positive screen while never colonized");
      continue;
    }
    auto tc = state.col_day(j);
    if (!e.present(tc)) {
      report(Violation_kind::outside_episode, j, "colonization day outside episode");
    }
    if (tc > d.first_positive_day[j]) {
      report(Violation_kind::false_positive, j, "colonized after first positive screen");
    }
    if (state.imported(j)) {
      if (tc != e.admit_day) report(Violation_kind::import_flag, j, "importation not on admission day");
      auto g = state.group(j);
      if (g != j) {
        if (g < 0 || g >= n || !state.imported(g) || state.group(g) != g) {
          report(Violation_kind::group, j, "clustered importation joins a non-founder group");
        } else if (d.episodes[g].admit_day >= e.admit_day) {
          report(Violation_kind::group, j, "clustered importation joins a later group founder");
        }
      }
    } else {
      auto s = state.source(j);
      if (s < 0 || s >= n || s == j || !state.colonized(s)) {
        report(Violation_kind::source_not_colonized, j, "source is not a colonized patient");
        continue;
      }
      ++offspring[s];
      if (!state.can_transmit(s, tc)) {
        report(Violation_kind::source_timing, j, "source cannot transmit on the colonization day");
      }
      if (state.group(j) != state.group(s)) {
        report(Violation_kind::group, j, "group differs from source");
      }
    }
    // Cycle check: following sources must hit an importation within n steps.
    auto y = j;
    auto steps = 0;
    while (state.acquired(y) && steps <= n) {
      y = state.source(y);
      ++steps;
    }
    if (steps > n) report(Violation_kind::cycle, j, "source chain does not reach an importation");
  }

  for (auto j = 0; j < n; ++j) {
    if (offspring[j] != state.offspring_count(j)) {
      report(Violation_kind::offspring_mismatch, j, "cached offspring count stale");
    }
  }
  if (census(state, d) != state.census()) {
    out.push_back({Violation_kind::census_mismatch, -1, "incremental census differs from recompute"});
  }
  for (auto j : state.phantoms.hosts()) {
    if (!state.colonized(j) || d.is_sequenced(j)) {
      report(Violation_kind::phantom, j, "phantom distances on a sequenced or uncolonized host");
    } else if (static_cast<int>(state.phantoms.to_observed(j).size()) != d.num_isolates()) {
      report(Violation_kind::phantom, j, "phantom row has wrong length");
    }
  }
  return out;
}

auto initial_state(const Dataset& d) -> AugmentedState {
  auto state = AugmentedState{d};
  for (auto j = 0; j < d.num_patients(); ++j) {
    if (d.has_positive(j)) state.set_importation(j, j);
  }
  return state;
}

}  // namespace txtree
