#include "txtree/moves.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace txtree {

namespace {

constexpr auto kNegInf = -std::numeric_limits<double>::infinity();

auto weights_of(const Move_settings& s) -> Route_weights {
  return {s.w, s.w_prime, s.grouped()};
}

auto rejected(Move_kind kind, Patient j) -> Proposal {
  return Proposal{kind, j, std::nullopt, 0.0};
}

// True when j founds a group that some other importation has joined.
auto founder_in_use(const AugmentedState& state, Patient j) -> bool {
  if (!state.imported(j) || state.group(j) != j) return false;
  for (auto i = 0; i < state.num_patients(); ++i) {
    if (i != j && state.imported(i) && state.group(i) == j) return true;
  }
  return false;
}

auto geometric_log_pmf(int snps, double q) -> double {
  return std::log(q) + snps * std::log1p(-q);
}

// A freshly drawn route for j together with the chosen source (acquisitions) or group.
struct Drawn_route {
  Route_choice choice;
  int day = 0;
  Patient source = kImported;
  int group = kNoGroup;
};

// Draws a configuration for j from the common proposal: importation with probability w
// (joining an existing group with probability w′ when grouping is on), else an acquisition on a
// uniform day in [t^a_j, last_day] from a uniform available source.
auto draw_route(const AugmentedState& state, Patient j, int last_day, const Route_weights& weights,
                Rng& rng) -> std::optional<Drawn_route> {
  const auto& e = state.data().episodes[j];
  auto out = Drawn_route{};
  if (rng.bernoulli(weights.w)) {
    out.day = e.admit_day;
    if (weights.grouped && rng.bernoulli(weights.w_prime)) {
      auto pool = cluster_pool(state, j);
      if (pool.empty()) return std::nullopt;
      auto member = rng.pick(std::span<const Patient>{pool});
      out.group = state.group(member);
      auto members = 0;
      for (auto i : pool) members += state.group(i) == out.group;
      out.choice = {Route_kind::clustered_importation, 0, 0, members, static_cast<int>(pool.size())};
    } else {
      out.group = j;
      out.choice = {Route_kind::new_group_importation, 0, 0, 0, 0};
    }
    return out;
  }
  if (last_day < e.admit_day) return std::nullopt;
  out.day = rng.uniform_int(e.admit_day, last_day);
  auto sources = available_sources(state, j, out.day);
  if (sources.empty()) return std::nullopt;
  out.source = rng.pick(std::span<const Patient>{sources});
  out.group = state.group(out.source);
  out.choice = {Route_kind::acquisition, last_day - e.admit_day + 1,
                static_cast<int>(sources.size()), 0, 0};
  return out;
}

void apply_route(AugmentedState& state, Patient j, const Drawn_route& r) {
  if (r.source == kImported) {
    state.set_importation(j, r.group);
  } else {
    state.set_acquisition(j, r.day, r.source, r.group);
  }
  state.relabel_subtree(j, r.group);
}

auto related(const AugmentedState& state, Patient a, Patient b) -> bool {
  return state.group(a) == state.group(b);
}

}  // namespace

auto to_string(Move_kind kind) -> std::string_view {
  switch (kind) {
    case Move_kind::change_route: return "change_route";
    case Move_kind::add: return "add";
    case Move_kind::remove: return "remove";
    case Move_kind::change_phantom: return "change_phantom";
  }
  return "unknown";
}

auto route_log_prob(const Route_choice& route, const Route_weights& weights) -> double {
  switch (route.kind) {
    case Route_kind::acquisition:
      return std::log1p(-weights.w) - std::log(route.window) - std::log(route.sources);
    case Route_kind::new_group_importation:
      return std::log(weights.w) + (weights.grouped ? std::log1p(-weights.w_prime) : 0.0);
    case Route_kind::clustered_importation:
      return std::log(weights.w) + std::log(weights.w_prime) + std::log(route.group_members) -
             std::log(route.cluster_pool);
  }
  return kNegInf;
}

auto change_route_log_q(const Route_choice& from, const Route_choice& to,
                        const Route_weights& weights) -> double {
  return route_log_prob(from, weights) - route_log_prob(to, weights);
}

auto add_log_q(int negatives_before, int removable_after, const Route_choice& added,
               const Route_weights& weights, double log_m) -> double {
  return std::log(negatives_before) - std::log(removable_after) - route_log_prob(added, weights) -
         log_m;
}

auto remove_log_q(int removable_before, int negatives_after, const Route_choice& removed,
                  const Route_weights& weights, double log_m) -> double {
  return std::log(removable_before) - std::log(negatives_after) + route_log_prob(removed, weights) +
         log_m;
}

auto negative_patients(const AugmentedState& state) -> std::vector<Patient> {
  auto out = std::vector<Patient>{};
  const auto& d = state.data();
  for (auto j = 0; j < state.num_patients(); ++j) {
    if (!state.colonized(j) && !d.has_positive(j)) out.push_back(j);
  }
  return out;
}

auto removable_patients(const AugmentedState& state) -> std::vector<Patient> {
  auto out = std::vector<Patient>{};
  for (auto j = 0; j < state.num_patients(); ++j) {
    if (state.added_by_sampler(j) && state.offspring_count(j) == 0) out.push_back(j);
  }
  return out;
}

auto phantom_patients(const AugmentedState& state) -> std::vector<Patient> {
  auto out = std::vector<Patient>{};
  const auto& d = state.data();
  for (auto j = 0; j < state.num_patients(); ++j) {
    if (state.colonized(j) && d.has_positive(j) && !d.is_sequenced(j)) out.push_back(j);
  }
  return out;
}

auto cluster_pool(const AugmentedState& state, Patient j) -> std::vector<Patient> {
  auto out = std::vector<Patient>{};
  const auto& eps = state.data().episodes;
  for (auto i = 0; i < state.num_patients(); ++i) {
    if (i != j && state.imported(i) && eps[i].admit_day < eps[j].admit_day) out.push_back(i);
  }
  return out;
}

auto available_sources(const AugmentedState& state, Patient j, int day) -> std::vector<Patient> {
  auto out = std::vector<Patient>{};
  for (auto i = 0; i < state.num_patients(); ++i) {
    if (i != j && state.can_transmit(i, day)) out.push_back(i);
  }
  return out;
}

auto current_route(const AugmentedState& state, Patient j, const Route_weights& weights)
    -> Route_choice {
  const auto& d = state.data();
  if (state.acquired(j)) {
    auto tc = state.col_day(j);
    auto sources = state.census().at(tc) - (state.can_transmit(j, tc) ? 1 : 0);
    auto window = last_colonization_day(state, d, j) - d.episodes[j].admit_day + 1;
    return {Route_kind::acquisition, window, sources, 0, 0};
  }
  if (!state.imported(j)) throw std::logic_error{"current_route: patient not colonized"};
  if (!weights.grouped || state.group(j) == j) return {Route_kind::new_group_importation, 0, 0, 0, 0};
  auto pool = cluster_pool(state, j);
  auto members = 0;
  for (auto i : pool) members += state.group(i) == state.group(j);
  return {Route_kind::clustered_importation, 0, 0, members, static_cast<int>(pool.size())};
}

auto applicable_moves(const AugmentedState& state, const Move_settings& settings)
    -> std::vector<Move_kind> {
  auto any_colonized = false;
  auto any_negative = false;
  auto any_removable = false;
  auto any_phantom = false;
  const auto& d = state.data();
  for (auto j = 0; j < state.num_patients(); ++j) {
    if (state.colonized(j)) {
      any_colonized = true;
      if (!d.has_positive(j)) {
        any_removable = any_removable || state.offspring_count(j) == 0;
      } else if (!d.is_sequenced(j)) {
        any_phantom = true;
      }
    } else if (!d.has_positive(j)) {
      any_negative = true;
    }
  }
  auto out = std::vector<Move_kind>{};
  if (any_colonized) out.push_back(Move_kind::change_route);
  if (any_negative) out.push_back(Move_kind::add);
  if (any_removable) out.push_back(Move_kind::remove);
  if (settings.full_augmentation && any_phantom) out.push_back(Move_kind::change_phantom);
  return out;
}

auto phantom_row_log_prob(const AugmentedState& state, Patient j, const Move_settings& settings)
    -> double {
  const auto& d = state.data();
  auto pmf = [&](int snps, Patient other) {
    return geometric_log_pmf(snps, related(state, j, other) ? settings.phantom_gamma
                                                            : settings.phantom_gamma_G);
  };
  auto lp = 0.0;
  const auto& row = state.phantoms.to_observed(j);
  for (auto x = 0; x < d.num_isolates(); ++x) lp += pmf(row[x], d.isolates[x].host);
  for (auto i : state.phantoms.hosts()) {
    if (i != j) lp += pmf(state.phantoms.between(i, j), i);
  }
  return lp;
}

auto draw_phantom_row(AugmentedState& state, Patient j, const Move_settings& settings, Rng& rng)
    -> double {
  const auto& d = state.data();
  auto lp = 0.0;
  auto draw = [&](Patient other) {
    auto q = related(state, j, other) ? settings.phantom_gamma : settings.phantom_gamma_G;
    auto snps = rng.geometric(q);
    lp += geometric_log_pmf(snps, q);
    return snps;
  };
  auto row = std::vector<int>(d.num_isolates());
  for (auto x = 0; x < d.num_isolates(); ++x) row[x] = draw(d.isolates[x].host);
  auto others = std::vector<std::pair<Patient, int>>{};
  for (auto i : state.phantoms.hosts()) {
    if (i != j) others.emplace_back(i, draw(i));
  }
  state.phantoms.set(j, std::move(row), others);
  return lp;
}

auto move_change_route(const AugmentedState& state, const Move_settings& settings, Rng& rng)
    -> Proposal {
  auto candidates = state.colonized_patients();
  if (candidates.empty()) return rejected(Move_kind::change_route, -1);
  auto j = rng.pick(std::span<const Patient>{candidates});
  auto weights = weights_of(settings);
  auto from = current_route(state, j, weights);
  auto last = last_colonization_day(state, state.data(), j);
  auto drawn = draw_route(state, j, last, weights, rng);
  if (!drawn) return rejected(Move_kind::change_route, j);
  // A founder that other importations have joined must stay the root of its own group.
  if (drawn->choice.kind != Route_kind::new_group_importation && founder_in_use(state, j)) {
    return rejected(Move_kind::change_route, j);
  }
  auto next = state;
  apply_route(next, j, *drawn);
  return Proposal{Move_kind::change_route, j, std::move(next),
                  change_route_log_q(from, drawn->choice, weights)};
}

auto move_add(const AugmentedState& state, const Move_settings& settings, Rng& rng) -> Proposal {
  auto candidates = negative_patients(state);
  if (candidates.empty()) return rejected(Move_kind::add, -1);
  auto j = rng.pick(std::span<const Patient>{candidates});
  auto weights = weights_of(settings);
  auto drawn = draw_route(state, j, state.data().episodes[j].discharge_day, weights, rng);
  if (!drawn) return rejected(Move_kind::add, j);
  auto next = state;
  apply_route(next, j, *drawn);
  auto log_m = settings.full_augmentation ? draw_phantom_row(next, j, settings, rng) : 0.0;
  auto removable_after = static_cast<int>(removable_patients(next).size());
  return Proposal{Move_kind::add, j, std::move(next),
                  add_log_q(static_cast<int>(candidates.size()), removable_after, drawn->choice,
                            weights, log_m)};
}

auto move_remove(const AugmentedState& state, const Move_settings& settings, Rng& rng)
    -> Proposal {
  auto candidates = removable_patients(state);
  if (candidates.empty()) return rejected(Move_kind::remove, -1);
  auto j = rng.pick(std::span<const Patient>{candidates});
  if (founder_in_use(state, j)) return rejected(Move_kind::remove, j);
  auto weights = weights_of(settings);
  auto removed = current_route(state, j, weights);
  auto log_m = (settings.full_augmentation && state.phantoms.has(j))
                   ? phantom_row_log_prob(state, j, settings)
                   : 0.0;
  auto next = state;
  next.clear(j);
  next.phantoms.erase(j);
  auto negatives_after = static_cast<int>(negative_patients(next).size());
  return Proposal{Move_kind::remove, j, std::move(next),
                  remove_log_q(static_cast<int>(candidates.size()), negatives_after, removed,
                               weights, log_m)};
}

auto move_change_phantom(const AugmentedState& state, const Move_settings& settings, Rng& rng)
    -> Proposal {
  auto candidates = phantom_patients(state);
  if (!settings.full_augmentation || candidates.empty()) {
    return rejected(Move_kind::change_phantom, -1);
  }
  auto j = rng.pick(std::span<const Patient>{candidates});
  auto old_lp = state.phantoms.has(j) ? phantom_row_log_prob(state, j, settings) : 0.0;
  auto next = state;
  auto new_lp = draw_phantom_row(next, j, settings, rng);
  return Proposal{Move_kind::change_phantom, j, std::move(next), old_lp - new_lp};
}

auto propose(Move_kind kind, const AugmentedState& state, const Move_settings& settings, Rng& rng)
    -> Proposal {
  switch (kind) {
    case Move_kind::change_route: return move_change_route(state, settings, rng);
    case Move_kind::add: return move_add(state, settings, rng);
    case Move_kind::remove: return move_remove(state, settings, rng);
    case Move_kind::change_phantom: return move_change_phantom(state, settings, rng);
  }
  throw std::logic_error{"unknown move kind"};
}

}  // namespace txtree
