#include "txtree/likelihood.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace txtree {

namespace {

constexpr auto kNegInf = -std::numeric_limits<double>::infinity();

// x log y with the 0 log 0 = 0 convention.
auto xlogy(double x, double y) -> double { return x == 0.0 ? 0.0 : x * std::log(y); }
auto xlog1py(double x, double y) -> double { return x == 0.0 ? 0.0 : x * std::log1p(y); }

// log(1 − e^{−x}) for x > 0.
auto log1mexp(double x) -> double {
  return x > 0.693 ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x));
}

void require_colonized(const AugmentedState& state, Patient j) {
  if (!state.colonized(j)) {
    throw std::logic_error{"isolate host '" + state.data().episodes[j].patient_id +
                           "' is not colonized"};
  }
}

// Ancestor path [j, s_j, s_{s_j}, ..., root].
auto root_path(const AugmentedState& state, Patient j) -> std::vector<Patient> {
  auto path = std::vector<Patient>{j};
  while (state.acquired(path.back())) path.push_back(state.source(path.back()));
  return path;
}

auto path_distance(const std::vector<Patient>& a, const std::vector<Patient>& b) -> int {
  if (a.back() != b.back()) return kInfinite;
  auto ia = a.size();
  auto ib = b.size();
  while (ia > 0 && ib > 0 && a[ia - 1] == b[ib - 1]) --ia, --ib;
  return static_cast<int>(ia + ib);
}

}  // namespace

auto transmission_log_lik(const AugmentedState& state, const ColonizedCensus& census,
                          const Dataset& d, const ModelParams& theta) -> double {
  auto ll = 0.0;
  auto n = d.num_patients();
  auto imported = 0;
  for (auto j = 0; j < n; ++j) {
    const auto& e = d.episodes[j];
    if (state.imported(j)) {
      ++imported;
      continue;
    }
    auto tc = state.col_day(j);
    auto last_escape = (tc == kNever) ? e.discharge_day : std::min(tc - 1, e.discharge_day);
    auto pressure = 0.0;
    for (auto t = e.admit_day; t <= last_escape; ++t) pressure += census.at(t);
    ll -= theta.beta * pressure;
    if (tc != kNever) {
      auto c = census.at(tc);
      if (c == 0) return kNegInf;
      ll += log1mexp(theta.beta * c) - std::log(c);
    }
  }
  ll += xlogy(imported, theta.p) + xlog1py(n - imported, -theta.p);
  return ll;
}

auto screen_counts(const AugmentedState& state, const Dataset& d) -> ScreenCounts {
  auto counts = ScreenCounts{};
  for (auto j = 0; j < d.num_patients(); ++j) {
    auto tc = state.col_day(j);
    for (const auto& s : d.episodes[j].screens) {
      auto detectable = tc != kNever && s.day >= tc;
      if (s.positive) {
        ++(detectable ? counts.tp : counts.fp);
      } else if (detectable) {
        ++counts.fn_;
      }
    }
  }
  return counts;
}

auto observation_log_lik(const ScreenCounts& counts, const ModelParams& theta) -> double {
  if (counts.fp > 0) return kNegInf;
  return xlogy(counts.tp, theta.z) + xlog1py(counts.fn_, -theta.z);
}

auto td_parameter(int tree_distance, const ModelParams& theta) -> double {
  if (tree_distance == kInfinite) return theta.gamma_G;
  return theta.gamma * std::pow(theta.k, tree_distance);
}

auto log_pmf(int snps, double q, Distance_family family) -> double {
  if (!(q > 0.0 && q <= 1.0)) {
    throw Parameter_domain_error{"distance parameter " + std::to_string(q) + " outside (0,1]"};
  }
  if (family == Distance_family::geometric) {
    return std::log(q) + xlog1py(snps, -q);
  }
  auto lambda = (1.0 - q) / q;
  if (lambda == 0.0) return snps == 0 ? 0.0 : kNegInf;
  return snps * std::log(lambda) - lambda - std::lgamma(snps + 1.0);
}

auto pair_log_pmf_td(int snps, int tree_distance, const ModelParams& theta) -> double {
  return log_pmf(snps, td_parameter(tree_distance, theta), theta.distance_family);
}

auto pair_log_pmf_is(int snps, bool same_group, const ModelParams& theta) -> double {
  return log_pmf(snps, same_group ? theta.gamma : theta.gamma_G, theta.distance_family);
}

namespace {

template <typename PairTerm>
auto sum_genetic_pairs(const AugmentedState& state, const Dataset& d, bool include_phantoms,
                       PairTerm&& term) -> double {
  auto ll = 0.0;
  auto n_s = d.num_isolates();
  for (auto x = 0; x < n_s; ++x) require_colonized(state, d.isolates[x].host);
  for (auto y = 1; y < n_s; ++y) {
    for (auto x = 0; x < y; ++x) {
      ll += term(d.distances.at(x, y), d.isolates[x].host, d.isolates[y].host);
    }
  }
  if (include_phantoms) {
    auto hosts = state.phantoms.hosts();
    for (size_t a = 0; a < hosts.size(); ++a) {
      auto j = hosts[a];
      const auto& row = state.phantoms.to_observed(j);
      for (auto x = 0; x < n_s; ++x) ll += term(row[x], j, d.isolates[x].host);
      for (size_t b = 0; b < a; ++b) ll += term(state.phantoms.between(j, hosts[b]), j, hosts[b]);
    }
  }
  return ll;
}

}  // namespace

auto genetic_log_lik_td(const AugmentedState& state, const Dataset& d, const ModelParams& theta,
                        bool include_phantoms) -> double {
  return sum_genetic_pairs(state, d, include_phantoms, [&](int snps, Patient a, Patient b) {
    return pair_log_pmf_td(snps, host_tree_distance(state, a, b), theta);
  });
}

auto genetic_log_lik_is(const AugmentedState& state, const Dataset& d, const ModelParams& theta,
                        bool include_phantoms) -> double {
  return sum_genetic_pairs(state, d, include_phantoms, [&](int snps, Patient a, Patient b) {
    return pair_log_pmf_is(snps, state.group(a) == state.group(b), theta);
  });
}

auto count_groups(const AugmentedState& state) -> int {
  auto groups = 0;
  for (auto j = 0; j < state.num_patients(); ++j) {
    if (state.imported(j) && state.group(j) == j) ++groups;
  }
  return groups;
}

auto grouping_log_lik(int num_groups, int num_imported, double c) -> double {
  return xlogy(num_groups, c) + xlog1py(num_imported - num_groups, -c);
}

auto grouping_log_lik(const AugmentedState& state, const ModelParams& theta) -> double {
  return grouping_log_lik(count_groups(state), state.num_imported(), theta.c);
}

auto total_log_posterior(const AugmentedState& state, const Dataset& d, const ModelParams& theta,
                         Genetic_model model, const PriorSpec& priors, bool include_phantoms)
    -> double {
  auto lp = log_prior(theta, priors, model);
  if (lp == kNegInf) return kNegInf;
  auto obs = observation_log_lik(screen_counts(state, d), theta);
  if (obs == kNegInf) return kNegInf;
  auto tx = transmission_log_lik(state, census(state, d), d, theta);
  if (tx == kNegInf) return kNegInf;
  auto genetic = 0.0;
  if (model == Genetic_model::transmission_diversity) {
    try {
      genetic = genetic_log_lik_td(state, d, theta, include_phantoms);
    } catch (const Parameter_domain_error&) {
      return kNegInf;
    }
  } else {
    genetic = genetic_log_lik_is(state, d, theta, include_phantoms) + grouping_log_lik(state, theta);
  }
  return lp + obs + tx + genetic;
}

// ---- Sufficient statistics ----

void Distance_bin::add(int snps) {
  pairs += 1.0;
  sum_snps += snps;
  sum_log_factorial += std::lgamma(snps + 1.0);
}

void Distance_bin::add(const Distance_bin& other) {
  pairs += other.pairs;
  sum_snps += other.sum_snps;
  sum_log_factorial += other.sum_log_factorial;
}

Pair_index::Pair_index(const Dataset& d) {
  auto host_slot = std::vector<int>(d.num_patients(), -1);
  for (auto j = 0; j < d.num_patients(); ++j) {
    if (d.is_sequenced(j)) {
      host_slot[j] = static_cast<int>(hosts_.size());
      hosts_.push_back(j);
    }
  }
  auto h = hosts_.size();
  auto grid = std::vector<Distance_bin>(h * h);
  for (auto y = 1; y < d.num_isolates(); ++y) {
    for (auto x = 0; x < y; ++x) {
      auto a = host_slot[d.isolates[x].host];
      auto b = host_slot[d.isolates[y].host];
      if (a == b) {
        within_host_.add(d.distances.at(x, y));
      } else {
        grid[std::min(a, b) * h + std::max(a, b)].add(d.distances.at(x, y));
      }
    }
  }
  for (size_t a = 0; a < h; ++a) {
    for (size_t b = a + 1; b < h; ++b) {
      if (grid[a * h + b].pairs > 0) pairs_.push_back({hosts_[a], hosts_[b], grid[a * h + b]});
    }
  }
}

namespace {

void add_to(Genetic_stats& s, int index, const Distance_bin& bin) {
  if (index == kInfinite) {
    s.between.add(bin);
    return;
  }
  if (static_cast<int>(s.within.size()) <= index) s.within.resize(index + 1);
  s.within[index].add(bin);
}

void add_to(Genetic_stats& s, int index, int snps) {
  auto bin = Distance_bin{};
  bin.add(snps);
  add_to(s, index, bin);
}

}  // namespace

auto genetic_stats(const AugmentedState& state, const Pair_index& pairs,
                   const Likelihood_options& options) -> Genetic_stats {
  auto s = Genetic_stats{};
  s.within.resize(1);
  s.within[0].add(pairs.within_host());
  auto td = options.model == Genetic_model::transmission_diversity;

  const auto& d = state.data();
  auto n = state.num_patients();
  auto paths = std::vector<std::vector<Patient>>(n);
  auto path_of = [&](Patient j) -> const std::vector<Patient>& {
    if (paths[j].empty()) paths[j] = root_path(state, j);
    return paths[j];
  };
  auto relation = [&](Patient a, Patient b) -> int {
    if (td) return path_distance(path_of(a), path_of(b));
    return state.group(a) == state.group(b) ? 0 : kInfinite;
  };

  for (auto j : pairs.sequenced_hosts()) require_colonized(state, j);
  for (const auto& hp : pairs.host_pairs()) add_to(s, relation(hp.a, hp.b), hp.bin);

  if (options.include_phantoms && state.phantoms.size() > 0) {
    auto hosts = state.phantoms.hosts();
    for (size_t a = 0; a < hosts.size(); ++a) {
      auto j = hosts[a];
      const auto& row = state.phantoms.to_observed(j);
      for (auto x = 0; x < d.num_isolates(); ++x) add_to(s, relation(j, d.isolates[x].host), row[x]);
      for (size_t b = 0; b < a; ++b) {
        add_to(s, relation(j, hosts[b]), state.phantoms.between(j, hosts[b]));
      }
    }
  }
  return s;
}

auto compute_stats(const AugmentedState& state, const Pair_index& pairs,
                   const Likelihood_options& options) -> Model_stats {
  const auto& d = state.data();
  auto s = Model_stats{};
  auto& tx = s.transmission;
  tx.num_patients = d.num_patients();

  const auto& counts = state.census().counts;
  auto prefix = std::vector<double>(counts.size() + 1, 0.0);
  for (size_t i = 0; i < counts.size(); ++i) prefix[i + 1] = prefix[i] + counts[i];
  auto first = d.first_day;

  for (auto j = 0; j < d.num_patients(); ++j) {
    const auto& e = d.episodes[j];
    if (state.imported(j)) {
      ++tx.num_imported;
      continue;
    }
    auto tc = state.col_day(j);
    auto last_escape = (tc == kNever) ? e.discharge_day : std::min(tc - 1, e.discharge_day);
    if (last_escape >= e.admit_day) {
      tx.escape_pressure += prefix[last_escape - first + 1] - prefix[e.admit_day - first];
    }
    if (tc != kNever) {
      auto c = counts[tc - first];
      if (c == 0) {
        tx.impossible = true;
      } else {
        if (static_cast<int>(tx.acquisitions_by_pressure.size()) <= c) {
          tx.acquisitions_by_pressure.resize(c + 1, 0);
        }
        ++tx.acquisitions_by_pressure[c];
      }
    }
  }

  s.screens = screen_counts(state, d);
  if (s.screens.fp == 0) s.genetic = genetic_stats(state, pairs, options);
  s.num_groups = count_groups(state);
  return s;
}

auto transmission_beta_log_lik(const Transmission_stats& s, double beta) -> double {
  if (s.impossible) return kNegInf;
  auto ll = -beta * s.escape_pressure;
  for (size_t c = 1; c < s.acquisitions_by_pressure.size(); ++c) {
    auto count = s.acquisitions_by_pressure[c];
    if (count == 0) continue;
    if (beta <= 0.0) return kNegInf;
    ll += count * log1mexp(beta * static_cast<double>(c));
  }
  return ll;
}

auto transmission_log_lik(const Transmission_stats& s, const ModelParams& theta) -> double {
  auto ll = transmission_beta_log_lik(s, theta.beta);
  if (ll == kNegInf) return kNegInf;
  for (size_t c = 1; c < s.acquisitions_by_pressure.size(); ++c) {
    ll -= s.acquisitions_by_pressure[c] * std::log(static_cast<double>(c));
  }
  return ll + xlogy(s.num_imported, theta.p) + xlog1py(s.num_patients - s.num_imported, -theta.p);
}

auto bin_log_lik(const Distance_bin& bin, double q, Distance_family family) -> double {
  if (bin.pairs == 0.0) return 0.0;
  if (!(q > 0.0 && q <= 1.0)) return kNegInf;
  if (family == Distance_family::geometric) {
    if (q == 1.0) return bin.sum_snps > 0 ? kNegInf : 0.0;
    return bin.pairs * std::log(q) + bin.sum_snps * std::log1p(-q);
  }
  auto lambda = (1.0 - q) / q;
  if (lambda == 0.0) return bin.sum_snps > 0 ? kNegInf : 0.0;
  return bin.sum_snps * std::log(lambda) - bin.pairs * lambda - bin.sum_log_factorial;
}

auto genetic_log_lik(const Genetic_stats& s, const ModelParams& theta, Genetic_model model)
    -> double {
  auto ll = bin_log_lik(s.between, theta.gamma_G, theta.distance_family);
  for (size_t t = 0; t < s.within.size() && ll != kNegInf; ++t) {
    auto q = model == Genetic_model::transmission_diversity
                 ? td_parameter(static_cast<int>(t), theta)
                 : theta.gamma;
    ll += bin_log_lik(s.within[t], q, theta.distance_family);
  }
  return ll;
}

auto log_likelihood(const Model_stats& s, const ModelParams& theta,
                    const Likelihood_options& options) -> double {
  if (options.data_free) return 0.0;
  auto obs = observation_log_lik(s.screens, theta);
  if (obs == kNegInf) return kNegInf;
  auto tx = transmission_log_lik(s.transmission, theta);
  if (tx == kNegInf) return kNegInf;
  auto genetic = genetic_log_lik(s.genetic, theta, options.model);
  if (options.model == Genetic_model::importation_structure) {
    genetic += grouping_log_lik(s.num_groups, s.transmission.num_imported, theta.c);
  }
  return obs + tx + genetic;
}

}  // namespace txtree
