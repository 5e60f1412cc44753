#include "txtree/simulate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "txtree/likelihood.h"

namespace txtree {

namespace {

auto make_id(char prefix, int index) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%04d", prefix, index + 1);
  return buf;
}

auto draw_distance(double q, Distance_family family, Rng& rng) -> int {
  if (!(q > 0.0 && q <= 1.0)) {
    throw Parameter_domain_error{"distance parameter " + std::to_string(q) + " outside (0,1]"};
  }
  if (family == Distance_family::geometric) return rng.geometric(q);
  return rng.poisson((1.0 - q) / q);
}

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument{"scenario: " + msg}; };
  if (n_patients < 1) fail("n_patients must be positive");
  if (horizon_days < 1) fail("horizon_days must be positive");
  if (!(mean_los > 0.0)) fail("mean_los must be positive");
  if (screen_interval < 1) fail("screen_interval must be at least 1");
  const auto& t = theta;
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(t.p) || !unit(t.z) || !unit(t.c)) fail("p, z and c must lie in [0,1]");
  if (!(t.beta >= 0.0)) fail("beta must be nonnegative");
  if (!(t.gamma > 0.0 && t.gamma <= 1.0) || !(t.gamma_G > 0.0 && t.gamma_G <= 1.0)) {
    fail("gamma and gamma_G must lie in (0,1]");
  }
  if (!(t.k >= 0.0)) fail("k must be nonnegative");
}

auto SimulatedTruth::state() const -> AugmentedState {
  auto s = AugmentedState{dataset};
  for (auto j = 0; j < dataset.num_patients(); ++j) {
    if (tree.source[j] == kImported) {
      s.set_importation(j, tree.group[j]);
    } else if (tree.source[j] >= 0) {
      s.set_acquisition(j, tree.col_day[j], tree.source[j], tree.group[j]);
    }
  }
  return s;
}

auto simulate_distances(const AugmentedState& state, const Dataset& d, const ModelParams& theta,
                        Genetic_model model, Rng& rng) -> DistanceMatrix {
  auto n_s = d.num_isolates();
  auto m = DistanceMatrix{n_s};
  for (auto y = 1; y < n_s; ++y) {
    for (auto x = 0; x < y; ++x) {
      auto a = d.isolates[x].host;
      auto b = d.isolates[y].host;
      auto q = model == Genetic_model::transmission_diversity
                   ? td_parameter(host_tree_distance(state, a, b), theta)
                   : (state.group(a) == state.group(b) ? theta.gamma : theta.gamma_G);
      // γk^τ can exceed 1 when k > 1; the limiting point mass at zero is used.
      m.set(x, y, draw_distance(std::min(q, 1.0), theta.distance_family, rng));
    }
  }
  return m;
}

auto simulate_outbreak(const ScenarioConfig& cfg) -> SimulatedTruth {
  cfg.validate();
  auto rng = Rng{cfg.seed};
  const auto& theta = cfg.theta;
  auto n = cfg.n_patients;

  struct Stay {
    int admit;
    int discharge;
  };
  auto stays = std::vector<Stay>(n);
  for (auto& s : stays) {
    s.admit = rng.uniform_int(0, cfg.horizon_days - 1);
    s.discharge = s.admit + rng.poisson(cfg.mean_los);
  }
  std::stable_sort(stays.begin(), stays.end(),
                   [](const Stay& a, const Stay& b) { return a.admit < b.admit; });
  auto shift = stays.front().admit;

  auto d = Dataset{};
  d.first_day = 0;
  d.last_day = 0;
  for (auto j = 0; j < n; ++j) {
    auto e = EpisodeRecord{make_id('P', j), stays[j].admit - shift, stays[j].discharge - shift, {}};
    d.last_day = std::max(d.last_day, e.discharge_day);
    d.episodes.push_back(std::move(e));
  }

  for (auto& e : d.episodes) {
    for (auto t = e.admit_day; t <= e.discharge_day; t += cfg.screen_interval) {
      e.screens.push_back({t, false});
    }
  }
  auto sequencing = Sequencing{cfg.sequence_all_positives ? Sequencing::Kind::all_positive
                                                          : Sequencing::Kind::first_positive};
  return simulate_on_schedule(d, theta, cfg.model, sequencing, rng);
}

auto simulate_on_schedule(const Dataset& schedule, const ModelParams& theta, Genetic_model model,
                          const Sequencing& sequencing, Rng& rng) -> SimulatedTruth {
  auto truth = SimulatedTruth{};
  auto& d = truth.dataset;
  d.first_day = schedule.first_day;
  d.last_day = schedule.last_day;
  d.episodes = schedule.episodes;
  auto n = d.num_patients();

  auto& tree = truth.tree;
  tree.col_day.assign(n, kNever);
  tree.source.assign(n, kUncolonized);
  tree.group.assign(n, kNoGroup);

  // Importations, in admission order. Under importation structure a new importation clusters
  // with probability c onto the group of a uniformly chosen importation admitted earlier.
  auto importations = std::vector<Patient>{};
  for (auto j = 0; j < n; ++j) {
    if (!rng.bernoulli(theta.p)) continue;
    tree.col_day[j] = d.episodes[j].admit_day;
    tree.source[j] = kImported;
    tree.group[j] = j;
    if (model == Genetic_model::importation_structure) {
      auto earlier = std::vector<Patient>{};
      for (auto i : importations) {
        if (d.episodes[i].admit_day < d.episodes[j].admit_day) earlier.push_back(i);
      }
      if (!earlier.empty() && rng.bernoulli(theta.c)) {
        tree.group[j] = tree.group[rng.pick(std::span<const Patient>{earlier})];
      }
    }
    importations.push_back(j);
  }

  // Daily acquisitions.
  auto can_transmit = [&](Patient i, int t) {
    if (tree.source[i] == kUncolonized) return false;
    auto start = tree.source[i] == kImported ? d.episodes[i].admit_day : tree.col_day[i] + 1;
    return start <= t && t <= d.episodes[i].discharge_day;
  };
  auto transmitters = std::vector<Patient>{};
  for (auto t = d.first_day; t <= d.last_day; ++t) {
    transmitters.clear();
    for (auto i = 0; i < n; ++i) {
      if (can_transmit(i, t)) transmitters.push_back(i);
    }
    if (transmitters.empty() || theta.beta == 0.0) continue;
    auto infect = -std::expm1(-theta.beta * static_cast<double>(transmitters.size()));
    for (auto j = 0; j < n; ++j) {
      if (tree.source[j] != kUncolonized || !d.episodes[j].present(t)) continue;
      if (!rng.bernoulli(infect)) continue;
      auto s = rng.pick(std::span<const Patient>{transmitters});
      tree.col_day[j] = t;
      tree.source[j] = s;
      tree.group[j] = tree.group[s];
    }
  }

  // Colonized patients test positive with probability z from their colonization day.
  for (auto j = 0; j < n; ++j) {
    auto& e = d.episodes[j];
    auto first = true;
    for (auto& s : e.screens) {
      auto detectable = tree.source[j] != kUncolonized && s.day >= tree.col_day[j];
      s.positive = detectable && rng.bernoulli(theta.z);
      if (!s.positive) continue;
      auto sequenced = sequencing.kind == Sequencing::Kind::all_positive ||
                       (sequencing.kind == Sequencing::Kind::first_positive && first) ||
                       (sequencing.kind == Sequencing::Kind::random &&
                        rng.bernoulli(sequencing.probability));
      first = false;
      if (sequenced) d.isolates.push_back({make_id('X', d.num_isolates()), j, s.day});
    }
  }

  d.distances = DistanceMatrix{d.num_isolates()};
  d.finalize();
  auto state = truth.state();
  d.distances = simulate_distances(state, d, theta, model, rng);
  return truth;
}

auto uninformed_tree(const SimulatedTruth& truth) -> std::vector<Weighted_edge> {
  auto state = truth.state();
  auto edges = std::vector<Weighted_edge>{};
  for (auto b = 0; b < state.num_patients(); ++b) {
    if (!state.acquired(b)) continue;
    auto tc = state.col_day(b);
    auto sources = std::vector<Patient>{};
    for (auto a = 0; a < state.num_patients(); ++a) {
      if (a != b && state.can_transmit(a, tc)) sources.push_back(a);
    }
    for (auto a : sources) edges.push_back({a, b, 1.0 / static_cast<double>(sources.size())});
  }
  return edges;
}

auto perturb_distances(const DistanceMatrix& m, double noise_mean, std::uint64_t seed)
    -> DistanceMatrix {
  if (!(noise_mean >= 0.0)) throw std::invalid_argument{"noise_mean must be nonnegative"};
  auto out = m;
  auto rng = Rng{seed};
  for (auto b = 1; b < m.size(); ++b) {
    for (auto a = 0; a < b; ++a) out.set(a, b, m.at(a, b) + rng.poisson(noise_mean));
  }
  return out;
}

void write_truth_csv(const SimulatedTruth& truth, const std::filesystem::path& path) {
  auto out = std::ofstream{path};
  if (!out) throw std::runtime_error{"cannot write " + path.string()};
  const auto& d = truth.dataset;
  const auto& t = truth.tree;
  out << "recipient,source,col_day,import_flag,group\n";
  for (auto j = 0; j < d.num_patients(); ++j) {
    if (t.source[j] == kUncolonized) continue;
    auto imported = t.source[j] == kImported;
    out << d.episodes[j].patient_id << ',' << (imported ? "" : d.episodes[t.source[j]].patient_id)
        << ',' << t.col_day[j] << ',' << (imported ? 1 : 0) << ','
        << d.episodes[t.group[j]].patient_id << '\n';
  }
  if (!out) throw std::runtime_error{"failed writing " + path.string()};
}

auto read_truth_csv(const Dataset& d, const std::filesystem::path& path) -> Truth_tree {
  auto table = read_csv(path);
  auto expected = std::vector<std::string>{"recipient", "source", "col_day", "import_flag", "group"};
  if (table.header != expected) throw Parse_error{path.string() + ": unexpected header"};
  auto n = d.num_patients();
  auto tree = Truth_tree{std::vector<int>(n, kNever), std::vector<int>(n, kUncolonized),
                         std::vector<int>(n, kNoGroup)};
  auto lookup = [&](const std::string& id, int line) {
    auto it = d.patient_index.find(id);
    if (it == d.patient_index.end()) {
      throw Parse_error{path.string() + ":" + std::to_string(line) + ": unknown patient '" + id +
                        "'"};
    }
    return it->second;
  };
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto line = table.line_numbers[r];
    if (row.size() != expected.size()) {
      throw Parse_error{path.string() + ":" + std::to_string(line) + ": expected 5 fields"};
    }
    auto j = lookup(row[0], line);
    try {
      tree.col_day[j] = std::stoi(row[2]);
    } catch (const std::exception&) {
      throw Parse_error{path.string() + ":" + std::to_string(line) + ": bad col_day"};
    }
    tree.source[j] = row[3] == "1" ? kImported : lookup(row[1], line);
    tree.group[j] = lookup(row[4], line);
  }
  return tree;
}

}  // namespace txtree
