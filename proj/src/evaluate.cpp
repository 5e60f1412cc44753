#include "txtree/evaluate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace txtree {

namespace {

auto quantile(std::vector<double> values, double u) -> double {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  auto h = u * static_cast<double>(values.size() - 1);
  auto lo = static_cast<size_t>(std::floor(h));
  auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace

auto PosteriorTree::weighted_edges() const -> std::vector<Weighted_edge> {
  auto out = std::vector<Weighted_edge>{};
  out.reserve(edges.size());
  for (const auto& [key, prob] : edges) out.push_back({key.first, key.second, prob});
  return out;
}

auto summarize_trace(const PosteriorTrace& trace) -> PosteriorTree {
  if (trace.samples.empty()) throw Empty_trace_error{"trace has no retained samples"};
  auto n = static_cast<int>(trace.patient_ids.size());
  auto tree = PosteriorTree{};
  tree.patient_ids = trace.patient_ids;
  tree.samples = static_cast<long>(trace.samples.size());
  auto edge_counts = std::map<Edge_key, long>{};
  auto imported = std::vector<long>(n, 0);
  auto colonized = std::vector<long>(n, 0);
  auto shared = std::map<std::pair<Patient, Patient>, long>{};
  auto grouped = trace.model == Genetic_model::importation_structure;

  for (const auto& s : trace.samples) {
    for (const auto& e : s.tree) {
      ++colonized[e.patient];
      if (e.source == kImported) {
        ++imported[e.patient];
      } else {
        ++edge_counts[{e.source, e.patient}];
      }
    }
    if (grouped) {
      for (size_t x = 0; x < s.tree.size(); ++x) {
        for (size_t y = x + 1; y < s.tree.size(); ++y) {
          if (s.tree[x].group == s.tree[y].group) ++shared[{s.tree[x].patient, s.tree[y].patient}];
        }
      }
    }
  }
  auto total = static_cast<double>(tree.samples);
  for (const auto& [key, count] : edge_counts) tree.edges[key] = count / total;
  tree.import_prob.resize(n);
  tree.colonized_prob.resize(n);
  for (auto j = 0; j < n; ++j) {
    tree.import_prob[j] = imported[j] / total;
    tree.colonized_prob[j] = colonized[j] / total;
  }
  for (const auto& [key, count] : shared) tree.group_cooccurrence[key] = count / total;
  return tree;
}

auto roc_candidates(const SimulatedTruth& truth) -> std::vector<Edge_key> {
  const auto& d = truth.dataset;
  const auto& t = truth.tree;
  auto out = std::vector<Edge_key>{};
  for (auto a = 0; a < d.num_patients(); ++a) {
    if (t.source[a] == kUncolonized) continue;
    const auto& ea = d.episodes[a];
    for (auto b = 0; b < d.num_patients(); ++b) {
      if (b == a || t.source[b] == kUncolonized) continue;
      const auto& eb = d.episodes[b];
      if (ea.admit_day <= eb.discharge_day && eb.admit_day <= ea.discharge_day) {
        out.emplace_back(a, b);
      }
    }
  }
  return out;
}

auto roc_from_scores(std::vector<std::pair<double, bool>> scored) -> RocCurve {
  auto curve = RocCurve{};
  for (const auto& [score, positive] : scored) ++(positive ? curve.positives : curve.negatives);
  std::sort(scored.begin(), scored.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  curve.points.emplace_back(0.0, 0.0);
  if (curve.positives == 0 || curve.negatives == 0) {
    curve.auc = std::numeric_limits<double>::quiet_NaN();
    return curve;
  }
  auto tp = 0;
  auto fp = 0;
  for (size_t i = 0; i < scored.size();) {
    auto score = scored[i].first;
    for (; i < scored.size() && scored[i].first == score; ++i) ++(scored[i].second ? tp : fp);
    curve.points.emplace_back(static_cast<double>(fp) / curve.negatives,
                              static_cast<double>(tp) / curve.positives);
  }
  for (size_t i = 1; i < curve.points.size(); ++i) {
    const auto& [x0, y0] = curve.points[i - 1];
    const auto& [x1, y1] = curve.points[i];
    curve.auc += (x1 - x0) * (y0 + y1) / 2.0;
  }
  return curve;
}

auto roc(const std::vector<Weighted_edge>& edges, const SimulatedTruth& truth) -> RocCurve {
  auto weight = std::map<Edge_key, double>{};
  for (const auto& e : edges) weight[{e.source, e.recipient}] += e.weight;
  auto scored = std::vector<std::pair<double, bool>>{};
  for (const auto& key : roc_candidates(truth)) {
    auto it = weight.find(key);
    auto positive = truth.tree.source[key.second] == key.first;
    scored.emplace_back(it == weight.end() ? 0.0 : it->second, positive);
  }
  return roc_from_scores(std::move(scored));
}

auto roc(const PosteriorTree& tree, const SimulatedTruth& truth) -> RocCurve {
  return roc(tree.weighted_edges(), truth);
}

auto group_recovery(const PosteriorTrace& trace, const SimulatedTruth& truth)
    -> std::vector<double> {
  if (trace.samples.empty()) throw Empty_trace_error{"trace has no retained samples"};
  auto n = static_cast<int>(truth.tree.group.size());
  auto correct = std::vector<long>(n, 0);
  auto group = std::vector<int>(n, kNoGroup);
  for (const auto& s : trace.samples) {
    std::fill(group.begin(), group.end(), kNoGroup);
    for (const auto& e : s.tree) group[e.patient] = e.group;
    for (auto j = 0; j < n; ++j) {
      auto founder = truth.tree.group[j];
      if (founder == kNoGroup || group[j] == kNoGroup) continue;
      correct[j] += group[j] == group[founder];
    }
  }
  auto out = std::vector<double>(n, std::numeric_limits<double>::quiet_NaN());
  for (auto j = 0; j < n; ++j) {
    if (truth.tree.group[j] != kNoGroup) {
      out[j] = static_cast<double>(correct[j]) / static_cast<double>(trace.samples.size());
    }
  }
  return out;
}

auto network_summaries(const PosteriorTrace& trace) -> Network_summary {
  if (trace.samples.empty()) throw Empty_trace_error{"trace has no retained samples"};
  auto n = static_cast<int>(trace.patient_ids.size());
  auto out = Network_summary{};
  auto secondary_hist = std::vector<double>{};
  auto size_hist = std::vector<double>{};
  auto secondary_sum = std::vector<double>(n, 0.0);
  auto colonized_count = std::vector<double>(n, 0.0);
  auto offspring = std::vector<int>(n, 0);
  auto root = std::vector<int>(n, -1);
  auto source = std::vector<int>(n, kUncolonized);
  auto add = [](std::vector<double>& hist, size_t k) {
    if (hist.size() <= k) hist.resize(k + 1, 0.0);
    hist[k] += 1.0;
  };
  auto patients_total = 0.0;
  auto chains_total = 0.0;

  for (const auto& s : trace.samples) {
    std::fill(offspring.begin(), offspring.end(), 0);
    std::fill(source.begin(), source.end(), kUncolonized);
    for (const auto& e : s.tree) {
      source[e.patient] = e.source;
      if (e.source >= 0) ++offspring[e.source];
    }
    auto chain_size = std::map<int, int>{};
    auto with_secondary = 0;
    for (const auto& e : s.tree) {
      auto j = e.patient;
      add(secondary_hist, offspring[j]);
      secondary_sum[j] += offspring[j];
      colonized_count[j] += 1.0;
      with_secondary += offspring[j] > 0;
      auto r = j;
      for (auto steps = 0; source[r] >= 0 && steps <= n; ++steps) r = source[r];
      root[j] = r;
      ++chain_size[r];
    }
    for (const auto& [r, size] : chain_size) add(size_hist, size);
    patients_total += static_cast<double>(s.tree.size());
    chains_total += static_cast<double>(chain_size.size());
    out.fraction_with_secondary.push_back(
        s.tree.empty() ? 0.0 : static_cast<double>(with_secondary) / s.tree.size());
  }
  for (auto& v : secondary_hist) v /= std::max(1.0, patients_total);
  for (auto& v : size_hist) v /= std::max(1.0, chains_total);
  out.secondary_distribution = std::move(secondary_hist);
  out.chain_size_distribution = std::move(size_hist);
  out.mean_secondary.resize(n, 0.0);
  for (auto j = 0; j < n; ++j) {
    out.mean_secondary[j] = colonized_count[j] > 0 ? secondary_sum[j] / colonized_count[j] : 0.0;
  }
  out.mean_fraction_with_secondary =
      std::accumulate(out.fraction_with_secondary.begin(), out.fraction_with_secondary.end(), 0.0) /
      static_cast<double>(out.fraction_with_secondary.size());
  return out;
}

auto Ppc_result::all_covered() const -> bool {
  return std::all_of(statistics.begin(), statistics.end(),
                     [](const Ppc_statistic& s) { return s.covered; });
}

auto observed_statistics(const Dataset& d) -> Observed_statistics {
  auto out = Observed_statistics{};
  for (const auto& e : d.episodes) {
    if (e.screens.empty()) continue;
    if (e.screens.front().positive) {
      ++out.importations;
      continue;
    }
    auto seen_negative = false;
    for (const auto& s : e.screens) {
      if (!s.positive) {
        seen_negative = true;
      } else if (seen_negative) {
        ++out.acquisitions;
        break;
      }
    }
  }
  auto n_s = d.num_isolates();
  if (n_s < 2) {
    out.mean_diversity = std::numeric_limits<double>::quiet_NaN();
  } else {
    auto sum = 0.0;
    for (auto y = 1; y < n_s; ++y) {
      for (auto x = 0; x < y; ++x) sum += d.distances.at(x, y);
    }
    out.mean_diversity = sum / (0.5 * n_s * (n_s - 1.0));
  }
  return out;
}

auto posterior_predictive(const PosteriorTrace& trace, const Dataset& d, const Ppc_config& cfg)
    -> Ppc_result {
  if (trace.samples.empty()) throw Empty_trace_error{"trace has no retained samples"};
  auto positives = 0;
  for (const auto& e : d.episodes) {
    for (const auto& s : e.screens) positives += s.positive;
  }
  auto sequencing = Sequencing{Sequencing::Kind::random,
                               positives > 0 ? std::min(1.0, static_cast<double>(d.num_isolates()) /
                                                                 positives)
                                             : 0.0};
  if (sequencing.probability >= 1.0) sequencing.kind = Sequencing::Kind::all_positive;

  auto observed = observed_statistics(d);
  auto result = Ppc_result{};
  result.statistics = {{"importations", static_cast<double>(observed.importations), {}, 0, 0, false},
                       {"acquisitions", static_cast<double>(observed.acquisitions), {}, 0, 0, false},
                       {"mean_pairwise_diversity", observed.mean_diversity, {}, 0, 0, false}};

  auto rng = Rng{cfg.seed};
  auto total = trace.samples.size();
  auto draws = static_cast<size_t>(std::max(1, cfg.draws));
  for (size_t i = 0; i < draws; ++i) {
    const auto& sample = trace.samples[(i * total) / draws];
    auto sim = simulate_on_schedule(d, sample.theta, cfg.model, sequencing, rng);
    auto stats = observed_statistics(sim.dataset);
    result.statistics[0].predicted.push_back(stats.importations);
    result.statistics[1].predicted.push_back(stats.acquisitions);
    if (!std::isnan(stats.mean_diversity)) {
      result.statistics[2].predicted.push_back(stats.mean_diversity);
    }
  }
  auto tail = (1.0 - cfg.level) / 2.0;
  for (auto& s : result.statistics) {
    s.lower = quantile(s.predicted, tail);
    s.upper = quantile(s.predicted, 1.0 - tail);
    s.covered = !std::isnan(s.observed) && s.lower <= s.observed && s.observed <= s.upper;
  }
  return result;
}

}  // namespace txtree
