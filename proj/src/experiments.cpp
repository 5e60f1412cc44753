#include "txtree/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace txtree {

auto table1_scenarios() -> std::vector<Table1_scenario> {
  auto baseline = ScenarioConfig{}.theta;
  auto with = [&](auto&& edit) {
    auto t = baseline;
    edit(t);
    return t;
  };
  auto diversity = [&](double gamma, double gamma_G) {
    return with([&](ModelParams& t) {
      t.gamma = gamma;
      t.gamma_G = gamma_G;
    });
  };
  return {
      {"baseline", "", baseline, 0.67, 0.93},
      {"low_sensitivity", "z=0.6", with([](ModelParams& t) { t.z = 0.6; }), 0.67, 0.84},
      {"high_sensitivity", "z=0.9", with([](ModelParams& t) { t.z = 0.9; }), 0.68, 0.94},
      {"low_transmission", "beta=0.001", with([](ModelParams& t) { t.beta = 0.001; }), 0.62, 0.96},
      {"high_transmission", "beta=0.008", with([](ModelParams& t) { t.beta = 0.008; }), 0.74, 0.91},
      {"equal_diversity_ratio", "gamma=0.1, gamma_G=0.1", diversity(0.1, 0.1), 0.68, 0.91},
      {"low_diversity_ratio", "gamma=0.3, gamma_G=0.1", diversity(0.3, 0.1), 0.68, 0.93},
      {"high_diversity_ratio", "gamma=0.3, gamma_G=0.005", diversity(0.3, 0.005), 0.68, 0.96},
      {"no_increasing_chain_diversity", "k=1", with([](ModelParams& t) { t.k = 1.0; }), 0.68, 0.93},
      {"strongly_increasing_chain_diversity", "k=0.5",
       with([](ModelParams& t) { t.k = 0.5; }), 0.69, 0.90},
  };
}

auto find_table1_scenario(const std::string& name) -> Table1_scenario {
  for (auto& s : table1_scenarios()) {
    if (s.name == name) return s;
  }
  throw std::out_of_range{"unknown scenario '" + name + "'"};
}

auto replicate_seed(std::uint64_t base, int scenario, int replicate) -> std::uint64_t {
  return derive_seed(base, static_cast<std::uint64_t>(scenario) * 100000u +
                               static_cast<std::uint64_t>(replicate));
}

auto fit_replicate(SimulatedTruth truth, Genetic_model model, const PriorSpec& priors,
                   const SamplerConfig& sampler) -> Replicate_result {
  auto result = Replicate_result{};
  result.trace = run_chain(truth.dataset, model, priors, sampler);
  result.uninformed_auc = roc(uninformed_tree(truth), truth).auc;
  result.informed_auc =
      result.trace.samples.empty()
          ? std::numeric_limits<double>::quiet_NaN()
          : roc(summarize_trace(result.trace), truth).auc;
  result.truth = std::move(truth);
  return result;
}

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  auto next = std::atomic<int>{0};
  auto errors = std::vector<std::exception_ptr>(std::max(0, n));
  auto work = [&] {
    for (auto i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  auto pool = std::vector<std::thread>{};
  auto count = std::clamp(workers, 1, std::max(1, n));
  for (auto w = 1; w < count; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

auto default_workers() -> int {
  if (const auto* env = std::getenv("TXTREE_WORKERS")) {
    try {
      auto n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

auto nan_mean(const std::vector<double>& values) -> double {
  auto sum = 0.0;
  auto n = 0;
  for (auto v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

auto table1_markdown(const std::vector<Table1_row>& rows) -> std::string {
  auto out = std::ostringstream{};
  out << "| Scenario | Parameters | AUC (uninf.) | AUC (inf.) | Published uninf. | Published inf. "
         "| Replicates |\n";
  out << "|---|---|---|---|---|---|---|\n";
  char buf[32];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return std::string{buf};
  };
  for (const auto& r : rows) {
    auto params = r.scenario.parameters.empty() ? std::string{"*"} : r.scenario.parameters;
    out << "| " << r.scenario.name << " | " << params << " | " << num(r.uninformed_auc) << " | " << num(r.informed_auc) << " | "
        << num(r.scenario.uninformed_auc) << " | " << num(r.scenario.informed_auc) << " | "
        << r.replicates << " |\n";
  }
  return out.str();
}

}  // namespace txtree
