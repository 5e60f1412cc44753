#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "txtree/config.h"
#include "txtree/data_model.h"
#include "txtree/evaluate.h"
#include "txtree/experiments.h"
#include "txtree/mcmc.h"
#include "txtree/simulate.h"
#include "txtree/trace_io.h"

#ifndef TXTREE_VERSION
#define TXTREE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace txtree;

namespace {

enum Exit_code : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kInput = 3,
  kIo = 4,
  kInitialization = 5,
  kMissingTrace = 6,
  kOutputInvalid = 7,
  kInternal = 70,
};

class Missing_trace_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Output_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

auto model_from_flag(const std::string& flag) -> Genetic_model {
  try {
    return parse_genetic_model(flag);
  } catch (const std::exception&) {
    throw Config_error{"unknown model '" + flag + "' (expected td or is)"};
  }
}

void write_json(const Json& j, const fs::path& path) {
  auto out = std::ofstream{path};
  if (!out) throw Io_error{"cannot write " + path.string()};
  out << j.dump(2) << '\n';
  if (!out) throw Io_error{"failed writing " + path.string()};
}

// Records what a run read and wrote so that it can be repeated.
class Run_manifest {
 public:
  explicit Run_manifest(std::string command)
      : command_{std::move(command)}, start_{std::chrono::steady_clock::now()} {}

  void config(const Json& j) { config_ = j; }
  void seed(std::uint64_t s) { seeds_.push_back(s); }
  void input(const fs::path& p) { inputs_[p.string()] = file_digest(p); }
  void input_dir(const fs::path& dir) {
    for (const auto& e : fs::directory_iterator{dir}) {
      if (e.is_regular_file()) input(e.path());
    }
  }
  void output(const fs::path& p) {
    if (!fs::exists(p)) throw Output_error{"expected output " + p.string() + " was not written"};
    outputs_[p.string()] = file_digest(p);
  }
  void output_dir(const fs::path& dir) {
    for (const auto& e : fs::recursive_directory_iterator{dir}) {
      if (e.is_regular_file() && e.path().filename() != "manifest.json") output(e.path());
    }
  }
  void note(const std::string& key, Json value) { notes_[key] = std::move(value); }

  void write(const fs::path& dir) const {
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    auto canonical = config_.dump();
    write_json({{"schema_version", kSchemaVersion},
                {"command", command_},
                {"config", config_},
                {"config_hash", fnv1a_hex(canonical)},
                {"seeds", seeds_},
                {"inputs", inputs_},
                {"outputs", outputs_},
                {"engine_version", TXTREE_VERSION},
                {"wall_clock_seconds", seconds},
                {"notes", notes_}},
               dir / "manifest.json");
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  Json config_ = Json::object();
  std::vector<std::uint64_t> seeds_;
  Json inputs_ = Json::object();
  Json outputs_ = Json::object();
  Json notes_ = Json::object();
};

auto numbered(const std::string& prefix, int i) -> std::string {
  auto digits = std::to_string(i);
  return prefix + std::string(digits.size() < 2 ? 2 - digits.size() : 0, '0') + digits;
}

void prepare_out(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Io_error{"cannot create " + dir.string() + ": " + ec.message()};
}

// ---- simulate ----

struct Simulate_options {
  std::string config;
  std::string out;
  std::string scenario;
  std::string model;
  std::optional<std::uint64_t> seed;
  int replicates = 1;
  bool grid = false;
  bool sparse = false;
};

void write_replicate(const SimulatedTruth& truth, const fs::path& dir, bool sparse) {
  write_dataset(truth.dataset, dir, sparse ? Distance_layout::sparse : Distance_layout::dense);
  write_truth_csv(truth, dir / "truth.csv");
  // Reading the files back checks that they describe a valid dataset.
  auto back = load_dataset_dir(dir);
  read_truth_csv(back, dir / "truth.csv");
}

auto cmd_simulate(const Simulate_options& o) -> int {
  auto manifest = Run_manifest{"simulate"};
  auto cfg = ScenarioConfig{};
  if (!o.config.empty()) {
    cfg = scenario_from_json(load_json(o.config));
    manifest.input(o.config);
  }
  if (!o.scenario.empty()) cfg.theta = find_table1_scenario(o.scenario).theta;
  if (!o.model.empty()) cfg.model = model_from_flag(o.model);
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  auto out = fs::path{o.out};
  prepare_out(out);

  auto jobs = std::vector<std::pair<ScenarioConfig, fs::path>>{};
  if (o.grid) {
    auto scenarios = table1_scenarios();
    for (size_t s = 0; s < scenarios.size(); ++s) {
      for (auto r = 0; r < o.replicates; ++r) {
        auto c = cfg;
        c.theta = scenarios[s].theta;
        c.seed = replicate_seed(cfg.seed, static_cast<int>(s), r);
        jobs.emplace_back(c, out / scenarios[s].name / numbered("rep_", r));
      }
    }
  } else if (o.replicates > 1) {
    for (auto r = 0; r < o.replicates; ++r) {
      auto c = cfg;
      c.seed = replicate_seed(cfg.seed, 0, r);
      jobs.emplace_back(c, out / numbered("rep_", r));
    }
  } else {
    jobs.emplace_back(cfg, out);
  }
  parallel_for(static_cast<int>(jobs.size()), default_workers(), [&](int i) {
    write_replicate(simulate_outbreak(jobs[i].first), jobs[i].second, o.sparse);
  });
  for (const auto& [c, dir] : jobs) manifest.seed(c.seed);
  manifest.config({{"scenario", scenario_to_json(cfg)},
                   {"grid", o.grid},
                   {"replicates", o.replicates},
                   {"sparse", o.sparse}});
  manifest.output_dir(out);
  manifest.write(out);
  std::cout << "wrote " << jobs.size() << " dataset(s) to " << out << '\n';
  return kOk;
}

// ---- infer ----

struct Infer_options {
  std::string data;
  std::string out;
  std::string model = "td";
  std::string priors;
  std::string sampler;
  bool constrain_k = false;
  int chains = 1;
  std::optional<std::uint64_t> seed;
  std::optional<long> iterations;
  std::optional<long> burn_in;
  std::optional<long> thin;
  bool full_augmentation = false;
  bool data_free = false;
};

auto cmd_infer(const Infer_options& o) -> int {
  auto manifest = Run_manifest{"infer"};
  auto priors = PriorSpec{};
  if (!o.priors.empty()) {
    priors = priors_from_json(load_json(o.priors));
    manifest.input(o.priors);
  }
  if (o.constrain_k) priors.constrain_k();
  auto cfg = SamplerConfig{};
  if (!o.sampler.empty()) {
    cfg = sampler_from_json(load_json(o.sampler));
    manifest.input(o.sampler);
  }
  cfg.model = model_from_flag(o.model);
  if (o.seed) cfg.seed = *o.seed;
  if (o.iterations) cfg.iterations = *o.iterations;
  if (o.burn_in) cfg.burn_in = *o.burn_in;
  if (o.thin) cfg.thin = *o.thin;
  if (o.full_augmentation) cfg.full_augmentation = true;
  if (o.data_free) cfg.data_free = true;
  cfg.validate();
  priors.validate();
  if (o.chains < 1) throw Config_error{"--chains must be at least 1"};

  auto d = load_dataset_dir(o.data);
  manifest.input_dir(o.data);
  auto out = fs::path{o.out};
  prepare_out(out);
  auto traces = run_chains(d, cfg.model, priors, cfg, o.chains, default_workers());
  auto merged = o.chains == 1 ? traces.front() : merge_traces(traces);
  write_trace(merged, out);
  if (o.chains > 1) {
    for (auto c = 0; c < o.chains; ++c) {
      write_trace(traces[c], out / numbered("chain_", c));
    }
  }
  for (auto c = 0; c < o.chains; ++c) {
    manifest.seed(c == 0 ? cfg.seed : derive_seed(cfg.seed, static_cast<std::uint64_t>(c)));
  }
  // The written trace must read back against the dataset it was fitted to.
  if (read_trace(out, d).samples.size() != merged.samples.size()) {
    throw Output_error{"trace in " + out.string() + " did not read back"};
  }
  manifest.config(
      {{"model", std::string{to_string(cfg.model)}},
       {"priors", priors_to_json(priors)},
       {"sampler", sampler_to_json(cfg)},
       {"chains", o.chains}});
  manifest.output_dir(out);
  manifest.write(out);
  std::cout << "retained " << merged.samples.size() << " samples from " << o.chains
            << " chain(s) in " << out << '\n';
  return kOk;
}

// ---- evaluate / ppc ----

auto load_trace_checked(const fs::path& dir, const Dataset& d) -> PosteriorTrace {
  if (!fs::exists(dir / "trace_meta.json") || !fs::exists(dir / "params.csv") ||
      !fs::exists(dir / "trees.jsonl")) {
    throw Missing_trace_error{"no trace found in " + dir.string()};
  }
  return read_trace(dir, d);
}

auto ppc_json(const Ppc_result& r, double level) -> Json {
  auto stats = Json::array();
  for (const auto& s : r.statistics) {
    stats.push_back({{"name", s.name},
                     {"observed", std::isnan(s.observed) ? Json(nullptr) : Json(s.observed)},
                     {"lower", s.lower},
                     {"upper", s.upper},
                     {"covered", s.covered},
                     {"draws", s.predicted.size()}});
  }
  return {{"level", level}, {"statistics", stats}, {"all_covered", r.all_covered()}};
}

struct Evaluate_options {
  std::string trace;
  std::string data;
  std::string truth;
  std::string out;
  bool uninformed = false;
  bool ppc = false;
  int ppc_draws = 200;
  std::uint64_t seed = 1;
};

auto network_json(const Network_summary& n) -> Json {
  return {{"secondary_distribution", n.secondary_distribution},
          {"chain_size_distribution", n.chain_size_distribution},
          {"mean_fraction_with_secondary", n.mean_fraction_with_secondary}};
}

auto auc_json(double auc) -> Json { return std::isnan(auc) ? Json(nullptr) : Json(auc); }

auto cmd_evaluate(const Evaluate_options& o) -> int {
  auto manifest = Run_manifest{"evaluate"};
  auto d = load_dataset_dir(o.data);
  manifest.input_dir(o.data);
  auto trace = load_trace_checked(o.trace, d);
  manifest.input_dir(o.trace);
  auto out = fs::path{o.out};
  prepare_out(out);

  auto tree = summarize_trace(trace);
  write_posterior_tree_csv(tree, out / "posterior_tree.csv");
  auto summary = Json{{"samples", tree.samples},
                      {"model", std::string{to_string(trace.model)}},
                      {"network", network_json(network_summaries(trace))}};
  if (!o.truth.empty()) {
    manifest.input(o.truth);
    auto truth = SimulatedTruth{d, read_truth_csv(d, o.truth)};
    auto curve = roc(tree, truth);
    write_roc_csv(curve, out / "roc.csv");
    summary["auc"] = auc_json(curve.auc);
    summary["roc_positives"] = curve.positives;
    summary["roc_negatives"] = curve.negatives;
    auto negatives =
        "ordered pairs (a,b) of truly colonized patients with overlapping stays, minus true edges";
    summary["roc_negative_set"] = negatives;
    manifest.note("roc_negative_set", negatives);
    if (o.uninformed) {
      auto baseline = roc(uninformed_tree(truth), truth);
      write_roc_csv(baseline, out / "roc_uninformed.csv");
      summary["uninformed_auc"] = auc_json(baseline.auc);
      summary["delta_auc"] = auc_json(curve.auc - baseline.auc);
    }
    if (trace.model == Genetic_model::importation_structure) {
      auto recovery = group_recovery(trace, truth);
      summary["mean_group_recovery"] = auc_json(nan_mean(recovery));
    }
  }
  if (o.ppc) {
    auto cfg = Ppc_config{o.ppc_draws, o.seed, trace.model, 0.95};
    summary["ppc"] = ppc_json(posterior_predictive(trace, d, cfg), cfg.level);
    manifest.seed(o.seed);
  }
  write_json(summary, out / "summary.json");
  manifest.config({{"truth", !o.truth.empty()},
                   {"uninformed", o.uninformed},
                   {"ppc", o.ppc},
                   {"ppc_draws", o.ppc_draws}});
  manifest.output_dir(out);
  manifest.write(out);
  if (summary.contains("auc")) std::cout << "AUC " << summary["auc"].dump() << '\n';
  return kOk;
}

struct Ppc_options {
  std::string trace;
  std::string data;
  std::string out;
  int draws = 200;
  double level = 0.95;
  std::uint64_t seed = 1;
};

auto cmd_ppc(const Ppc_options& o) -> int {
  auto manifest = Run_manifest{"ppc"};
  if (!(o.level > 0.0 && o.level < 1.0)) throw Config_error{"--level must lie in (0,1)"};
  auto d = load_dataset_dir(o.data);
  manifest.input_dir(o.data);
  auto trace = load_trace_checked(o.trace, d);
  manifest.input_dir(o.trace);
  auto out = fs::path{o.out};
  prepare_out(out);
  auto result = posterior_predictive(trace, d, {o.draws, o.seed, trace.model, o.level});
  write_json(ppc_json(result, o.level), out / "ppc.json");
  manifest.seed(o.seed);
  manifest.config({{"draws", o.draws}, {"level", o.level}});
  manifest.output_dir(out);
  manifest.write(out);
  for (const auto& s : result.statistics) {
    std::cout << s.name << ": observed " << s.observed << ", band [" << s.lower << ", " << s.upper
              << "]" << (s.covered ? "" : "  (outside)") << '\n';
  }
  return kOk;
}

// ---- perturb ----

struct Perturb_options {
  std::string data;
  std::string out;
  double noise = 1.0;
  std::uint64_t seed = 1;
};

auto cmd_perturb(const Perturb_options& o) -> int {
  auto manifest = Run_manifest{"perturb"};
  if (!(o.noise >= 0.0)) throw Config_error{"--noise must be nonnegative"};
  auto d = load_dataset_dir(o.data);
  manifest.input_dir(o.data);
  d.distances = perturb_distances(d.distances, o.noise, o.seed);
  auto out = fs::path{o.out};
  prepare_out(out);
  write_dataset(d, out);
  if (fs::exists(fs::path{o.data} / "truth.csv")) {
    fs::copy_file(fs::path{o.data} / "truth.csv", out / "truth.csv",
                  fs::copy_options::overwrite_existing);
  }
  load_dataset_dir(out);
  manifest.seed(o.seed);
  manifest.config({{"noise_mean", o.noise}});
  manifest.output_dir(out);
  manifest.write(out);
  return kOk;
}

// ---- reproduce-table1 ----

struct Table1_options {
  std::string out;
  std::string sampler;
  std::vector<std::string> scenarios;
  int replicates = 20;
  std::uint64_t seed = 1;
  std::optional<long> iterations;
  std::optional<long> burn_in;
  std::optional<long> thin;
};

auto cmd_table1(const Table1_options& o) -> int {
  auto manifest = Run_manifest{"reproduce-table1"};
  auto cfg = SamplerConfig{};
  if (!o.sampler.empty()) {
    cfg = sampler_from_json(load_json(o.sampler));
    manifest.input(o.sampler);
  }
  cfg.model = Genetic_model::transmission_diversity;
  if (o.iterations) cfg.iterations = *o.iterations;
  if (o.burn_in) cfg.burn_in = *o.burn_in;
  if (o.thin) cfg.thin = *o.thin;
  cfg.validate();
  if (o.replicates < 1) throw Config_error{"--replicates must be at least 1"};

  auto grid = table1_scenarios();
  auto chosen = std::vector<std::pair<int, Table1_scenario>>{};
  for (size_t s = 0; s < grid.size(); ++s) {
    if (o.scenarios.empty() ||
        std::find(o.scenarios.begin(), o.scenarios.end(), grid[s].name) != o.scenarios.end()) {
      chosen.emplace_back(static_cast<int>(s), grid[s]);
    }
  }
  for (const auto& name : o.scenarios) find_table1_scenario(name);

  auto n_jobs = static_cast<int>(chosen.size()) * o.replicates;
  auto informed = std::vector<double>(n_jobs);
  auto uninformed = std::vector<double>(n_jobs);
  parallel_for(n_jobs, default_workers(), [&](int job) {
    const auto& [index, scenario] = chosen[job / o.replicates];
    auto scenario_cfg = ScenarioConfig{};
    scenario_cfg.theta = scenario.theta;
    scenario_cfg.seed = replicate_seed(o.seed, index, job % o.replicates);
    auto sampler = cfg;
    sampler.seed = derive_seed(scenario_cfg.seed, 1);
    auto r = fit_replicate(simulate_outbreak(scenario_cfg), cfg.model, PriorSpec{}, sampler);
    informed[job] = r.informed_auc;
    uninformed[job] = r.uninformed_auc;
  });

  auto rows = std::vector<Table1_row>{};
  auto per_replicate = Json::array();
  for (size_t s = 0; s < chosen.size(); ++s) {
    auto begin = static_cast<long>(s) * o.replicates;
    auto inf = std::vector<double>(informed.begin() + begin, informed.begin() + begin + o.replicates);
    auto uninf =
        std::vector<double>(uninformed.begin() + begin, uninformed.begin() + begin + o.replicates);
    rows.push_back({chosen[s].second, nan_mean(uninf), nan_mean(inf), o.replicates});
    for (auto r = 0; r < o.replicates; ++r) {
      per_replicate.push_back({{"scenario", chosen[s].second.name},
                               {"replicate", r},
                               {"informed_auc", auc_json(inf[r])},
                               {"uninformed_auc", auc_json(uninf[r])}});
    }
  }
  auto out = fs::path{o.out};
  prepare_out(out);
  auto md = table1_markdown(rows);
  {
    auto f = std::ofstream{out / "table1.md"};
    if (!f) throw Io_error{"cannot write " + (out / "table1.md").string()};
    f << md;
  }
  write_json({{"replicates", per_replicate}}, out / "table1.json");
  manifest.seed(o.seed);
  manifest.config({{"sampler", sampler_to_json(cfg)},
                   {"replicates", o.replicates},
                   {"scenarios", o.scenarios}});
  manifest.output_dir(out);
  manifest.write(out);
  std::cout << md;
  return kOk;
}

template <typename F>
auto guarded(F&& f) -> int {
  try {
    return f();
  } catch (const Config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const Initialization_error& e) {
    std::cerr << "initialization failed: " << e.what() << '\n';
    return kInitialization;
  } catch (const Missing_trace_error& e) {
    std::cerr << "missing trace: " << e.what() << '\n';
    return kMissingTrace;
  } catch (const Empty_trace_error& e) {
    std::cerr << "missing trace: " << e.what() << '\n';
    return kMissingTrace;
  } catch (const Parse_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const Validation_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const Output_error& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kOutputInvalid;
  } catch (const Io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace

auto main(int argc, char** argv) -> int {
  auto app = CLI::App{"Transmission tree inference from hospital screening and SNP distance data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TXTREE_VERSION);
  app.footer(
      "Worker threads default to $TXTREE_WORKERS, else the hardware concurrency.\n"
      "Exit codes: 0 ok, 1 usage, 2 config, 3 input data, 4 io, 5 sampler initialization,\n"
      "6 missing trace, 7 output validation, 70 internal.");

  auto sim = Simulate_options{};
  auto* simulate = app.add_subcommand("simulate", "Simulate outbreak datasets with known trees");
  simulate->add_option("--config", sim.config, "Scenario JSON")->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--scenario", sim.scenario, "Named simulation-study scenario");
  simulate->add_option("--model", sim.model, "Genetic model: td or is");
  simulate->add_option("--seed", sim.seed, "Override the scenario seed");
  simulate->add_option("--replicates", sim.replicates, "Datasets per scenario")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--grid", sim.grid, "Simulate every scenario of the simulation study");
  simulate->add_flag("--sparse", sim.sparse, "Write distances as a sparse pair list");

  auto inf = Infer_options{};
  auto* infer = app.add_subcommand("infer", "Run the MCMC sampler on a dataset");
  infer->add_option("--data", inf.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  infer->add_option("--out", inf.out, "Output directory")->required();
  infer->add_option("--model", inf.model, "Genetic model: td or is")->capture_default_str();
  infer->add_option("--priors", inf.priors, "Priors JSON")->check(CLI::ExistingFile);
  infer->add_option("--sampler", inf.sampler, "Sampler JSON")->check(CLI::ExistingFile);
  infer->add_flag("--constrain-k", inf.constrain_k, "Restrict k to [0,1]");
  infer->add_option("--chains", inf.chains, "Independent chains")->capture_default_str();
  infer->add_option("--seed", inf.seed, "Sampler seed");
  infer->add_option("--iterations", inf.iterations, "Total iterations");
  infer->add_option("--burn-in", inf.burn_in, "Discarded iterations");
  infer->add_option("--thin", inf.thin, "Keep every n-th iteration");
  infer->add_flag("--full-augmentation", inf.full_augmentation,
                  "Impute distances for positives without an isolate");
  infer->add_flag("--data-free", inf.data_free, "Ignore the likelihood and sample the prior");

  auto ev = Evaluate_options{};
  auto* evaluate = app.add_subcommand("evaluate", "Summarize a trace and score it against a truth");
  evaluate->add_option("--trace", ev.trace, "Trace directory")->required();
  evaluate->add_option("--data", ev.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--truth", ev.truth, "Truth CSV")->check(CLI::ExistingFile);
  evaluate->add_option("--out", ev.out, "Output directory")->required();
  evaluate->add_flag("--uninformed", ev.uninformed, "Also score the uninformed tree (needs --truth)");
  evaluate->add_flag("--ppc", ev.ppc, "Posterior predictive check with 95% bands");
  evaluate->add_option("--ppc-draws", ev.ppc_draws, "Posterior samples simulated")->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "Predictive simulation seed")->capture_default_str();

  auto pp = Ppc_options{};
  auto* ppc = app.add_subcommand("ppc", "Posterior predictive check");
  ppc->add_option("--trace", pp.trace, "Trace directory")->required();
  ppc->add_option("--data", pp.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  ppc->add_option("--out", pp.out, "Output directory")->required();
  ppc->add_option("--draws", pp.draws, "Posterior samples simulated")->capture_default_str();
  ppc->add_option("--level", pp.level, "Central band probability")->capture_default_str();
  ppc->add_option("--seed", pp.seed, "Simulation seed")->capture_default_str();

  auto pt = Perturb_options{};
  auto* perturb = app.add_subcommand("perturb", "Add Poisson noise to a distance matrix");
  perturb->add_option("--data", pt.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  perturb->add_option("--out", pt.out, "Output directory")->required();
  perturb->add_option("--noise", pt.noise, "Mean added SNPs per pair")->capture_default_str();
  perturb->add_option("--seed", pt.seed, "Noise seed")->capture_default_str();

  auto tb = Table1_options{};
  auto* table1 =
      app.add_subcommand("reproduce-table1", "Run the simulation-study grid and tabulate mean AUCs");
  table1->add_option("--out", tb.out, "Output directory")->required();
  table1->add_option("--sampler", tb.sampler, "Sampler JSON")->check(CLI::ExistingFile);
  table1->add_option("--scenario", tb.scenarios, "Restrict to named scenarios (repeatable)");
  table1->add_option("--replicates", tb.replicates, "Datasets per scenario")->capture_default_str();
  table1->add_option("--seed", tb.seed, "Grid seed")->capture_default_str();
  table1->add_option("--iterations", tb.iterations, "Total iterations");
  table1->add_option("--burn-in", tb.burn_in, "Discarded iterations");
  table1->add_option("--thin", tb.thin, "Keep every n-th iteration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*simulate) return guarded([&] { return cmd_simulate(sim); });
  if (*infer) return guarded([&] { return cmd_infer(inf); });
  if (*evaluate) {
    if (ev.uninformed && ev.truth.empty()) {
      std::cerr << "--uninformed requires --truth\n";
      return kUsage;
    }
    return guarded([&] { return cmd_evaluate(ev); });
  }
  if (*ppc) return guarded([&] { return cmd_ppc(pp); });
  if (*perturb) return guarded([&] { return cmd_perturb(pt); });
  if (*table1) return guarded([&] { return cmd_table1(tb); });
  return kUsage;
}
