#include "txtree/trace_io.h"

#include <cstdio>
#include <fstream>

namespace txtree {

namespace {

auto open_out(const std::filesystem::path& path) -> std::ofstream {
  auto out = std::ofstream{path};
  if (!out) throw std::runtime_error{"cannot write " + path.string()};
  return out;
}

auto fmt(double x) -> std::string {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

auto entry_json(const Tree_entry& e, const std::vector<std::string>& ids) -> Json {
  auto imported = e.source == kImported;
  return {{"patient", ids[e.patient]},
          {"col_day", e.col_day},
          {"source", imported ? Json(nullptr) : Json(ids[e.source])},
          {"import_flag", imported ? 1 : 0},
          {"group", e.group >= 0 ? Json(ids[e.group]) : Json(nullptr)}};
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error{"failed writing " + path.string()};
}

}  // namespace

void write_param_csv(const PosteriorTrace& trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "iteration,p,z,beta,gamma,gamma_G,k,c,log_post\n";
  for (const auto& s : trace.samples) {
    const auto& t = s.theta;
    out << s.iteration << ',' << fmt(t.p) << ',' << fmt(t.z) << ',' << fmt(t.beta) << ','
        << fmt(t.gamma) << ',' << fmt(t.gamma_G) << ',' << fmt(t.k) << ',' << fmt(t.c) << ','
        << fmt(s.log_post) << '\n';
  }
  finish(out, path);
}

void write_tree_jsonl(const PosteriorTrace& trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& s : trace.samples) {
    auto tree = Json::array();
    for (const auto& e : s.tree) tree.push_back(entry_json(e, trace.patient_ids));
    out << Json{{"iteration", s.iteration}, {"tree", std::move(tree)}}.dump() << '\n';
  }
  finish(out, path);
}

auto acceptance_json(const PosteriorTrace& trace) -> Json {
  auto moves = Json::object();
  for (auto m = 0; m < kNumMoveKinds; ++m) {
    const auto& c = trace.moves[m];
    moves[std::string{to_string(static_cast<Move_kind>(m))}] = {
        {"attempted", c.attempted},
        {"accepted", c.accepted},
        {"rejected", c.rejected},
        {"rejected_outright", c.rejected_outright},
        {"rate", c.attempted > 0 ? static_cast<double>(c.accepted) / c.attempted : 0.0}};
  }
  static constexpr const char* kParamNames[] = {"beta", "k", "gamma", "gamma_G"};
  auto params = Json::object();
  for (auto p = 0; p < kNumMhParams; ++p) {
    const auto& c = trace.params[p];
    params[kParamNames[p]] = {
        {"attempted", c.attempted},
        {"accepted", c.accepted},
        {"rate", c.attempted > 0 ? static_cast<double>(c.accepted) / c.attempted : 0.0}};
  }
  return {{"moves", moves}, {"random_walk", params}};
}

void write_trace(const PosteriorTrace& trace, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_param_csv(trace, dir / "params.csv");
  write_tree_jsonl(trace, dir / "trees.jsonl");
  {
    auto out = open_out(dir / "acceptance.json");
    out << acceptance_json(trace).dump(2) << '\n';
    finish(out, dir / "acceptance.json");
  }
  auto out = open_out(dir / "trace_meta.json");
  out << Json{{"schema_version", kSchemaVersion},
              {"model", std::string{to_string(trace.model)}},
              {"samples", trace.samples.size()}}
             .dump(2)
      << '\n';
  finish(out, dir / "trace_meta.json");
}

auto read_trace(const std::filesystem::path& dir, const Dataset& d) -> PosteriorTrace {
  auto trace = PosteriorTrace{};
  auto meta = load_json(dir / "trace_meta.json");
  trace.model = parse_genetic_model(meta.at("model").get<std::string>());
  for (const auto& e : d.episodes) trace.patient_ids.push_back(e.patient_id);

  auto lookup = [&](const Json& id) -> int {
    auto it = d.patient_index.find(id.get<std::string>());
    if (it == d.patient_index.end()) {
      throw Parse_error{"trace refers to unknown patient '" + id.get<std::string>() + "'"};
    }
    return it->second;
  };

  auto params = read_csv(dir / "params.csv");
  auto trees = std::ifstream{dir / "trees.jsonl"};
  if (!trees) throw Parse_error{"cannot open " + (dir / "trees.jsonl").string()};
  auto line = std::string{};
  for (size_t r = 0; r < params.rows.size(); ++r) {
    const auto& row = params.rows[r];
    if (row.size() != 9) throw Parse_error{"params.csv: malformed row"};
    auto sample = Trace_sample{};
    sample.iteration = std::stol(row[0]);
    auto& t = sample.theta;
    t.p = std::stod(row[1]);
    t.z = std::stod(row[2]);
    t.beta = std::stod(row[3]);
    t.gamma = std::stod(row[4]);
    t.gamma_G = std::stod(row[5]);
    t.k = std::stod(row[6]);
    t.c = std::stod(row[7]);
    sample.log_post = std::stod(row[8]);
    if (!std::getline(trees, line)) throw Parse_error{"trees.jsonl shorter than params.csv"};
    auto j = Json::parse(line);
    if (j.at("iteration").get<long>() != sample.iteration) {
      throw Parse_error{"trees.jsonl and params.csv iterations disagree"};
    }
    for (const auto& e : j.at("tree")) {
      auto imported = e.at("import_flag").get<int>() == 1;
      sample.tree.push_back({lookup(e.at("patient")), e.at("col_day").get<int>(),
                             imported ? kImported : lookup(e.at("source")),
                             e.at("group").is_null() ? kNoGroup : lookup(e.at("group"))});
    }
    trace.samples.push_back(std::move(sample));
  }
  return trace;
}

auto state_to_json(const AugmentedState& state) -> Json {
  const auto& d = state.data();
  auto out = Json::object();
  for (auto j = 0; j < state.num_patients(); ++j) {
    auto entry = Json{{"col_day", state.colonized(j) ? Json(state.col_day(j)) : Json(nullptr)},
                      {"source", state.acquired(j) ? Json(d.episodes[state.source(j)].patient_id)
                                                   : Json(nullptr)},
                      {"import_flag", state.imported(j) ? 1 : 0},
                      {"group", state.group(j) >= 0 ? Json(d.episodes[state.group(j)].patient_id)
                                                    : Json(nullptr)}};
    out[d.episodes[j].patient_id] = std::move(entry);
  }
  return out;
}

void write_posterior_tree_csv(const PosteriorTree& tree, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "source,recipient,probability\n";
  for (const auto& [key, prob] : tree.edges) {
    out << tree.patient_ids[key.first] << ',' << tree.patient_ids[key.second] << ',' << fmt(prob)
        << '\n';
  }
  finish(out, path);
}

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "false_positive_rate,true_positive_rate\n";
  for (const auto& [x, y] : curve.points) out << fmt(x) << ',' << fmt(y) << '\n';
  finish(out, path);
}

}  // namespace txtree
