#include "txtree/config.h"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace txtree {

namespace {

using Setter = std::function<void(const Json&)>;

// Applies `setters` to the keys of `j`; schema_version is checked when present.
void apply(const Json& j, const std::string& what, const std::map<std::string, Setter>& setters) {
  if (!j.is_object()) throw Config_error{what + ": expected a JSON object"};
  for (const auto& [key, value] : j.items()) {
    if (key == "schema_version") {
      if (!value.is_number_integer() || value.get<int>() != kSchemaVersion) {
        throw Config_error{what + ": unsupported schema_version (expected " +
                           std::to_string(kSchemaVersion) + ")"};
      }
      continue;
    }
    auto it = setters.find(key);
    if (it == setters.end()) throw Config_error{what + ": unknown key '" + key + "'"};
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      throw Config_error{what + ": bad value for '" + key + "': " + e.what()};
    }
  }
}

template <typename T>
auto set(T& field) -> Setter {
  return [&field](const Json& v) { field = v.get<T>(); };
}

auto beta_setter(Beta_prior& prior) -> Setter {
  return [&prior](const Json& v) {
    apply(v, "beta prior", {{"a", set(prior.a)}, {"b", set(prior.b)}});
  };
}

auto exponential_setter(Exponential_prior& prior) -> Setter {
  return [&prior](const Json& v) {
    apply(v, "exponential prior", {{"rate", set(prior.rate)}, {"upper", set(prior.upper)}});
  };
}

}  // namespace

auto load_json(const std::filesystem::path& path) -> Json {
  auto in = std::ifstream{path};
  if (!in) throw Config_error{"cannot open " + path.string()};
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Config_error{path.string() + ": " + e.what()};
  }
}

auto params_from_json(const Json& j, ModelParams base) -> ModelParams {
  apply(j, "parameters",
        {{"p", set(base.p)},
         {"z", set(base.z)},
         {"beta", set(base.beta)},
         {"gamma", set(base.gamma)},
         {"gamma_G", set(base.gamma_G)},
         {"k", set(base.k)},
         {"c", set(base.c)},
         {"distance_family", [&](const Json& v) {
            base.distance_family = parse_distance_family(v.get<std::string>());
          }}});
  return base;
}

auto params_to_json(const ModelParams& t) -> Json {
  return {{"p", t.p},         {"z", t.z}, {"beta", t.beta}, {"gamma", t.gamma},
          {"gamma_G", t.gamma_G}, {"k", t.k}, {"c", t.c},
          {"distance_family", std::string{to_string(t.distance_family)}}};
}

auto scenario_from_json(const Json& j, ScenarioConfig base) -> ScenarioConfig {
  apply(j, "scenario",
        {{"n_patients", set(base.n_patients)},
         {"horizon_days", set(base.horizon_days)},
         {"mean_los", set(base.mean_los)},
         {"screen_interval", set(base.screen_interval)},
         {"theta", [&](const Json& v) { base.theta = params_from_json(v, base.theta); }},
         {"model", [&](const Json& v) { base.model = parse_genetic_model(v.get<std::string>()); }},
         {"sequence_all_positives", set(base.sequence_all_positives)},
         {"seed", set(base.seed)}});
  return base;
}

auto scenario_to_json(const ScenarioConfig& c) -> Json {
  return {{"schema_version", kSchemaVersion},
          {"n_patients", c.n_patients},
          {"horizon_days", c.horizon_days},
          {"mean_los", c.mean_los},
          {"screen_interval", c.screen_interval},
          {"theta", params_to_json(c.theta)},
          {"model", std::string{to_string(c.model)}},
          {"sequence_all_positives", c.sequence_all_positives},
          {"seed", c.seed}};
}

auto sampler_from_json(const Json& j, SamplerConfig base) -> SamplerConfig {
  auto& steps = base.mh_step_sizes;
  apply(j, "sampler",
        {{"iterations", set(base.iterations)},
         {"burn_in", set(base.burn_in)},
         {"thin", set(base.thin)},
         {"seed", set(base.seed)},
         {"w", set(base.w)},
         {"w_prime", set(base.w_prime)},
         {"full_augmentation", set(base.full_augmentation)},
         {"phantom_pmf_gamma", set(base.phantom_pmf_gamma)},
         {"phantom_pmf_gamma_G", set(base.phantom_pmf_gamma_G)},
         {"mh_step_sizes",
          [&](const Json& v) {
            apply(v, "mh_step_sizes",
                  {{"log_beta", set(steps.log_beta)},
                   {"log_k", set(steps.log_k)},
                   {"logit_gamma", set(steps.logit_gamma)},
                   {"logit_gamma_G", set(steps.logit_gamma_G)}});
          }},
         {"model", [&](const Json& v) { base.model = parse_genetic_model(v.get<std::string>()); }},
         {"distance_family",
          [&](const Json& v) {
            base.distance_family = parse_distance_family(v.get<std::string>());
          }},
         {"data_free", set(base.data_free)},
         {"validate_every_move", set(base.validate_every_move)},
         {"initial_theta",
          [&](const Json& v) { base.initial_theta = params_from_json(v, ModelParams{}); }}});
  return base;
}

auto sampler_to_json(const SamplerConfig& c) -> Json {
  auto j = Json{{"schema_version", kSchemaVersion},
                {"iterations", c.iterations},
                {"burn_in", c.burn_in},
                {"thin", c.thin},
                {"seed", c.seed},
                {"w", c.w},
                {"w_prime", c.w_prime},
                {"full_augmentation", c.full_augmentation},
                {"phantom_pmf_gamma", c.phantom_pmf_gamma},
                {"phantom_pmf_gamma_G", c.phantom_pmf_gamma_G},
                {"mh_step_sizes",
                 {{"log_beta", c.mh_step_sizes.log_beta},
                  {"log_k", c.mh_step_sizes.log_k},
                  {"logit_gamma", c.mh_step_sizes.logit_gamma},
                  {"logit_gamma_G", c.mh_step_sizes.logit_gamma_G}}},
                {"model", std::string{to_string(c.model)}},
                {"distance_family", std::string{to_string(c.distance_family)}},
                {"data_free", c.data_free},
                {"validate_every_move", c.validate_every_move}};
  if (c.initial_theta) j["initial_theta"] = params_to_json(*c.initial_theta);
  return j;
}

auto priors_from_json(const Json& j, PriorSpec base) -> PriorSpec {
  apply(j, "priors",
        {{"p", beta_setter(base.p)},
         {"z", beta_setter(base.z)},
         {"gamma", beta_setter(base.gamma)},
         {"gamma_G", beta_setter(base.gamma_G)},
         {"c", beta_setter(base.c)},
         {"beta", exponential_setter(base.beta)},
         {"k", exponential_setter(base.k)},
         {"constrain_k", [&](const Json& v) {
            if (v.get<bool>()) base.constrain_k();
          }}});
  base.validate();
  return base;
}

auto priors_to_json(const PriorSpec& p) -> Json {
  auto beta = [](const Beta_prior& b) { return Json{{"a", b.a}, {"b", b.b}}; };
  auto expo = [](const Exponential_prior& e) { return Json{{"rate", e.rate}, {"upper", e.upper}}; };
  return {{"schema_version", kSchemaVersion}, {"p", beta(p.p)},       {"z", beta(p.z)},
          {"gamma", beta(p.gamma)},           {"gamma_G", beta(p.gamma_G)},
          {"c", beta(p.c)},                   {"beta", expo(p.beta)}, {"k", expo(p.k)}};
}

auto fnv1a_hex(std::string_view bytes) -> std::string {
  auto h = std::uint64_t{0xcbf29ce484222325ULL};
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

auto file_digest(const std::filesystem::path& path) -> std::string {
  auto in = std::ifstream{path, std::ios::binary};
  if (!in) throw Config_error{"cannot open " + path.string()};
  auto buf = std::ostringstream{};
  buf << in.rdbuf();
  return fnv1a_hex(buf.str());
}

}  // namespace txtree
