#pragma once

#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "txtree/mcmc.h"
#include "txtree/priors.h"
#include "txtree/simulate.h"

namespace txtree {

inline constexpr int kSchemaVersion = 1;

class Config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

auto load_json(const std::filesystem::path& path) -> Json;

// Each reader starts from `base` and overrides only the fields present in the document, which
// must carry a matching schema_version when it is a top-level config. Unknown keys are errors.
auto params_from_json(const Json& j, ModelParams base = {}) -> ModelParams;
auto params_to_json(const ModelParams& theta) -> Json;

auto scenario_from_json(const Json& j, ScenarioConfig base = {}) -> ScenarioConfig;
auto scenario_to_json(const ScenarioConfig& cfg) -> Json;

auto sampler_from_json(const Json& j, SamplerConfig base = {}) -> SamplerConfig;
auto sampler_to_json(const SamplerConfig& cfg) -> Json;

auto priors_from_json(const Json& j, PriorSpec base = {}) -> PriorSpec;
auto priors_to_json(const PriorSpec& priors) -> Json;

// FNV-1a 64-bit digest, rendered as 16 hex digits.
auto fnv1a_hex(std::string_view bytes) -> std::string;
auto file_digest(const std::filesystem::path& path) -> std::string;

}  // namespace txtree
