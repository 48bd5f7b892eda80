#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "shepherd/config.hpp"

namespace shepherd {

using Json = nlohmann::json;

/// Fully resolved document: every field present, unset optionals as null.
Json config_to_json(const WorldConfig& cfg);

/// Strict parse. Missing fields take defaults; unknown fields, wrong types
/// and invalid values raise ConfigError naming the field. The result is
/// validated.
WorldConfig config_from_json(const Json& doc);

Json gains_to_json(const GainVector& g);
GainVector gains_from_json(const Json& doc, const std::string& path);
Json policy_to_json(const PolicyConfig& p);
PolicyConfig policy_from_json(const Json& doc, const std::string& path);

/// Reads and parses a JSON file. Throws ConfigError mentioning the path.
Json read_json_file(const std::filesystem::path& path);

/// Applies `key=value` assignments to a resolved config document. Keys are
/// dotted paths ("base_gains.k4", "kind_assignment.0.mask"); values are
/// parsed as JSON, falling back to a plain string. Unknown keys raise
/// ConfigError naming the key. Changing n_sheep on an all-normal flock
/// resizes kind_assignment unless it is overridden too.
void apply_overrides(Json& doc, const std::vector<std::string>& assignments);

WorldConfig load_config(const std::filesystem::path& path,
                        const std::vector<std::string>& overrides = {});

}  // namespace shepherd
