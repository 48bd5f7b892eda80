#include "shepherd/config_json.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>

namespace shepherd {
namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("invalid field '" + field + "': " + what);
}

const Json& require_object(const Json& doc, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  if (!doc.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown field '" + join(path, key) + "'");
  }
  return doc;
}

double get_real(const Json& doc, const char* key, const std::string& path, double fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  return v.get<double>();
}

std::int64_t get_int(const Json& doc, const char* key, const std::string& path,
                     std::int64_t fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const Json& doc, const char* key, const std::string& path, bool fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_boolean()) fail(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(const Json& doc, const char* key, const std::string& path,
                       const std::string& fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

Json vec_to_json(const Vec2& v) { return {{"x", v.x}, {"y", v.y}}; }

Vec2 vec_from_json(const Json& doc, const char* key, const std::string& path, Vec2 fallback) {
  if (!doc.contains(key)) return fallback;
  const std::string p = join(path, key);
  const Json& v = require_object(doc.at(key), p, {"x", "y"});
  return {get_real(v, "x", p, fallback.x), get_real(v, "y", p, fallback.y)};
}

}  // namespace

Json gains_to_json(const GainVector& g) {
  return {{"k1", g.k1}, {"k2", g.k2}, {"k3", g.k3}, {"k4", g.k4}, {"sense_radius", g.sense_radius}};
}

GainVector gains_from_json(const Json& doc, const std::string& path) {
  require_object(doc, path, {"k1", "k2", "k3", "k4", "sense_radius"});
  const GainVector d;
  return {get_real(doc, "k1", path, d.k1), get_real(doc, "k2", path, d.k2),
          get_real(doc, "k3", path, d.k3), get_real(doc, "k4", path, d.k4),
          get_real(doc, "sense_radius", path, d.sense_radius)};
}

Json policy_to_json(const PolicyConfig& p) {
  const auto& c = p.classifier;
  Json threshold = {{"type", to_string(c.threshold_rule.kind)}};
  threshold[c.threshold_rule.kind == ThresholdKind::kAdaptive ? "c" : "d"] = c.threshold_rule.value;
  return {
      {"type", to_string(p.type)},
      {"proximity_threshold", p.proximity_threshold ? Json(*p.proximity_threshold) : Json(nullptr)},
      {"collect_order", to_string(p.collect_order)},
      {"hysteresis", p.hysteresis},
      {"classifier",
       {{"observation_period", c.observation_period},
        {"estimated_gains", c.estimated_gains ? gains_to_json(*c.estimated_gains) : Json(nullptr)},
        {"threshold_rule", threshold},
        {"abs_floor", c.abs_floor},
        {"latch", c.latch}}},
  };
}

PolicyConfig policy_from_json(const Json& doc, const std::string& path) {
  require_object(doc, path,
                 {"type", "proximity_threshold", "collect_order", "hysteresis", "classifier"});
  PolicyConfig p;
  p.type = policy_type_from_string(get_string(doc, "type", path, to_string(p.type)));
  if (doc.contains("proximity_threshold") && !doc.at("proximity_threshold").is_null()) {
    p.proximity_threshold = get_real(doc, "proximity_threshold", path, 0.0);
  }
  const std::string order = get_string(doc, "collect_order", path, to_string(p.collect_order));
  if (order == "farthest_from_goal") {
    p.collect_order = CollectOrder::kFarthestFromGoal;
  } else if (order == "lowest_index") {
    p.collect_order = CollectOrder::kLowestIndex;
  } else {
    fail(join(path, "collect_order"), "expected 'farthest_from_goal' or 'lowest_index'");
  }
  p.hysteresis = get_real(doc, "hysteresis", path, p.hysteresis);

  if (doc.contains("classifier")) {
    const std::string cp = join(path, "classifier");
    const Json& c = require_object(doc.at("classifier"), cp,
                                   {"observation_period", "estimated_gains", "threshold_rule",
                                    "abs_floor", "latch"});
    auto& out = p.classifier;
    const auto period = get_int(c, "observation_period", cp, out.observation_period);
    if (period < 1 || period > std::numeric_limits<int>::max()) {
      fail(join(cp, "observation_period"), "must be >= 1");
    }
    out.observation_period = static_cast<int>(period);
    if (c.contains("estimated_gains") && !c.at("estimated_gains").is_null()) {
      out.estimated_gains = gains_from_json(c.at("estimated_gains"), join(cp, "estimated_gains"));
    }
    if (c.contains("threshold_rule")) {
      const std::string tp = join(cp, "threshold_rule");
      const Json& t = c.at("threshold_rule");
      const std::string type = t.is_object() ? get_string(t, "type", tp, "adaptive") : "";
      if (type == "adaptive") {
        require_object(t, tp, {"type", "c"});
        out.threshold_rule = {ThresholdKind::kAdaptive, get_real(t, "c", tp, 3.0)};
      } else if (type == "fixed") {
        require_object(t, tp, {"type", "d"});
        if (!t.contains("d")) fail(join(tp, "d"), "required for a fixed threshold");
        out.threshold_rule = {ThresholdKind::kFixed, get_real(t, "d", tp, 0.0)};
      } else {
        fail(join(tp, "type"), "expected 'adaptive' or 'fixed'");
      }
    }
    out.abs_floor = get_real(c, "abs_floor", cp, out.abs_floor);
    out.latch = get_bool(c, "latch", cp, out.latch);
  }
  return p;
}

Json config_to_json(const WorldConfig& cfg) {
  Json kinds = Json::array();
  for (const auto& k : cfg.kind_assignment) {
    kinds.push_back({{"mask", mask_to_string(k.mask)}, {"scale", k.scale}});
  }
  return {
      {"n_sheep", cfg.n_sheep},
      {"base_gains", gains_to_json(cfg.base_gains)},
      {"kind_assignment", kinds},
      {"goal_center", vec_to_json(cfg.goal_center)},
      {"goal_radius", cfg.goal_radius},
      {"time_limit", cfg.time_limit},
      {"sheep_speed_cap", cfg.sheep_speed_cap},
      {"shepherd_speed_cap", cfg.shepherd_speed_cap},
      {"norm_floor", cfg.norm_floor},
      {"shepherd_gains",
       {{"kd1", cfg.shepherd_gains.kd1}, {"kd2", cfg.shepherd_gains.kd2},
        {"kd3", cfg.shepherd_gains.kd3}}},
      {"init_region",
       {{"min", vec_to_json(cfg.init_region.min)}, {"max", vec_to_json(cfg.init_region.max)}}},
      {"shepherd_init", vec_to_json(cfg.shepherd_init)},
      {"rng_seed", cfg.rng_seed},
      {"rng_algorithm", cfg.rng_algorithm},
      {"score_subset", to_string(cfg.score_subset)},
      {"policy", policy_to_json(cfg.policy)},
  };
}

WorldConfig config_from_json(const Json& doc) {
  require_object(doc, "",
                 {"n_sheep", "base_gains", "kind_assignment", "goal_center", "goal_radius",
                  "time_limit", "sheep_speed_cap", "shepherd_speed_cap", "norm_floor",
                  "shepherd_gains", "init_region", "shepherd_init", "rng_seed", "rng_algorithm",
                  "score_subset", "policy"});
  WorldConfig cfg;
  const auto n = get_int(doc, "n_sheep", "", cfg.n_sheep);
  if (n < 1 || n > 1'000'000) fail("n_sheep", "must be a positive integer");
  cfg.n_sheep = static_cast<int>(n);
  if (doc.contains("base_gains")) cfg.base_gains = gains_from_json(doc.at("base_gains"), "base_gains");

  if (doc.contains("kind_assignment")) {
    const Json& kinds = doc.at("kind_assignment");
    if (!kinds.is_array()) fail("kind_assignment", "expected an array");
    cfg.kind_assignment.clear();
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      const std::string p = "kind_assignment[" + std::to_string(i) + "]";
      const Json& k = require_object(kinds[i], p, {"mask", "scale"});
      SheepKind kind;
      try {
        kind.mask = mask_from_string(get_string(k, "mask", p, "1111"));
      } catch (const std::invalid_argument& e) {
        fail(p + ".mask", e.what());
      }
      kind.scale = get_real(k, "scale", p, 1.0);
      cfg.kind_assignment.push_back(kind);
    }
  } else {
    cfg.kind_assignment.assign(static_cast<std::size_t>(cfg.n_sheep), SheepKind::normal());
  }

  cfg.goal_center = vec_from_json(doc, "goal_center", "", cfg.goal_center);
  cfg.goal_radius = get_real(doc, "goal_radius", "", cfg.goal_radius);
  cfg.time_limit = get_int(doc, "time_limit", "", cfg.time_limit);
  cfg.sheep_speed_cap = get_real(doc, "sheep_speed_cap", "", cfg.sheep_speed_cap);
  cfg.shepherd_speed_cap = get_real(doc, "shepherd_speed_cap", "", cfg.shepherd_speed_cap);
  cfg.norm_floor = get_real(doc, "norm_floor", "", cfg.norm_floor);
  if (doc.contains("shepherd_gains")) {
    const Json& g = require_object(doc.at("shepherd_gains"), "shepherd_gains", {"kd1", "kd2", "kd3"});
    cfg.shepherd_gains = {get_real(g, "kd1", "shepherd_gains", cfg.shepherd_gains.kd1),
                          get_real(g, "kd2", "shepherd_gains", cfg.shepherd_gains.kd2),
                          get_real(g, "kd3", "shepherd_gains", cfg.shepherd_gains.kd3)};
  }
  if (doc.contains("init_region")) {
    const Json& r = require_object(doc.at("init_region"), "init_region", {"min", "max"});
    cfg.init_region.min = vec_from_json(r, "min", "init_region", cfg.init_region.min);
    cfg.init_region.max = vec_from_json(r, "max", "init_region", cfg.init_region.max);
  }
  cfg.shepherd_init = vec_from_json(doc, "shepherd_init", "", cfg.shepherd_init);
  if (doc.contains("rng_seed")) {
    const Json& s = doc.at("rng_seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      fail("rng_seed", "expected a non-negative 64-bit integer");
    }
    cfg.rng_seed = s.get<std::uint64_t>();
  }
  cfg.rng_algorithm = get_string(doc, "rng_algorithm", "", cfg.rng_algorithm);
  const std::string subset = get_string(doc, "score_subset", "", to_string(cfg.score_subset));
  if (subset == "all") {
    cfg.score_subset = ScoreSubset::kAll;
  } else if (subset == "normal_only") {
    cfg.score_subset = ScoreSubset::kNormalOnly;
  } else {
    fail("score_subset", "expected 'all' or 'normal_only'");
  }
  if (doc.contains("policy")) cfg.policy = policy_from_json(doc.at("policy"), "policy");

  validate(cfg);
  return cfg;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
  }
}

void apply_overrides(Json& doc, const std::vector<std::string>& assignments) {
  const Json before = doc;
  bool kinds_overridden = false;
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + a + "' must have the form key=value");
    }
    const std::string key = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    Json value;
    try {
      value = Json::parse(text);
    } catch (const Json::parse_error&) {
      value = text;
    }

    Json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
      if (node->is_object() && node->contains(part)) {
        node = &(*node)[part];
      } else if (node->is_array() && !part.empty() &&
                 part.find_first_not_of("0123456789") == std::string::npos &&
                 std::stoul(part) < node->size()) {
        node = &(*node)[std::stoul(part)];
      } else {
        throw ConfigError("unknown override key '" + key + "'");
      }
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    // "mask=0111" must stay a string even though it also parses as a number.
    *node = node->is_string() && !value.is_string() ? Json(text) : value;
    if (key.rfind("kind_assignment", 0) == 0) kinds_overridden = true;
  }

  if (!kinds_overridden && doc.contains("n_sheep") && doc["n_sheep"] != before["n_sheep"] &&
      doc["n_sheep"].is_number_integer() && doc.contains("kind_assignment")) {
    const Json& kinds = doc["kind_assignment"];
    const bool all_normal =
        kinds.is_array() && std::all_of(kinds.begin(), kinds.end(), [](const Json& k) {
          return k.is_object() && k.value("mask", std::string("1111")) == "1111" &&
                 k.value("scale", 1.0) == 1.0;
        });
    const auto n = doc["n_sheep"].get<std::int64_t>();
    if (all_normal && n >= 1) {
      doc["kind_assignment"] = Json::array();
      for (std::int64_t i = 0; i < n; ++i) {
        doc["kind_assignment"].push_back({{"mask", "1111"}, {"scale", 1.0}});
      }
    }
  }
}

WorldConfig load_config(const std::filesystem::path& path,
                        const std::vector<std::string>& overrides) {
  WorldConfig cfg = config_from_json(read_json_file(path));
  if (overrides.empty()) return cfg;
  Json doc = config_to_json(cfg);
  apply_overrides(doc, overrides);
  return config_from_json(doc);
}

}  // namespace shepherd
