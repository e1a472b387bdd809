#include "manet/config_io.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "manet/errors.hpp"

namespace manet {

namespace {

using Json = nlohmann::ordered_json;

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ConfigError(fmt::format("malformed JSON: {}", e.what()));
  }
}

template <typename T>
T get_as(const Json& value, std::string_view key) {
  try {
    return value.get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(fmt::format("field '{}' has the wrong type", key));
  }
}

std::int64_t get_int(const Json& value, std::string_view key) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) {
      return static_cast<std::int64_t>(d);
    }
  }
  throw ConfigError(fmt::format("field '{}' must be an integer", key));
}

// Run fields not stored verbatim in SimConfig.
struct Extras {
  std::optional<double> D_exponent;
};

void apply_constants(SimConfig& cfg, const Json& obj) {
  if (!obj.is_object()) throw ConfigError("'constants' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "c1") cfg.c1 = get_as<double>(value, key);
    else if (key == "c2") cfg.c2 = get_as<double>(value, key);
    else if (key == "c_s") cfg.c_s = get_as<double>(value, key);
    else if (key == "oracle_exponent") cfg.oracle_exponent = get_as<double>(value, key);
    else throw ConfigError(fmt::format("unknown constant '{}'", key));
  }
}

void apply_debug(SimConfig& cfg, const Json& obj) {
  if (!obj.is_object()) throw ConfigError("'debug' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "check_protocol") cfg.check_protocol = get_as<bool>(value, key);
    else throw ConfigError(fmt::format("unknown debug option '{}'", key));
  }
}

void apply_field(SimConfig& cfg, Extras& extras, const std::string& key, const Json& value) {
  if (key == "run_id") cfg.run_id = get_as<std::string>(value, key);
  else if (key == "n") cfg.n = get_int(value, key);
  else if (key == "D") cfg.D = get_int(value, key), extras.D_exponent.reset();
  else if (key == "D_exponent") extras.D_exponent = get_as<double>(value, key);
  else if (key == "W") cfg.W = get_as<double>(value, key);
  else if (key == "delta") cfg.delta = get_as<double>(value, key);
  else if (key == "C") cfg.C = static_cast<int>(get_int(value, key));
  else if (key == "scheme") cfg.scheme = parse_scheme(get_as<std::string>(value, key));
  else if (key == "coding_mode") cfg.coding_mode = parse_coding_mode(get_as<std::string>(value, key));
  else if (key == "geometry") cfg.geometry = parse_geometry(get_as<std::string>(value, key));
  else if (key == "epsilon_code") cfg.epsilon_code = get_as<double>(value, key);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(get_int(value, key));
  else if (key == "super_slots") cfg.super_slots = get_int(value, key);
  else if (key == "constants") apply_constants(cfg, value);
  else if (key == "debug") apply_debug(cfg, value);
  else throw ConfigError(fmt::format("unknown configuration field '{}'", key));
}

void apply_object(SimConfig& cfg, Extras& extras, const Json& obj) {
  if (!obj.is_object()) throw ConfigError("a run configuration must be a JSON object");
  for (const auto& [key, value] : obj.items()) apply_field(cfg, extras, key, value);
}

SimConfig finalize(SimConfig cfg, const Extras& extras) {
  if (extras.D_exponent) {
    const double e = *extras.D_exponent;
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("D_exponent must lie in (0, 1)");
    cfg.D = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(cfg.n), e) - 1e-9));
  }
  validate(cfg);
  return cfg;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

SimConfig parse_config(std::string_view text) {
  const Json doc = parse_json(text);
  SimConfig cfg;
  Extras extras;
  apply_object(cfg, extras, doc);
  return finalize(cfg, extras);
}

std::vector<SimConfig> parse_sweep(std::string_view text) {
  const Json doc = parse_json(text);
  if (!doc.is_object()) throw ConfigError("a sweep document must be a JSON object");
  const bool structured = doc.contains("base") || doc.contains("runs") || doc.contains("grid") ||
                          doc.contains("seeds");
  if (!structured) return {parse_config(text)};
  for (const auto& [key, value] : doc.items()) {
    if (key != "base" && key != "runs" && key != "grid" && key != "seeds") {
      throw ConfigError(fmt::format("unknown sweep field '{}'", key));
    }
  }

  SimConfig base;
  Extras base_extras;
  if (doc.contains("base")) apply_object(base, base_extras, doc["base"]);

  std::vector<Json> runs;
  if (doc.contains("runs")) {
    if (!doc["runs"].is_array() || doc["runs"].empty()) {
      throw ConfigError("'runs' must be a nonempty array");
    }
    for (const auto& r : doc["runs"]) runs.push_back(r);
  } else {
    runs.push_back(Json::object());
  }

  // Cartesian product of the grid lists, first key varying slowest.
  std::vector<Json> combos{Json::object()};
  if (doc.contains("grid")) {
    const Json& grid = doc["grid"];
    if (!grid.is_object()) throw ConfigError("'grid' must be an object of value lists");
    for (const auto& [key, values] : grid.items()) {
      if (!values.is_array() || values.empty()) {
        throw ConfigError(fmt::format("grid entry '{}' must be a nonempty list", key));
      }
      std::vector<Json> next;
      for (const auto& c : combos) {
        for (const auto& v : values) {
          Json extended = c;
          extended[key] = v;
          next.push_back(std::move(extended));
        }
      }
      combos = std::move(next);
    }
  }

  std::vector<std::uint64_t> seeds;
  if (doc.contains("seeds")) {
    if (!doc["seeds"].is_array() || doc["seeds"].empty()) {
      throw ConfigError("'seeds' must be a nonempty array");
    }
    for (const auto& s : doc["seeds"]) seeds.push_back(static_cast<std::uint64_t>(get_int(s, "seeds")));
  }

  std::vector<SimConfig> out;
  std::set<std::string> ids;
  for (const auto& run : runs) {
    const std::size_t per_run = combos.size() * std::max<std::size_t>(1, seeds.size());
    std::size_t local = 0;
    for (const auto& combo : combos) {
      for (std::size_t s = 0; s < std::max<std::size_t>(1, seeds.size()); ++s) {
        SimConfig cfg = base;
        Extras extras = base_extras;
        apply_object(cfg, extras, run);
        apply_object(cfg, extras, combo);
        if (!seeds.empty()) cfg.seed = seeds[s];
        if (cfg.run_id.empty()) {
          cfg.run_id = fmt::format("r{:04d}", out.size());
        } else if (per_run > 1) {
          cfg.run_id = fmt::format("{}-{:03d}", cfg.run_id, local);
        }
        ++local;
        if (!ids.insert(cfg.run_id).second) {
          throw ConfigError(fmt::format("duplicate run id '{}'", cfg.run_id));
        }
        out.push_back(finalize(cfg, extras));
      }
    }
  }
  return out;
}

std::string to_json(const SimConfig& cfg) {
  Json j;
  j["run_id"] = cfg.run_id;
  j["n"] = cfg.n;
  j["D"] = cfg.D;
  j["W"] = cfg.W;
  j["delta"] = cfg.delta;
  j["C"] = cfg.C;
  j["scheme"] = std::string(to_string(cfg.scheme));
  j["coding_mode"] = std::string(to_string(cfg.coding_mode));
  j["geometry"] = std::string(to_string(cfg.geometry));
  j["epsilon_code"] = cfg.epsilon_code;
  j["seed"] = cfg.seed;
  j["super_slots"] = cfg.super_slots;
  j["constants"] = {{"c1", cfg.c1}, {"c2", cfg.c2}, {"c_s", cfg.c_s},
                    {"oracle_exponent", cfg.oracle_exponent}};
  j["debug"] = {{"check_protocol", cfg.check_protocol}};
  return j.dump(2);
}

McConfig parse_mc_config(std::string_view text) {
  const Json doc = parse_json(text);
  if (!doc.is_object()) throw ConfigError("a lemma-check document must be a JSON object");
  McConfig mc;
  bool has_instances = false;
  for (const auto& [key, value] : doc.items()) {
    if (key == "trials") {
      mc.trials = static_cast<int>(get_int(value, key));
    } else if (key == "seed") {
      mc.seed = static_cast<std::uint64_t>(get_int(value, key));
    } else if (key == "instances") {
      if (!value.is_array()) throw ConfigError("'instances' must be an array");
      has_instances = true;
      for (const auto& item : value) {
        if (!item.is_object()) throw ConfigError("each lemma instance must be an object");
        LemmaInstance in;
        bool has_lemma = false;
        for (const auto& [k, v] : item.items()) {
          if (k == "lemma") in.lemma = parse_lemma(get_as<std::string>(v, k)), has_lemma = true;
          else if (k == "m") in.m = get_int(v, k);
          else if (k == "h") in.h = get_int(v, k);
          else if (k == "n") in.n = get_int(v, k);
          else if (k == "p") in.p = get_as<double>(v, k);
          else if (k == "delta") in.delta = get_as<double>(v, k);
          else if (k == "mu") in.mu = get_as<double>(v, k);
          else throw ConfigError(fmt::format("unknown lemma-instance field '{}'", k));
        }
        if (!has_lemma) throw ConfigError("lemma instance without a 'lemma' field");
        mc.instances.push_back(in);
      }
    } else {
      throw ConfigError(fmt::format("unknown lemma-check field '{}'", key));
    }
  }
  if (mc.trials < kMinTrials) {
    throw ConfigError(fmt::format("at least {} trials are required", kMinTrials));
  }
  if (!has_instances) mc.instances = default_lemma_grid();
  return mc;
}

}  // namespace manet
