#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "manet/config.hpp"
#include "manet/mc_verify.hpp"

namespace manet {

/// Reads a whole file; ConfigError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Single-run configuration document (JSON). See README for the schema.
SimConfig parse_config(std::string_view text);

/// Sweep document: a `base` run, optional `runs` overrides, optional `grid`
/// of value lists (cartesian product) and optional `seeds`. A plain
/// single-run document yields a one-element sweep.
std::vector<SimConfig> parse_sweep(std::string_view text);

std::string to_json(const SimConfig& cfg);

struct McConfig {
  int trials = 10000;
  std::uint64_t seed = 1;
  std::vector<LemmaInstance> instances;
};

/// Lemma-check document; an absent `instances` list means the default grid.
McConfig parse_mc_config(std::string_view text);

}  // namespace manet
