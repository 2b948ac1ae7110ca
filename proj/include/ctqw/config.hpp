#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctqw/ensemble.hpp"

namespace ctqw {

// Flat key = value text, a subset of TOML: '#' comments, strings in double
// quotes, booleans, integers, floats, and single-line arrays of scalars.
// Sections and multi-line values are rejected.
struct ConfigValue {
  using Scalar = std::variant<bool, std::int64_t, double, std::string>;
  std::variant<Scalar, std::vector<Scalar>> value;
  int line = 0;
};

using ConfigTable = std::map<std::string, ConfigValue, std::less<>>;

ConfigTable parse_config_table(std::string_view text);

// Keys understood by parse_config(); anything else is rejected.
const std::vector<std::string>& config_keys();

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Effective configuration in the same key = value format; parse_config() of
// the output reproduces `config`.
std::string to_config_text(const RunConfig& config);

struct BenchmarkPlan {
  std::vector<std::uint64_t> meshes;  // target N^m
  std::vector<std::int64_t> post_rates;
  std::vector<std::int64_t> realizations;
  int repetitions = 1;

  void validate() const;
};

BenchmarkPlan parse_plan(std::string_view text);
BenchmarkPlan load_plan(const std::filesystem::path& path);

}  // namespace ctqw
