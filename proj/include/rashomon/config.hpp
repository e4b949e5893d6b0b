#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "rashomon/cloning.hpp"
#include "rashomon/taxi.hpp"

namespace rashomon {

// Everything one pipeline run depends on. Read from a flat `key = value`
// text file with `#` comments; keys not given keep their defaults.
//
//   width, height, fuel_capacity, num_jobs     integers
//   depots          "x,y x,y x,y x,y"
//   first_passenger "loc,dest" (depot indices)
//   taxi_start      "x,y"
//   property        property text; default: completion of num_jobs jobs
//   seeds           number of policies; ids are base_seed .. base_seed+seeds-1
//   base_seed       first seed
//   seed_list       explicit comma-separated ids (overrides seeds/base_seed)
//   epochs, learning_rate, batch_size, early_stop (true/false)
//   hidden          comma-separated hidden layer widths
//   shift_jobs      "min..max"; min must equal num_jobs
//   state_cap       cap on explicit and induced model sizes
//   workers         worker threads, 0 = all logical cores
//   output_dir      artifact directory
struct ExperimentConfig {
  taxi::TaxiParams taxi;
  std::string property;  // empty means taxi::completion_property(taxi.num_jobs)
  std::vector<std::uint64_t> seeds;
  TrainConfig training;
  int shift_min_jobs = 5;
  int shift_max_jobs = 10;
  std::filesystem::path output_dir = "out";
  std::size_t workers = 0;

  ExperimentConfig();

  std::string property_text() const;
  // Throws ConfigError, or ParseError/SemanticError for a bad property.
  void validate() const;
  // Canonical `key = value` listing of every setting that affects outputs
  // (output_dir and workers excluded).
  std::string canonical_text() const;
  std::uint64_t checksum() const;
};

// Applies one setting; throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Throws ParseError on malformed lines and ConfigError on bad settings.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig read_config_file(const std::filesystem::path& path);

// Parses "a..b" into a closed integer range.
std::pair<int, int> parse_job_range(const std::string& text);

}  // namespace rashomon
