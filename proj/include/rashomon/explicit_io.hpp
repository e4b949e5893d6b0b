#pragma once

// Line-oriented explicit model format:
//
//   MODEL <mdp|dtmc>
//   SCHEMA <name:min:max> ...
//   ACTIONS <a0> <a1> ...                 (mdp only)
//   STATE <index> <f1> ... <fd>           (dense, index 0 first = initial state)
//   TRANS <src> [<actionIndex>] <dst> <prob>
//   REWARD <src> <actionIndex> <value>    (mdp only, optional)
//
// Probabilities are printed with 17 significant digits, so a model written,
// read and written again produces identical bytes.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "rashomon/model.hpp"

namespace rashomon {

using ExplicitModel = std::variant<ExplicitMdp, ExplicitDtmc>;

// Shortest round-trip-safe text for a probability (17 significant digits).
std::string format_real(double value);

void write_explicit(const ExplicitMdp& m, std::ostream& out);
void write_explicit(const ExplicitDtmc& d, std::ostream& out);
std::string to_explicit_string(const ExplicitMdp& m);
std::string to_explicit_string(const ExplicitDtmc& d);
void write_explicit_file(const ExplicitMdp& m, const std::filesystem::path& path);
void write_explicit_file(const ExplicitDtmc& d, const std::filesystem::path& path);

struct ReadOptions {
  bool require_all_actions = true;
};

ExplicitModel read_explicit(std::istream& in, ReadOptions options = {});
ExplicitModel read_explicit_file(const std::filesystem::path& path, ReadOptions options = {});
ExplicitMdp read_explicit_mdp_file(const std::filesystem::path& path, ReadOptions options = {});

// FNV-1a over the canonical serialization; equal models hash equal.
std::uint64_t fingerprint(const ExplicitMdp& m);
std::uint64_t fingerprint(const ExplicitDtmc& d);
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 1469598103934665603ULL);
std::string to_hex(std::uint64_t value);

}  // namespace rashomon
