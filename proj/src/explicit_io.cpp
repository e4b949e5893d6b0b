#include "rashomon/explicit_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "rashomon/error.hpp"

namespace rashomon {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

void write_schema(const FeatureSchema& schema, std::ostream& out) {
  out << "SCHEMA";
  for (std::size_t i = 0; i < schema.arity(); ++i) {
    out << ' ' << schema.name(i) << ':' << schema.bounds()[i].min << ':' << schema.bounds()[i].max;
  }
  out << '\n';
}

void write_states(const StateTable& states, std::ostream& out) {
  for (StateIndex s = 0; s < states.size(); ++s) {
    out << "STATE " << s;
    for (int v : states[s]) out << ' ' << v;
    out << '\n';
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

}  // namespace

void write_explicit(const ExplicitMdp& m, std::ostream& out) {
  out << "MODEL mdp\n";
  write_schema(m.schema(), out);
  out << "ACTIONS";
  for (const auto& a : m.actions()) out << ' ' << a;
  out << '\n';
  write_states(m.states(), out);
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    for (ActionIndex a = 0; a < m.num_actions(); ++a) {
      for (const Transition& t : m.distribution(s, a)) {
        out << "TRANS " << s << ' ' << a << ' ' << t.target << ' ' << format_real(t.probability) << '\n';
      }
    }
  }
  for (const auto& [key, value] : m.rewards()) {
    out << "REWARD " << key.first << ' ' << key.second << ' ' << format_real(value) << '\n';
  }
}

void write_explicit(const ExplicitDtmc& d, std::ostream& out) {
  if (d.initial_state() != 0) throw SemanticError("explicit format requires initial state index 0");
  out << "MODEL dtmc\n";
  write_schema(d.schema(), out);
  write_states(d.states(), out);
  for (StateIndex s = 0; s < d.num_states(); ++s) {
    for (const Transition& t : d.successors(s)) {
      out << "TRANS " << s << ' ' << t.target << ' ' << format_real(t.probability) << '\n';
    }
  }
}

std::string to_explicit_string(const ExplicitMdp& m) {
  std::ostringstream os;
  write_explicit(m, os);
  return os.str();
}

std::string to_explicit_string(const ExplicitDtmc& d) {
  std::ostringstream os;
  write_explicit(d, os);
  return os.str();
}

namespace {

template <typename Model>
void write_file(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_explicit(model, out);
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

void write_explicit_file(const ExplicitMdp& m, const std::filesystem::path& path) { write_file(m, path); }
void write_explicit_file(const ExplicitDtmc& d, const std::filesystem::path& path) { write_file(d, path); }

ExplicitModel read_explicit(std::istream& in, ReadOptions options) {
  // Keep the raw text alive; tokens are views into it.
  std::vector<std::string> raw;
  std::vector<Line> lines;
  {
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
      ++number;
      raw.push_back(std::move(text));
    }
    lines.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto tokens = split_ws(raw[i]);
      if (!tokens.empty()) lines.push_back({i + 1, std::move(tokens)});
    }
  }
  if (lines.empty() || lines.front().tokens.front() != "MODEL") {
    throw ParseError(lines.empty() ? 1 : lines.front().number, "no header");
  }
  std::size_t cursor = 0;
  const Line& header = lines[cursor++];
  if (header.tokens.size() != 2 || (header.tokens[1] != "mdp" && header.tokens[1] != "dtmc")) {
    throw ParseError(header.number, "expected 'MODEL mdp' or 'MODEL dtmc'");
  }
  const bool is_mdp = header.tokens[1] == "mdp";

  if (cursor >= lines.size() || lines[cursor].tokens.front() != "SCHEMA") {
    throw ParseError(cursor < lines.size() ? lines[cursor].number : header.number + 1, "expected SCHEMA line");
  }
  std::vector<std::string> names;
  std::vector<FeatureBounds> bounds;
  {
    const Line& line = lines[cursor++];
    for (std::size_t i = 1; i < line.tokens.size(); ++i) {
      std::string_view tok = line.tokens[i];
      auto c1 = tok.find(':');
      auto c2 = c1 == std::string_view::npos ? c1 : tok.find(':', c1 + 1);
      if (c1 == std::string_view::npos || c2 == std::string_view::npos || c1 == 0) {
        throw ParseError(line.number, "malformed schema entry '" + std::string(tok) + "'");
      }
      names.emplace_back(tok.substr(0, c1));
      bounds.push_back({parse_number<int>(tok.substr(c1 + 1, c2 - c1 - 1), line.number, "bound"),
                        parse_number<int>(tok.substr(c2 + 1), line.number, "bound")});
    }
  }
  FeatureSchema schema;
  try {
    schema = FeatureSchema(std::move(names), std::move(bounds));
  } catch (const std::invalid_argument& e) {
    throw SemanticError(e.what());
  }

  std::vector<std::string> actions;
  if (is_mdp) {
    if (cursor >= lines.size() || lines[cursor].tokens.front() != "ACTIONS") {
      throw ParseError(cursor < lines.size() ? lines[cursor].number : lines.back().number + 1,
                       "expected ACTIONS line");
    }
    const Line& line = lines[cursor++];
    for (std::size_t i = 1; i < line.tokens.size(); ++i) actions.emplace_back(line.tokens[i]);
    if (actions.empty()) throw SemanticError("ACTIONS line lists no actions");
  }

  StateTable states(schema.arity());
  while (cursor < lines.size() && lines[cursor].tokens.front() == "STATE") {
    const Line& line = lines[cursor++];
    if (line.tokens.size() != schema.arity() + 2) {
      throw ParseError(line.number, "STATE line needs an index and " + std::to_string(schema.arity()) + " values");
    }
    const auto index = parse_number<std::size_t>(line.tokens[1], line.number, "state index");
    if (index != states.size()) {
      throw SemanticError("line " + std::to_string(line.number) + ": state index " + std::to_string(index) +
                          " breaks dense ordering (expected " + std::to_string(states.size()) + ")");
    }
    StateVector values;
    for (std::size_t i = 2; i < line.tokens.size(); ++i) {
      values.push_back(parse_number<int>(line.tokens[i], line.number, "feature value"));
    }
    if (!states.insert(values).second) {
      throw SemanticError("line " + std::to_string(line.number) + ": duplicate state vector");
    }
  }
  const std::size_t num_states = states.size();

  auto check_state = [&](std::size_t idx, std::size_t line) {
    if (idx >= num_states) {
      throw SemanticError("line " + std::to_string(line) + ": state index " + std::to_string(idx) +
                          " out of range (" + std::to_string(num_states) + " states)");
    }
  };
  auto check_probability = [&](double p, std::size_t line) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw SemanticError("line " + std::to_string(line) + ": probability " + format_real(p) + " outside (0, 1]");
    }
  };

  if (is_mdp) {
    std::vector<std::vector<Transition>> rows(num_states * actions.size());
    RewardMap rewards;
    for (; cursor < lines.size(); ++cursor) {
      const Line& line = lines[cursor];
      const auto& t = line.tokens;
      if (t.front() == "TRANS") {
        if (t.size() != 5) throw ParseError(line.number, "TRANS line needs <src> <action> <dst> <prob>");
        const auto src = parse_number<std::size_t>(t[1], line.number, "state index");
        const auto act = parse_number<std::size_t>(t[2], line.number, "action index");
        const auto dst = parse_number<std::size_t>(t[3], line.number, "state index");
        const auto prob = parse_number<double>(t[4], line.number, "probability");
        check_state(src, line.number);
        check_state(dst, line.number);
        if (act >= actions.size()) {
          throw SemanticError("line " + std::to_string(line.number) + ": action index " + std::to_string(act) +
                              " out of range (" + std::to_string(actions.size()) + " actions)");
        }
        check_probability(prob, line.number);
        rows[src * actions.size() + act].push_back({dst, prob});
      } else if (t.front() == "REWARD") {
        if (t.size() != 4) throw ParseError(line.number, "REWARD line needs <src> <action> <value>");
        const auto src = parse_number<std::size_t>(t[1], line.number, "state index");
        const auto act = parse_number<std::size_t>(t[2], line.number, "action index");
        check_state(src, line.number);
        if (act >= actions.size()) {
          throw SemanticError("line " + std::to_string(line.number) + ": action index " + std::to_string(act) +
                              " out of range (" + std::to_string(actions.size()) + " actions)");
        }
        rewards[{src, act}] = parse_number<double>(t[3], line.number, "reward");
      } else {
        throw ParseError(line.number, "unexpected '" + std::string(t.front()) + "' line");
      }
    }
    MdpBuilder builder(schema, actions);
    for (StateIndex s = 0; s < num_states; ++s) builder.add_state(states[s]);
    for (StateIndex s = 0; s < num_states; ++s) {
      for (ActionIndex a = 0; a < actions.size(); ++a) {
        auto& row = rows[s * actions.size() + a];
        if (!row.empty()) builder.set_distribution(s, a, std::move(row));
      }
    }
    for (const auto& [key, value] : rewards) builder.set_reward(key.first, key.second, value);
    ExplicitMdp m = std::move(builder).build();
    const auto report = validate_mdp(m, {.require_all_actions = options.require_all_actions});
    if (!report.empty()) throw SemanticError(report.front().message);
    return m;
  }

  DtmcBuilder builder(schema);
  for (StateIndex s = 0; s < num_states; ++s) builder.add_state(states[s]);
  std::vector<std::vector<Transition>> rows(num_states);
  for (; cursor < lines.size(); ++cursor) {
    const Line& line = lines[cursor];
    const auto& t = line.tokens;
    if (t.front() != "TRANS") throw ParseError(line.number, "unexpected '" + std::string(t.front()) + "' line");
    if (t.size() != 4) throw ParseError(line.number, "TRANS line needs <src> <dst> <prob>");
    const auto src = parse_number<std::size_t>(t[1], line.number, "state index");
    const auto dst = parse_number<std::size_t>(t[2], line.number, "state index");
    const auto prob = parse_number<double>(t[3], line.number, "probability");
    check_state(src, line.number);
    check_state(dst, line.number);
    check_probability(prob, line.number);
    rows[src].push_back({dst, prob});
  }
  for (StateIndex s = 0; s < num_states; ++s) builder.set_successors(s, std::move(rows[s]));
  ExplicitDtmc d = std::move(builder).build();
  const auto report = validate_dtmc(d);
  if (!report.empty()) throw SemanticError(report.front().message);
  return d;
}

ExplicitModel read_explicit_file(const std::filesystem::path& path, ReadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_explicit(in, options);
}

ExplicitMdp read_explicit_mdp_file(const std::filesystem::path& path, ReadOptions options) {
  auto model = read_explicit_file(path, options);
  if (auto* m = std::get_if<ExplicitMdp>(&model)) return std::move(*m);
  throw SemanticError("'" + path.string() + "' holds a dtmc, expected an mdp");
}

std::uint64_t fingerprint(const ExplicitMdp& m) { return fnv1a(to_explicit_string(m)); }
std::uint64_t fingerprint(const ExplicitDtmc& d) { return fnv1a(to_explicit_string(d)); }

}  // namespace rashomon
