#include "rashomon/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rashomon/error.hpp"
#include "rashomon/explicit_io.hpp"

namespace rashomon {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("config: bad value '" + text + "' for " + key);
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) {
    part = trim(part);
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

taxi::Cell parse_cell(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ConfigError("config: expected 'x,y' for " + key + ", got '" + text + "'");
  return {parse_number<int>(key, parts[0]), parse_number<int>(key, parts[1])};
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("config: expected true or false for " + key + ", got '" + text + "'");
}

std::string join(const auto& values, char sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? std::string(1, sep) : "") << values[i];
  return out.str();
}

}  // namespace

std::pair<int, int> parse_job_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ConfigError("expected a job range 'min..max', got '" + text + "'");
  return {parse_number<int>("job range", trim(text.substr(0, dots))),
          parse_number<int>("job range", trim(text.substr(dots + 2)))};
}

ExperimentConfig::ExperimentConfig() {
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
}

std::string ExperimentConfig::property_text() const {
  return property.empty() ? taxi::completion_property(taxi.num_jobs) : property;
}

void ExperimentConfig::validate() const {
  taxi.validate();
  training.validate();
  if (seeds.empty()) throw ConfigError("config: the seed list is empty");
  if (shift_min_jobs != taxi.num_jobs) {
    throw ConfigError("config: shift_jobs must start at num_jobs (" + std::to_string(taxi.num_jobs) + ")");
  }
  if (shift_max_jobs < shift_min_jobs) throw ConfigError("config: shift_jobs range is empty");
  // Malformed or unbound properties fail here rather than mid-pipeline.
  BoundPredicate(parse_property(property_text()).target, taxi::schema(taxi));
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  auto& t = cfg.taxi;
  if (key == "width") {
    t.width = parse_number<int>(key, value);
  } else if (key == "height") {
    t.height = parse_number<int>(key, value);
  } else if (key == "fuel_capacity") {
    t.fuel_capacity = parse_number<int>(key, value);
  } else if (key == "num_jobs") {
    t.num_jobs = parse_number<int>(key, value);
  } else if (key == "depots") {
    const auto cells = split(value, ' ');
    if (cells.size() != t.depots.size()) throw ConfigError("config: depots needs exactly 4 cells");
    for (std::size_t i = 0; i < cells.size(); ++i) t.depots[i] = parse_cell(key, cells[i]);
  } else if (key == "first_passenger") {
    const auto pair = parse_cell(key, value);
    t.first_passenger_loc = pair.x;
    t.first_passenger_dest = pair.y;
  } else if (key == "taxi_start") {
    t.taxi_start = parse_cell(key, value);
  } else if (key == "property") {
    cfg.property = value;
  } else if (key == "seeds" || key == "base_seed") {
    const std::uint64_t base = key == "base_seed" ? parse_number<std::uint64_t>(key, value)
                                                  : (cfg.seeds.empty() ? 1 : cfg.seeds.front());
    const std::size_t count = key == "seeds" ? parse_number<std::size_t>(key, value) : cfg.seeds.size();
    cfg.seeds.clear();
    for (std::size_t i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
  } else if (key == "seed_list") {
    cfg.seeds.clear();
    for (const auto& s : split(value, ',')) cfg.seeds.push_back(parse_number<std::uint64_t>(key, s));
  } else if (key == "epochs") {
    cfg.training.epochs = parse_number<std::size_t>(key, value);
  } else if (key == "learning_rate") {
    cfg.training.learning_rate = parse_number<double>(key, value);
  } else if (key == "batch_size") {
    cfg.training.batch_size = parse_number<std::size_t>(key, value);
  } else if (key == "early_stop") {
    cfg.training.early_stop = parse_bool(key, value);
  } else if (key == "hidden") {
    cfg.training.hidden.clear();
    for (const auto& h : split(value, ',')) cfg.training.hidden.push_back(parse_number<std::size_t>(key, h));
  } else if (key == "shift_jobs") {
    std::tie(cfg.shift_min_jobs, cfg.shift_max_jobs) = parse_job_range(value);
  } else if (key == "state_cap") {
    t.state_cap = parse_number<std::size_t>(key, value);
  } else if (key == "workers") {
    cfg.workers = parse_number<std::size_t>(key, value);
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  out << "width = " << taxi.width << '\n'
      << "height = " << taxi.height << '\n'
      << "fuel_capacity = " << taxi.fuel_capacity << '\n'
      << "num_jobs = " << taxi.num_jobs << '\n'
      << "depots =";
  for (const auto& d : taxi.depots) out << ' ' << d.x << ',' << d.y;
  out << '\n'
      << "first_passenger = " << taxi.first_passenger_loc << ',' << taxi.first_passenger_dest << '\n'
      << "taxi_start = " << taxi.taxi_start.x << ',' << taxi.taxi_start.y << '\n'
      << "property = " << property_text() << '\n'
      << "seed_list = " << join(seeds, ',') << '\n'
      << "epochs = " << training.epochs << '\n'
      << "learning_rate = " << format_real(training.learning_rate) << '\n'
      << "batch_size = " << training.batch_size << '\n'
      << "early_stop = " << (training.early_stop ? "true" : "false") << '\n'
      << "hidden = " << join(training.hidden, ',') << '\n'
      << "shift_jobs = " << shift_min_jobs << ".." << shift_max_jobs << '\n'
      << "state_cap = " << taxi.state_cap << '\n';
  return out.str();
}

std::uint64_t ExperimentConfig::checksum() const { return fnv1a(canonical_text()); }

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(number, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(number, "missing key");
    apply_setting(cfg, key, trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

}  // namespace rashomon
