// Command-line front end for the Rashomon experiment pipeline.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rashomon/config.hpp"
#include "rashomon/error.hpp"
#include "rashomon/pipeline.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::size_t> seeds;
  std::optional<std::string> jobs;
  std::optional<std::string> property;
  std::optional<std::size_t> cap;
  std::optional<std::size_t> workers;
  bool quiet = false;
};

rashomon::ExperimentConfig load(const Overrides& o) {
  rashomon::ExperimentConfig cfg =
      o.config_path.empty() ? rashomon::ExperimentConfig{} : rashomon::read_config_file(o.config_path);
  if (o.out) cfg.output_dir = *o.out;
  if (o.seeds) rashomon::apply_setting(cfg, "seeds", std::to_string(*o.seeds));
  if (o.jobs) rashomon::apply_setting(cfg, "shift_jobs", *o.jobs);
  if (o.property) cfg.property = *o.property;
  if (o.cap) cfg.taxi.state_cap = *o.cap;
  if (o.workers) cfg.workers = *o.workers;
  cfg.validate();
  return cfg;
}

void print_error(const char* kind, const std::string& stage, const std::string& message) {
  const nlohmann::ordered_json record{{"error", kind}, {"stage", stage}, {"message", message}};
  std::cerr << record.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rashomon-effect experiments on policies for a taxi MDP"};
  app.require_subcommand(1);
  Overrides o;

  using Stage = rashomon::StageResult (*)(const rashomon::ExperimentConfig&, std::ostream*);
  const std::pair<const char*, Stage> stages[] = {
      {"build", rashomon::cmd_build},         {"synthesize", rashomon::cmd_synthesize},
      {"train", rashomon::cmd_train},         {"verify", rashomon::cmd_verify},
      {"attribute", rashomon::cmd_attribute}, {"rashomon", rashomon::cmd_rashomon},
      {"shift", rashomon::cmd_shift},
  };
  const std::pair<const char*, const char*> help[] = {
      {"build", "Build the taxi MDP and write it in explicit format"},
      {"synthesize", "Synthesize the optimal policy and the expert dataset"},
      {"train", "Train one network policy per seed by behavioral cloning"},
      {"verify", "Group policies into behavioral equivalence classes"},
      {"attribute", "Rank features by mean saliency for every policy"},
      {"rashomon", "Select the Rashomon set from the largest class"},
      {"shift", "Evaluate the Rashomon set under increasing job counts"},
      {"all", "Run every stage and write a run manifest"},
  };
  for (const auto& [name, description] : help) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", o.config_path, "Configuration file (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seeds", o.seeds, "Number of policies (seeds base_seed..)");
    sub->add_option("--jobs", o.jobs, "Shifted job range min..max");
    sub->add_option("--property", o.property, "Property text, e.g. \"P=? [ F jobs_done=5 & done=1 ]\"");
    sub->add_option("--cap", o.cap, "State cap for explicit and induced models");
    sub->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    sub->add_flag("--quiet", o.quiet, "Suppress progress output");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const rashomon::ExperimentConfig cfg = load(o);
    std::ostream* log = o.quiet ? nullptr : &std::cout;
    if (command == "all") {
      const auto manifest = rashomon::cmd_all(cfg, log);
      if (log) *log << "wrote " << (cfg.output_dir / rashomon::artifact::manifest).string() << '\n';
      return 0;
    }
    for (const auto& [name, run] : stages) {
      if (command == name) {
        const auto result = run(cfg, log);
        if (log) {
          for (const auto& path : result.outputs) *log << "wrote " << path.string() << '\n';
        }
        return 0;
      }
    }
    return 2;
  } catch (const rashomon::Error& e) {
    print_error(e.kind(), command, e.what());
  } catch (const std::exception& e) {
    print_error("internal_error", command, e.what());
  }
  return 1;
}
