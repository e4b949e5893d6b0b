#include "rashomon/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rashomon/attribution.hpp"
#include "rashomon/cloning.hpp"
#include "rashomon/error.hpp"
#include "rashomon/explicit_io.hpp"
#include "rashomon/induced.hpp"
#include "rashomon/parallel.hpp"
#include "rashomon/rashomon_set.hpp"
#include "rashomon/shift.hpp"
#include "rashomon/taxi.hpp"

namespace rashomon {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path out_path(const ExperimentConfig& cfg, const char* name) { return cfg.output_dir / name; }

void ensure_output_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir / artifact::policy_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.output_dir.string() + "': " + ec.message());
}

void require(const fs::path& path, const char* stage) {
  if (!fs::exists(path)) {
    throw MissingArtifactError("missing '" + path.string() + "'; run the " + std::string(stage) + " stage first");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json read_json(const fs::path& path, const char* stage) {
  require(path, stage);
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(1, "malformed '" + path.string() + "': " + e.what());
  }
}

json sidecar_header(const ExperimentConfig& cfg) {
  return json{{"version", kToolkitVersion}, {"config_checksum", to_hex(cfg.checksum())}};
}

void note(std::ostream* log, const std::string& line) {
  if (log) *log << line << std::endl;
}

PropertyQuery config_query(const ExperimentConfig& cfg) { return parse_property(cfg.property_text()); }

ExplicitMdp load_model(const ExperimentConfig& cfg) {
  const fs::path path = out_path(cfg, artifact::model);
  require(path, "build");
  return read_explicit_mdp_file(path);
}

std::vector<MlpPolicy> load_policies(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  std::vector<MlpPolicy> policies;
  for (std::uint64_t seed : seeds) {
    const fs::path path = policy_path(cfg, seed);
    require(path, "train");
    policies.push_back(read_mlp_file(path));
  }
  return policies;
}

std::string policy_label(std::uint64_t id) { return "pi_" + std::to_string(id); }

}  // namespace

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

fs::path policy_path(const ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.output_dir / artifact::policy_dir / ("policy_" + std::to_string(seed) + ".mlp");
}

void write_table_policy_file(const TablePolicy& policy, const fs::path& path) {
  std::ostringstream out;
  out << "POLICY " << policy.size() << '\n';
  for (ActionIndex a : policy.actions) out << a << '\n';
  write_text(path, out.str());
}

TablePolicy read_table_policy_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open policy file '" + path.string() + "'");
  std::string tag;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != "POLICY") throw ParseError(1, "expected 'POLICY <n>'");
  TablePolicy policy;
  policy.actions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(in >> policy.actions[i])) throw ParseError(i + 2, "expected an action index");
  }
  return policy;
}

StageResult cmd_build(const ExperimentConfig& cfg, std::ostream* log) {
  Stopwatch clock;
  cfg.validate();
  ensure_output_dir(cfg);
  const ExplicitMdp m = taxi::build_taxi(cfg.taxi);
  const auto issues = validate_mdp(m);
  if (!issues.empty()) throw SemanticError("generated model is invalid: " + issues.front().message);
  const fs::path model = out_path(cfg, artifact::model);
  const fs::path info = out_path(cfg, artifact::model_info);
  write_explicit_file(m, model);
  json doc = sidecar_header(cfg);
  doc["states"] = m.num_states();
  doc["transitions"] = m.num_transitions();
  doc["actions"] = m.actions();
  doc["features"] = m.schema().names();
  doc["fingerprint"] = to_hex(fingerprint(m));
  write_json(info, doc);
  note(log, "build: " + std::to_string(m.num_states()) + " states, " + std::to_string(m.num_transitions()) +
                " transitions");
  return {"build", {model, info}, clock.seconds()};
}

StageResult cmd_synthesize(const ExperimentConfig& cfg, std::ostream* log) {
  Stopwatch clock;
  cfg.validate();
  const ExplicitMdp m = load_model(cfg);
  const PropertyQuery query = config_query(cfg);
  const MdpSolution sol = max_reach_mdp(m, query.target);
  const ExpertDataset data = extract_expert_dataset(m, sol.policy);
  const fs::path policy = out_path(cfg, artifact::expert_policy);
  const fs::path dataset = out_path(cfg, artifact::dataset);
  const fs::path info = out_path(cfg, artifact::synthesis_info);
  write_table_policy_file(sol.policy, policy);
  write_dataset_file(data, dataset);
  json doc = sidecar_header(cfg);
  doc["property"] = to_string(query);
  doc["optimal_value"] = sol.result.initial_value;
  doc["iterations"] = sol.result.iterations;
  doc["dataset_size"] = data.size();
  if (query.mode == PropertyQuery::Mode::threshold) {
    doc["verdict"] = check_threshold(query, sol.result.initial_value) == Verdict::satisfied ? "satisfied" : "violated";
  }
  write_json(info, doc);
  note(log, "synthesize: optimal value " + format_real(sol.result.initial_value) + ", " +
                std::to_string(data.size()) + " expert pairs");
  return {"synthesize", {policy, dataset, info}, clock.seconds()};
}

StageResult cmd_train(const ExperimentConfig& cfg, std::ostream* log) {
  Stopwatch clock;
  cfg.validate();
  ensure_output_dir(cfg);
  const fs::path dataset_path = out_path(cfg, artifact::dataset);
  require(dataset_path, "synthesize");
  const ExpertDataset data = read_dataset_file(dataset_path);

  std::vector<TrainingReport> reports(cfg.seeds.size());
  std::vector<std::uint64_t> checksums(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.workers, [&](std::size_t i) {
    TrainConfig tc = cfg.training;
    tc.seed = cfg.seeds[i];
    auto [policy, report] = train(init_policy(data.schema(), data.num_actions(), tc), data, tc);
    write_mlp_file(policy, policy_path(cfg, tc.seed));
    checksums[i] = policy.checksum();
    reports[i] = std::move(report);
  });

  StageResult result{"train", {}, 0.0};
  json doc = sidecar_header(cfg);
  json& policies = doc["policies"] = json::array();
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const auto& r = reports[i];
    policies.push_back({{"policy_id", cfg.seeds[i]},
                        {"checksum", to_hex(checksums[i])},
                        {"epochs", r.epochs_run},
                        {"initial_accuracy", r.initial_accuracy},
                        {"final_accuracy", r.final_accuracy},
                        {"final_loss", r.epoch_loss.empty() ? 0.0 : r.epoch_loss.back()}});
    result.outputs.push_back(policy_path(cfg, cfg.seeds[i]));
    note(log, "train: " + policy_label(cfg.seeds[i]) + " accuracy " + format_real(r.final_accuracy) + " after " +
                  std::to_string(r.epochs_run) + " epochs");
  }
  const fs::path info = out_path(cfg, artifact::training_info);
  write_json(info, doc);
  result.outputs.push_back(info);
  result.seconds = clock.seconds();
  return result;
}

StageResult cmd_verify(const ExperimentConfig& cfg, std::ostream* log) {
  Stopwatch clock;
  cfg.validate();
  const ExplicitMdp m = load_model(cfg);
  const PropertyQuery query = config_query(cfg);
  const auto policies = load_policies(cfg, cfg.seeds);
  std::vector<PolicyView> views;
  for (const auto& p : policies) views.push_back(mlp_view(p, m.schema()));
  const auto classes = partition_classes(m, views, query.target, {cfg.taxi.state_cap}, cfg.workers);

  std::ostringstream csv;
  csv << "policy_id,class_id,mc_value\n";
  json doc = sidecar_header(cfg);
  doc["property"] = to_string(query);
  doc["mdp_fingerprint"] = to_hex(fingerprint(m));
  json& rows = doc["policies"] = json::array();
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const std::size_t cls = classes.class_of[i];
    const double value = classes.classes[cls].value;
    csv << csv_field(policy_label(cfg.seeds[i])) << ',' << cls + 1 << ',' << csv_number(value) << '\n';
    rows.push_back({{"policy_id", cfg.seeds[i]}, {"class_id", cls + 1}, {"mc_value", value}});
  }
  json& class_rows = doc["classes"] = json::array();
  for (std::size_t c = 0; c < classes.classes.size(); ++c) {
    const auto& cls = classes.classes[c];
    json members = json::array();
    for (std::size_t i : cls.members) members.push_back(cfg.seeds[i]);
    json row{{"class_id", c + 1},
             {"size", cls.members.size()},
             {"mc_value", cls.value},
             {"induced_states", cls.representative.chain.num_states()},
             {"induced_transitions", cls.representative.chain.num_transitions()},
             {"members", members}};
    if (query.mode == PropertyQuery::Mode::threshold) {
      row["verdict"] = check_threshold(query, cls.value) == Verdict::satisfied ? "satisfied" : "violated";
    }
    class_rows.push_back(row);
    note(log, "verify: class " + std::to_string(c + 1) + " has " + std::to_string(cls.members.size()) +
                  " policies, value " + format_real(cls.value));
  }
  const fs::path csv_path = out_path(cfg, artifact::verify_csv);
  const fs::path info = out_path(cfg, artifact::verify_info);
  write_text(csv_path, csv.str());
  write_json(info, doc);
  return {"verify", {csv_path, info}, clock.seconds()};
}

StageResult cmd_attribute(const ExperimentConfig& cfg, std::ostream* log) {
  Stopwatch clock;
  cfg.validate();
  const fs::path dataset_path = out_path(cfg, artifact::dataset);
  require(dataset_path, "synthesize");
  const ExpertDataset data = read_dataset_file(dataset_path);
  const json verify = read_json(out_path(cfg, artifact::verify_info), "verify");
  std::map<std::uint64_t, double> mc_values;
  for (const auto& row : verify.at("policies")) {
    mc_values[row.at("policy_id").get<std::uint64_t>()] = row.at("mc_value").get<double>();
  }
  const auto policies = load_policies(cfg, cfg.seeds);
  std::vector<std::vector<double>> scores(policies.size());
  parallel_for(policies.size(), cfg.workers, [&](std::size_t i) { scores[i] = mean_saliency(policies[i], data); });

  // Feature columns in alphabetical order of their names.
  const auto& names = data.schema().names();
  std::vector<std::size_t> columns(names.size());
  std::iota(columns.begin(), columns.end(), std::size_t{0});
  std::sort(columns.begin(), columns.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });

  std::ostringstream csv;
  csv << "policy_id";
  for (std::size_t f : columns) csv << ',' << csv_field(names[f]);
  csv << ",mc_value\n";
  json doc = sidecar_header(cfg);
  doc["features"] = names;
  json& rows = doc["policies"] = json::array();
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const auto it = mc_values.find(cfg.seeds[i]);
    if (it == mc_values.end()) {
      throw MissingArtifactError("verify report has no entry for " + policy_label(cfg.seeds[i]) +
                                 "; rerun the verify stage");
    }
    const FeatureRanking ranking = rank_scores(scores[i]);
    csv << csv_field(policy_label(cfg.seeds[i]));
    for (std::size_t f : columns) csv << ',' << ranking[f];
    csv << ',' << csv_number(it->second) << '\n';
    rows.push_back({{"policy_id", cfg.seeds[i]},
                    {"ranking", ranking},
                    {"mean_saliency", scores[i]},
                    {"mc_value", it->second}});
  }
  note(log, "attribute: ranked " + std::to_string(names.size()) + " features for " +
                std::to_string(policies.size()) + " policies");
  const fs::path csv_path = out_path(cfg, artifact::attribution_csv);
  const fs::path info = out_path(cfg, artifact::attribution_info);
  write_text(csv_path, csv.str());
  write_json(info, doc);
  return {"attribute", {csv_path, info}, clock.seconds()};
}

StageResult cmd_rashomon(const ExperimentConfig& cfg, std::ostream* log) {
  Stopwatch clock;
  cfg.validate();
  const json verify = read_json(out_path(cfg, artifact::verify_info), "verify");
  const json attribution = read_json(out_path(cfg, artifact::attribution_info), "attribute");
  std::map<std::uint64_t, FeatureRanking> rankings;
  for (const auto& row : attribution.at("policies")) {
    rankings[row.at("policy_id").get<std::uint64_t>()] = row.at("ranking").get<FeatureRanking>();
  }
  const json& classes = verify.at("classes");
  if (classes.empty()) throw SemanticError("verify report lists no equivalence classes");
  const json& top = classes.front();
  const auto members = top.at("members").get<std::vector<PolicyId>>();
  std::vector<FeatureRanking> member_rankings;
  for (PolicyId id : members) {
    const auto it = rankings.find(id);
    if (it == rankings.end()) {
      throw MissingArtifactError("attribution report has no entry for " + policy_label(id) +
                                 "; rerun the attribute stage");
    }
    member_rankings.push_back(it->second);
  }
  const auto set = build_rashomon_set(members, member_rankings);
  const auto groups = group_by_ranking(member_rankings);

  std::ostringstream csv;
  csv << "policy_id,ranking_group,in_rashomon_set\n";
  std::vector<std::size_t> group_of(members.size());
  json group_rows = json::array();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    json ids = json::array();
    for (std::size_t i : groups[g]) {
      group_of[i] = g + 1;
      ids.push_back(members[i]);
    }
    group_rows.push_back({{"ranking_group", g + 1}, {"ranking", member_rankings[groups[g].front()]}, {"members", ids}});
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    const bool in_set = std::binary_search(set.begin(), set.end(), members[i]);
    csv << csv_field(policy_label(members[i])) << ',' << group_of[i] << ',' << (in_set ? 1 : 0) << '\n';
  }
  json doc = sidecar_header(cfg);
  doc["class_id"] = top.at("class_id");
  doc["class_size"] = members.size();
  doc["class_mc_value"] = top.at("mc_value");
  doc["ranking_groups"] = group_rows;
  doc["rashomon_set"] = set;
  note(log, "rashomon: class of " + std::to_string(members.size()) + " policies, " +
                std::to_string(groups.size()) + " distinct rankings, set size " + std::to_string(set.size()));
  const fs::path csv_path = out_path(cfg, artifact::rashomon_csv);
  const fs::path info = out_path(cfg, artifact::rashomon_info);
  write_text(csv_path, csv.str());
  write_json(info, doc);
  return {"rashomon", {csv_path, info}, clock.seconds()};
}

StageResult cmd_shift(const ExperimentConfig& cfg, std::ostream* log) {
  Stopwatch clock;
  cfg.validate();
  const json rashomon = read_json(out_path(cfg, artifact::rashomon_info), "rashomon");
  const auto ids = rashomon.at("rashomon_set").get<std::vector<PolicyId>>();
  const auto members = load_policies(cfg, ids);
  ShiftOptions options;
  options.induced.state_cap = cfg.taxi.state_cap;
  options.workers = cfg.workers;
  const ShiftReport report = shift_eval(cfg.taxi, cfg.shift_min_jobs, cfg.shift_max_jobs, ids, members, options);

  std::ostringstream csv;
  csv << "policy";
  for (const auto& col : report.columns) csv << ",jobs_" << col.num_jobs;
  csv << '\n';
  const auto emit_row = [&](const std::string& label, auto&& value_of) {
    csv << csv_field(label);
    for (const auto& col : report.columns) csv << ',' << csv_number(value_of(col));
    csv << '\n';
  };
  for (std::size_t i = 0; i < ids.size(); ++i) {
    emit_row(policy_label(ids[i]), [i](const ShiftColumn& c) { return c.members[i]; });
  }
  emit_row("member_mean", [](const ShiftColumn& c) { return c.member_mean; });
  emit_row("ensemble", [](const ShiftColumn& c) { return c.ensemble; });
  emit_row("permissive_max", [](const ShiftColumn& c) { return c.permissive_max; });
  emit_row("permissive_min", [](const ShiftColumn& c) { return c.permissive_min; });
  emit_row("optimal", [](const ShiftColumn& c) { return c.optimal; });

  std::ostringstream sizes;
  sizes << "jobs,full_states,full_transitions,permissive_states,permissive_transitions,members_diverge\n";
  json doc = sidecar_header(cfg);
  doc["members"] = ids;
  json& cols = doc["columns"] = json::array();
  for (const auto& c : report.columns) {
    sizes << c.num_jobs << ',' << c.full_states << ',' << c.full_transitions << ',' << c.permissive_states << ','
          << c.permissive_transitions << ',' << (c.members_diverge ? 1 : 0) << '\n';
    cols.push_back({{"jobs", c.num_jobs},
                    {"members", c.members},
                    {"member_mean", c.member_mean},
                    {"ensemble", c.ensemble},
                    {"permissive_max", c.permissive_max},
                    {"permissive_min", c.permissive_min},
                    {"optimal", c.optimal},
                    {"full_states", c.full_states},
                    {"full_transitions", c.full_transitions},
                    {"permissive_states", c.permissive_states},
                    {"permissive_transitions", c.permissive_transitions},
                    {"members_diverge", c.members_diverge}});
    note(log, "shift: " + std::to_string(c.num_jobs) + " jobs, member mean " + csv_number(c.member_mean) +
                  ", permissive " + csv_number(c.permissive_min) + ".." + csv_number(c.permissive_max) +
                  ", optimal " + csv_number(c.optimal));
  }
  const fs::path csv_path = out_path(cfg, artifact::shift_csv);
  const fs::path sizes_path = out_path(cfg, artifact::shift_sizes_csv);
  const fs::path info = out_path(cfg, artifact::shift_info);
  write_text(csv_path, csv.str());
  write_text(sizes_path, sizes.str());
  write_json(info, doc);
  return {"shift", {csv_path, sizes_path, info}, clock.seconds()};
}

RunManifest cmd_all(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  RunManifest manifest;
  manifest.config_checksum = cfg.checksum();
  manifest.stages.push_back(cmd_build(cfg, log));
  manifest.stages.push_back(cmd_synthesize(cfg, log));
  manifest.stages.push_back(cmd_train(cfg, log));
  StageResult verify = cmd_verify(cfg, log);
  StageResult attribute = cmd_attribute(cfg, log);
  verify.outputs.insert(verify.outputs.end(), attribute.outputs.begin(), attribute.outputs.end());
  verify.seconds += attribute.seconds;
  manifest.stages.push_back(std::move(verify));
  manifest.stages.push_back(cmd_rashomon(cfg, log));
  manifest.stages.push_back(cmd_shift(cfg, log));

  json doc{{"version", manifest.version}, {"config_checksum", to_hex(manifest.config_checksum)}};
  json& stages = doc["stages"] = json::array();
  for (const auto& stage : manifest.stages) {
    json outputs = json::array();
    for (const auto& p : stage.outputs) outputs.push_back(p.string());
    stages.push_back({{"stage", stage.stage}, {"outputs", outputs}, {"seconds", stage.seconds}});
  }
  write_json(out_path(cfg, artifact::manifest), doc);
  return manifest;
}

}  // namespace rashomon
