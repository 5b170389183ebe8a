#include "procbench/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "procbench/util/errors.hpp"

namespace procbench {

using nlohmann::json;

namespace {

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::size_t get_count(const json& obj, const char* key, const std::string& where, std::size_t fallback,
                      std::size_t min = 1) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min)) {
    throw ConfigError(where + "." + key + " must be an integer >= " + std::to_string(min));
  }
  return v.get<std::size_t>();
}

DatasetConfig parse_dataset(const json& j, std::size_t index, const std::filesystem::path& base) {
  const std::string where = "datasets[" + std::to_string(index) + "]";
  allow_keys(j, where, {"name", "path", "format", "columns", "timestamp_format", "compose_lifecycle", "duplicates"});
  DatasetConfig d;
  d.name = get<std::string>(j, "name", where, "");
  const auto path = get<std::string>(j, "path", where, "");
  if (d.name.empty() || path.empty()) throw ConfigError(where + " needs a name and a path");
  d.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base / path;
  const auto fmt = get<std::string>(j, "format", where, d.path.string().find(".xes") != std::string::npos ? "xes" : "csv");
  if (fmt == "csv") {
    d.format = LogFormat::csv;
  } else if (fmt == "xes") {
    d.format = LogFormat::xes;
  } else {
    throw ConfigError(where + ".format must be csv or xes");
  }
  if (j.contains("columns")) {
    const auto& c = j.at("columns");
    allow_keys(c, where + ".columns", {"case_id", "event_type", "timestamp", "lifecycle"});
    d.columns.case_id = get<std::string>(c, "case_id", where, d.columns.case_id);
    d.columns.event_type = get<std::string>(c, "event_type", where, d.columns.event_type);
    d.columns.timestamp = get<std::string>(c, "timestamp", where, d.columns.timestamp);
    d.columns.lifecycle = get<std::string>(c, "lifecycle", where, d.columns.lifecycle);
  }
  d.timestamp_format = get<std::string>(j, "timestamp_format", where, d.timestamp_format);
  d.compose_lifecycle = get<bool>(j, "compose_lifecycle", where, false);
  const auto dup = get<std::string>(j, "duplicates", where, "merge");
  if (dup == "merge") {
    d.duplicates = DuplicateCases::merge;
  } else if (dup == "keep") {
    d.duplicates = DuplicateCases::keep;
  } else {
    throw ConfigError(where + ".duplicates must be merge or keep");
  }
  return d;
}

LearnerSpec parse_learner(const json& j, std::size_t index) {
  const std::string where = "base_learners[" + std::to_string(index) + "]";
  LearnerSpec spec;
  if (j.is_string()) {
    spec.id = j.get<std::string>();
  } else {
    allow_keys(j, where, {"id", "params"});
    spec.id = get<std::string>(j, "id", where, "");
    if (j.contains("params")) {
      const auto& p = j.at("params");
      if (!p.is_object()) throw ConfigError(where + ".params must be an object");
      for (const auto& [k, v] : p.items()) {
        if (v.is_boolean()) {
          spec.params[k] = v.get<bool>() ? 1.0 : 0.0;
        } else if (v.is_number()) {
          spec.params[k] = v.get<double>();
        } else {
          throw ConfigError(where + ".params." + k + " must be a number or boolean");
        }
      }
    }
  }
  if (spec.id.empty()) throw ConfigError(where + " needs an id");
  make_learner(spec);  // rejects unknown ids and parameters early
  return spec;
}

}  // namespace

const DatasetConfig& BenchmarkConfig::dataset(const std::string& name) const {
  for (const auto& d : datasets) {
    if (d.name == name) return d;
  }
  throw ConfigError("no dataset named '" + name + "' in the config");
}

EnsembleSpec BenchmarkConfig::ensemble_spec(Scheme scheme, const LearnerSpec& base) const {
  EnsembleSpec s;
  s.scheme = scheme;
  s.base = base;
  switch (scheme) {
    case Scheme::Individual: break;
    case Scheme::Bagging: s.members = ensemble.bagging; s.sample_frac = ensemble.bag_fraction; break;
    case Scheme::Boosting: s.members = ensemble.boosting; break;
    case Scheme::RandomSubspace: s.members = ensemble.subspace_members; s.subspace = ensemble.subspace_fraction; break;
    case Scheme::NestedDichotomies: s.members = ensemble.nested_dichotomies; break;
    case Scheme::Dagging: s.members = ensemble.dagging; break;
  }
  return s;
}

BenchmarkConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(root, "config", {"datasets", "window_sizes", "schemes", "base_learners", "ensemble", "plan",
                              "output_dir", "workers", "variability_threshold", "coverage_rule", "alpha"});
  BenchmarkConfig cfg;
  if (!root.contains("datasets") || !root["datasets"].is_array() || root["datasets"].empty()) {
    throw ConfigError("config needs a non-empty datasets list");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < root["datasets"].size(); ++i) {
    auto d = parse_dataset(root["datasets"][i], i, base_dir);
    if (!names.insert(d.name).second) throw ConfigError("duplicate dataset name '" + d.name + "'");
    cfg.datasets.push_back(std::move(d));
  }
  if (root.contains("window_sizes")) {
    const auto& w = root["window_sizes"];
    if (!w.is_array() || w.empty()) throw ConfigError("window_sizes must be a non-empty list");
    cfg.window_sizes.clear();
    for (const auto& v : w) {
      if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError("window sizes must be integers >= 1");
      cfg.window_sizes.push_back(v.get<std::size_t>());
    }
  }
  if (root.contains("schemes")) {
    if (!root["schemes"].is_array() || root["schemes"].empty()) throw ConfigError("schemes must be a non-empty list");
    for (const auto& v : root["schemes"]) {
      if (!v.is_string()) throw ConfigError("schemes must be strings");
      cfg.schemes.push_back(parse_scheme(v.get<std::string>()));
    }
  } else {
    cfg.schemes = {Scheme::Individual, Scheme::Bagging, Scheme::Boosting,
                   Scheme::RandomSubspace, Scheme::NestedDichotomies, Scheme::Dagging};
  }
  if (root.contains("base_learners")) {
    if (!root["base_learners"].is_array() || root["base_learners"].empty()) {
      throw ConfigError("base_learners must be a non-empty list");
    }
    for (std::size_t i = 0; i < root["base_learners"].size(); ++i) {
      cfg.base_learners.push_back(parse_learner(root["base_learners"][i], i));
    }
  } else {
    for (const char* id : {"DT", "RT", "DS", "NB", "KNN", "ONER", "CR"}) cfg.base_learners.push_back(LearnerSpec{id, {}});
  }
  if (root.contains("ensemble")) {
    const auto& e = root["ensemble"];
    allow_keys(e, "ensemble", {"bagging", "bag_fraction", "boosting", "subspace_members", "subspace_fraction",
                               "nested_dichotomies", "dagging"});
    auto& s = cfg.ensemble;
    s.bagging = get_count(e, "bagging", "ensemble", s.bagging);
    s.bag_fraction = get<double>(e, "bag_fraction", "ensemble", s.bag_fraction);
    s.boosting = get_count(e, "boosting", "ensemble", s.boosting);
    s.subspace_members = get_count(e, "subspace_members", "ensemble", s.subspace_members);
    s.subspace_fraction = get<double>(e, "subspace_fraction", "ensemble", s.subspace_fraction);
    s.nested_dichotomies = get_count(e, "nested_dichotomies", "ensemble", s.nested_dichotomies);
    s.dagging = get_count(e, "dagging", "ensemble", s.dagging, 2);
    if (!(s.bag_fraction > 0 && s.bag_fraction <= 1)) throw ConfigError("ensemble.bag_fraction must lie in (0, 1]");
    if (!(s.subspace_fraction > 0 && s.subspace_fraction <= 1)) {
      throw ConfigError("ensemble.subspace_fraction must lie in (0, 1]");
    }
  }
  if (root.contains("plan")) {
    const auto& p = root["plan"];
    allow_keys(p, "plan", {"train_fraction", "repetitions", "master_seed"});
    cfg.plan.train_fraction = get<double>(p, "train_fraction", "plan", cfg.plan.train_fraction);
    cfg.plan.repetitions = get_count(p, "repetitions", "plan", cfg.plan.repetitions);
    cfg.plan.master_seed = get<std::uint64_t>(p, "master_seed", "plan", cfg.plan.master_seed);
  }
  cfg.plan.validate();
  const auto out = get<std::string>(root, "output_dir", "config", cfg.output_dir.string());
  cfg.output_dir = std::filesystem::path(out).is_absolute() ? std::filesystem::path(out) : base_dir / out;
  cfg.workers = get_count(root, "workers", "config", cfg.workers);
  cfg.variability_threshold = get<double>(root, "variability_threshold", "config", cfg.variability_threshold);
  const auto rule = get<std::string>(root, "coverage_rule", "config", "reaches_target");
  if (rule == "reaches_target") {
    cfg.coverage_rule = CoverageRule::reaches_target;
  } else if (rule == "below_target") {
    cfg.coverage_rule = CoverageRule::below_target;
  } else {
    throw ConfigError("coverage_rule must be reaches_target or below_target");
  }
  cfg.alpha = get<double>(root, "alpha", "config", cfg.alpha);
  if (!(cfg.alpha > 0 && cfg.alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
  for (const auto& d : cfg.datasets) {
    if (!std::filesystem::exists(d.path)) {
      throw DataError("dataset '" + d.name + "': file not found: " + d.path.string());
    }
  }
  return cfg;
}

BenchmarkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

EventLog load_dataset(const DatasetConfig& ds) {
  if (ds.format == LogFormat::xes) {
    XesOptions opt;
    opt.compose_lifecycle = ds.compose_lifecycle;
    opt.duplicates = ds.duplicates;
    auto log = parse_xes_log(ds.path, opt);
    return EventLog(ds.name, std::vector<Trace>(log.traces()), std::vector<std::string>(log.alphabet()));
  }
  std::ifstream in(ds.path, std::ios::binary);
  if (!in) throw DataError("cannot open " + ds.path.string());
  return parse_csv_log(in, ds.name, ds.columns, TimestampFormat(ds.timestamp_format));
}

}  // namespace procbench
