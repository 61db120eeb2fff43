#include "mscp/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mscp {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

double parse_gamma_text(const std::string& text, bool& from_sources) {
  if (text == "(K-1)/K") {
    from_sources = true;
    return 0.5;
  }
  from_sources = false;
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double gamma = std::strtod(begin, &end);
  if (errno != 0 || end != begin + text.size() || text.empty()) {
    throw ConfigError("method: cannot parse gamma '" + text + "'");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ConfigError("method: gamma must lie in [0, 1)");
  }
  return gamma;
}

const json& require_key(const json& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("config: missing key '" + key + "'");
  return *it;
}

double get_number(const json& j, const std::string& key) {
  const json& value = require_key(j, key);
  if (!value.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return value.get<double>();
}

int get_int(const json& j, const std::string& key) {
  const json& value = require_key(j, key);
  if (!value.is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
  return value.get<int>();
}

std::uint64_t get_seed(const json& j, const std::string& key) {
  const json& value = require_key(j, key);
  if (!value.is_number_unsigned() && !value.is_number_integer()) {
    throw ConfigError("config: '" + key + "' must be a nonnegative integer");
  }
  if (value.is_number_integer() && value.get<std::int64_t>() < 0) {
    throw ConfigError("config: '" + key + "' must be a nonnegative integer");
  }
  return value.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& key) {
  const json& value = require_key(j, key);
  if (!value.is_string()) throw ConfigError("config: '" + key + "' must be a string");
  return value.get<std::string>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError("config: '" + key + "' must be a boolean");
  return it->get<bool>();
}

std::vector<double> get_number_list(const json& j, const std::string& key) {
  const json& value = require_key(j, key);
  if (!value.is_array() || value.empty()) {
    throw ConfigError("config: '" + key + "' must be a nonempty array");
  }
  std::vector<double> out;
  for (const json& item : value) {
    if (!item.is_number()) throw ConfigError("config: '" + key + "' entries must be numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

std::vector<int> get_int_list(const json& j, const std::string& key) {
  const json& value = require_key(j, key);
  if (!value.is_array() || value.empty()) {
    throw ConfigError("config: '" + key + "' must be a nonempty array");
  }
  std::vector<int> out;
  for (const json& item : value) {
    if (!item.is_number_integer()) {
      throw ConfigError("config: '" + key + "' entries must be integers");
    }
    out.push_back(item.get<int>());
  }
  return out;
}

}  // namespace

std::string task_name(Task task) {
  switch (task) {
    case Task::Figure1: return "figure1";
    case Task::Regression: return "regression";
    case Task::Classification: return "classification";
  }
  throw std::logic_error("task_name: unknown task");
}

MethodSpec MethodSpec::parse(const std::string& text) {
  MethodSpec spec;
  if (text == "CP") {
    spec.kind = Kind::CP;
    return spec;
  }
  if (text == "WCP") {
    spec.kind = Kind::WCP;
    return spec;
  }
  if (text == "PooledWCP") {
    spec.kind = Kind::PooledWCP;
    return spec;
  }
  const auto parse_inner = [&](const std::string& prefix) -> std::string {
    return text.substr(prefix.size(), text.size() - prefix.size() - 1);
  };
  if (text.rfind("MergedVote(", 0) == 0 && text.back() == ')') {
    spec.kind = Kind::MergedVote;
    spec.gamma = parse_gamma_text(parse_inner("MergedVote("), spec.gamma_from_sources);
    return spec;
  }
  if (text.rfind("MergedPvalue(", 0) == 0 && text.back() == ')') {
    spec.kind = Kind::MergedPvalue;
    const std::string inner = parse_inner("MergedPvalue(");
    if (inner == "bonferroni") {
      spec.pvalue_rule = MergeRule::Kind::BonferroniMin;
      return spec;
    }
    if (inner == "twice_mean") {
      spec.pvalue_rule = MergeRule::Kind::TwiceMean;
      return spec;
    }
    if (inner.rfind("gamma_vote,", 0) == 0) {
      spec.pvalue_rule = MergeRule::Kind::GammaVote;
      spec.gamma = parse_gamma_text(inner.substr(std::string("gamma_vote,").size()),
                                    spec.gamma_from_sources);
      if (!spec.gamma_from_sources && spec.gamma == 0.0) {
        throw ConfigError("method: gamma_vote merging requires gamma > 0");
      }
      return spec;
    }
    throw ConfigError("method: unknown merge rule '" + inner + "'");
  }
  throw ConfigError("config: unknown method '" + text + "'");
}

std::string MethodSpec::name() const {
  switch (kind) {
    case Kind::CP: return "CP";
    case Kind::WCP: return "WCP";
    case Kind::PooledWCP: return "PooledWCP";
    case Kind::MergedVote:
      return "MergedVote(" +
             (gamma_from_sources ? std::string("(K-1)/K") : format_double(gamma)) + ")";
    case Kind::MergedPvalue:
      switch (pvalue_rule) {
        case MergeRule::Kind::BonferroniMin: return "MergedPvalue(bonferroni)";
        case MergeRule::Kind::TwiceMean: return "MergedPvalue(twice_mean)";
        case MergeRule::Kind::GammaVote:
          return "MergedPvalue(gamma_vote," +
                 (gamma_from_sources ? std::string("(K-1)/K") : format_double(gamma)) + ")";
      }
  }
  throw std::logic_error("MethodSpec::name: unknown method");
}

double MethodSpec::resolve_gamma(int num_sources) const {
  if (!gamma_from_sources) return gamma;
  if (num_sources < 1) throw ConfigError("method: source count must be >= 1");
  return (static_cast<double>(num_sources) - 1.0) / static_cast<double>(num_sources);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: document must be a JSON object");

  ExperimentConfig config;
  const std::string task = get_string(j, "task");
  std::set<std::string> allowed = {"task",       "alpha",      "replications",
                                   "master_seed", "ratio_mode", "methods"};
  if (task == "figure1") {
    config.task = Task::Figure1;
    allowed.insert({"mu_grid", "calibration_sizes", "train_size", "target_unlabeled_size"});
  } else if (task == "regression") {
    config.task = Task::Regression;
    allowed.insert({"dimension", "num_sources", "hetero_scale_sq", "source_sizes"});
  } else if (task == "classification") {
    config.task = Task::Classification;
    allowed.insert({"num_sources", "num_classes", "separation", "per_domain",
                    "identical_proportions"});
  } else {
    throw ConfigError("config: unknown task '" + task + "'");
  }

  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ConfigError("config: unknown key '" + item.key() + "'");
    }
  }

  config.alpha = get_number(j, "alpha");
  config.replications = get_int(j, "replications");
  config.master_seed = get_seed(j, "master_seed");

  const std::string mode = get_string(j, "ratio_mode");
  if (mode == "oracle") {
    config.ratio_mode = RatioMode::Oracle;
  } else if (mode == "logistic") {
    config.ratio_mode = RatioMode::Logistic;
  } else {
    throw ConfigError("config: ratio_mode must be 'oracle' or 'logistic'");
  }

  const json& methods = require_key(j, "methods");
  if (!methods.is_array() || methods.empty()) {
    throw ConfigError("config: 'methods' must be a nonempty array");
  }
  for (const json& method : methods) {
    if (!method.is_string()) throw ConfigError("config: 'methods' entries must be strings");
    config.methods.push_back(MethodSpec::parse(method.get<std::string>()));
  }

  switch (config.task) {
    case Task::Figure1:
      config.mu_grid = get_number_list(j, "mu_grid");
      config.calibration_sizes = get_int_list(j, "calibration_sizes");
      config.train_size = get_int(j, "train_size");
      config.target_unlabeled_size = j.contains("target_unlabeled_size")
                                         ? get_int(j, "target_unlabeled_size")
                                         : config.train_size;
      break;
    case Task::Regression:
      config.dimension = get_int(j, "dimension");
      config.num_sources = get_int(j, "num_sources");
      config.hetero_scale_sq = get_number(j, "hetero_scale_sq");
      if (j.contains("source_sizes")) {
        config.explicit_source_sizes = get_int_list(j, "source_sizes");
      }
      break;
    case Task::Classification:
      config.num_sources = get_int(j, "num_sources");
      config.num_classes = get_int(j, "num_classes");
      config.separation = get_number(j, "separation");
      config.per_domain = get_int(j, "per_domain");
      config.identical_proportions = get_bool(j, "identical_proportions", false);
      break;
  }

  config.validate();
  return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config: alpha must lie in (0, 1)");
  if (replications < 1) throw ConfigError("config: replications must be >= 1");
  if (methods.empty()) throw ConfigError("config: empty method list");

  for (const MethodSpec& method : methods) {
    const bool single_source_only =
        method.kind == MethodSpec::Kind::WCP;
    const bool multi_source_only =
        method.kind == MethodSpec::Kind::PooledWCP ||
        method.kind == MethodSpec::Kind::MergedVote ||
        method.kind == MethodSpec::Kind::MergedPvalue;
    if (task == Task::Figure1 && multi_source_only) {
      throw ConfigError("config: method '" + method.name() + "' needs multiple sources");
    }
    if (task != Task::Figure1 && single_source_only) {
      throw ConfigError("config: method 'WCP' applies to the single-source task only");
    }
  }

  switch (task) {
    case Task::Figure1:
      for (const double mu : mu_grid) {
        if (!std::isfinite(mu)) throw ConfigError("config: mu_grid entries must be finite");
      }
      for (const int n : calibration_sizes) {
        if (n < 1) throw ConfigError("config: calibration sizes must be >= 1");
      }
      if (train_size < 2) throw ConfigError("config: train_size must be >= 2");
      if (target_unlabeled_size < 1) {
        throw ConfigError("config: target_unlabeled_size must be >= 1");
      }
      break;
    case Task::Regression: {
      if (dimension < 2) throw ConfigError("config: dimension must be >= 2");
      if (num_sources < 1) throw ConfigError("config: num_sources must be >= 1");
      if (hetero_scale_sq < 0.0 || !std::isfinite(hetero_scale_sq)) {
        throw ConfigError("config: hetero_scale_sq must be finite and >= 0");
      }
      if (explicit_source_sizes.empty()) {
        if (num_sources != 5 && num_sources != 10) {
          throw ConfigError("config: this source count needs explicit 'source_sizes'");
        }
      } else {
        if (static_cast<int>(explicit_source_sizes.size()) != num_sources) {
          throw ConfigError("config: 'source_sizes' must list one size per source");
        }
        for (const int n : explicit_source_sizes) {
          if (n < 2) throw ConfigError("config: source sizes must be >= 2");
        }
      }
      break;
    }
    case Task::Classification:
      if (num_sources < 2) throw ConfigError("config: num_sources must be >= 2");
      if (num_classes < 2) throw ConfigError("config: num_classes must be >= 2");
      if (separation < 0.0 || !std::isfinite(separation)) {
        throw ConfigError("config: separation must be finite and >= 0");
      }
      if (per_domain < 4) throw ConfigError("config: per_domain must be >= 4");
      break;
  }
}

}  // namespace mscp
