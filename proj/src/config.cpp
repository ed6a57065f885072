#include "hdt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "hdt/errors.hpp"

namespace hdt {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

InitialState parse_initial_state(const std::string& v) {
  if (v == "uniform_random") return {InitialStateMode::uniform_random, 0};
  if (v == "low_degree") return {InitialStateMode::low_degree, 0};
  if (v == "high_degree") return {InitialStateMode::high_degree, 0};
  if (v.rfind("node:", 0) == 0) return {InitialStateMode::fixed, to_uint("initial_state", v.substr(5))};
  throw ConfigError("initial_state: expected uniform_random, low_degree, high_degree or node:<id>, got '" + v + "'");
}

std::string describe_initial_state(const InitialState& s) {
  switch (s.mode) {
    case InitialStateMode::uniform_random: return "uniform_random";
    case InitialStateMode::low_degree: return "low_degree";
    case InitialStateMode::high_degree: return "high_degree";
    case InitialStateMode::fixed: return "node:" + std::to_string(s.label);
  }
  return "?";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

KeyValues load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

ExperimentConfig make_config(const KeyValues& kv, const std::set<std::string>& passthrough) {
  ExperimentConfig c;
  for (const auto& [key, v] : kv) {
    if (key == "sampler") c.sampler = parse_sampler_kind(v);
    else if (key == "alpha") c.alpha = to_double(key, v);
    else if (key == "mtm_k") c.mtm.num_candidates = to_uint(key, v);
    else if (key == "mtm_h") c.mtm.balance = parse_balance_function(v);
    else if (key == "target") c.target = v;
    else if (key == "total_steps") c.total_steps = to_uint(key, v);
    else if (key == "burn_in_fraction") c.burn_in_fraction = to_double(key, v);
    else if (key == "fake_count") c.fake_count = parse_fake_count_mode(v);
    else if (key == "lru_ratio") c.lru_ratio = to_double(key, v);
    else if (key == "initial_state") c.initial_state = parse_initial_state(v);
    else if (key == "replications") c.replications = to_uint(key, v);
    else if (key == "base_seed") c.base_seed = to_uint(key, v);
    else if (key == "snapshot_stride") c.snapshot_stride = to_uint(key, v);
    else if (key == "budget") c.budget = to_double(key, v);
    else if (key == "label_p") c.label_p = to_double(key, v);
    else if (key == "nrmse_truth") {
      if (v == "mu") c.nrmse_truth = NrmseTruth::mu;
      else if (v == "uniform") c.nrmse_truth = NrmseTruth::uniform;
      else throw ConfigError("nrmse_truth: expected mu or uniform, got '" + v + "'");
    } else if (!passthrough.count(key)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return c;
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("sampler", std::string(to_string(c.sampler)));
  out.emplace_back("alpha", format_double(c.alpha));
  out.emplace_back("mtm_k", std::to_string(c.mtm.num_candidates));
  out.emplace_back("mtm_h", std::string(to_string(c.mtm.balance)));
  out.emplace_back("target", c.target);
  if (c.total_steps) out.emplace_back("total_steps", std::to_string(c.total_steps));
  if (c.budget) out.emplace_back("budget", format_double(*c.budget));
  out.emplace_back("burn_in_fraction", format_double(c.effective_burn_in_fraction()));
  out.emplace_back("fake_count", std::string(to_string(c.fake_count)));
  if (c.lru_ratio) out.emplace_back("lru_ratio", format_double(*c.lru_ratio));
  out.emplace_back("initial_state", describe_initial_state(c.initial_state));
  out.emplace_back("replications", std::to_string(c.replications));
  out.emplace_back("base_seed", std::to_string(c.base_seed));
  if (!c.budget) out.emplace_back("snapshot_stride", std::to_string(c.effective_stride()));
  out.emplace_back("label_p", format_double(c.label_p));
  if (c.nrmse_truth) out.emplace_back("nrmse_truth", *c.nrmse_truth == NrmseTruth::mu ? "mu" : "uniform");
  return out;
}

TargetWeights resolve_target(const std::string& spec, const Graph& graph) {
  if (spec == "uniform") return TargetWeights::uniform(graph);
  if (spec == "degree") return TargetWeights::degree(graph);
  if (spec.rfind("file:", 0) == 0) return load_target_weights_file(spec.substr(5), graph);
  throw ConfigError("target: expected uniform, degree or file:<path>, got '" + spec + "'");
}

}  // namespace hdt
