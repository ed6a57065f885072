#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hdt/engine.hpp"
#include "hdt/graph.hpp"
#include "hdt/target.hpp"

namespace hdt {

using KeyValues = std::map<std::string, std::string>;

/// Flat "key = value" text; '#' starts a comment line. Duplicate keys and
/// malformed lines raise ConfigError naming the line.
KeyValues parse_key_values(std::istream& in);
KeyValues load_config_file(const std::string& path);

/// Builds a config from keys. Keys not understood (and not listed in
/// `passthrough`) raise ConfigError. The result is not yet validated.
ExperimentConfig make_config(const KeyValues& kv, const std::set<std::string>& passthrough = {});

/// Resolved settings as ordered (key, value) pairs; feeding them back to
/// make_config gives the same config.
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& cfg);

/// "uniform", "degree" or "file:<path>".
TargetWeights resolve_target(const std::string& spec, const Graph& graph);

/// Shortest decimal that round-trips.
std::string format_double(double v);

}  // namespace hdt
