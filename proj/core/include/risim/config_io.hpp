#pragma once

#include <iosfwd>
#include <string>

#include "risim/harness.hpp"

namespace risim::sim {

/// Parses a scenario config document (INI-style sections, `key = value`
/// lines, `#` comments). Errors carry file:line and the offending field.
/// Relative trace paths resolve against the config file's directory.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(std::istream& in, const std::string& origin,
                            const std::string& base_dir);

/// Writes every field at full precision; load(save(cfg)) == cfg.
void save_config(const ScenarioConfig& cfg, const std::string& path);
void write_config(const ScenarioConfig& cfg, std::ostream& out);

} // namespace risim::sim
