#pragma once

#include <string>
#include <vector>

#include "gtecon/harness.hpp"

namespace gtecon {

// Long-format, plot-ready tables. Column layout is pinned by golden tests.
std::string results_to_csv(const std::vector<ScenarioResult>& results);
std::string results_to_json(const std::vector<ScenarioResult>& results);
std::string choices_to_csv(const std::vector<OptimalChoice>& choices);
std::string choices_to_json(const std::vector<OptimalChoice>& choices);

/// FNV-1a over file bytes, hex-encoded; used in run manifests.
std::string file_digest(const std::string& path);

}  // namespace gtecon
