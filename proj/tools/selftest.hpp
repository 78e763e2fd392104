#pragma once

#include <nlohmann/json.hpp>

namespace dape::tools {

// Closed-form checks of the MMD estimator, kernel, schedules and filter.
// Sets "passed" in the returned report.
nlohmann::json run_selftest();

}  // namespace dape::tools
