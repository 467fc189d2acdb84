#pragma once

#include <string>

#include "json.hpp"
#include "momopt/driver.hpp"

namespace momopt {

/// {status, f_star, v_by_order, minimizers, residual, timings_ms}. Non-finite
/// reals become null. With `diagnostics`, each order also carries the level,
/// statuses, ranks and messages.
nlohmann::ordered_json report_to_json(const RunReport& rep, bool diagnostics = false);

/// Same layout for a single relaxation; status is the solver status.
nlohmann::ordered_json minimize_to_json(const MinimizeResult& res, bool diagnostics = false);

/// Serializes with every real printed to 17 significant digits.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

}  // namespace momopt
