#pragma once

#include "json.hpp"

#include "msv/calibration.hpp"

namespace msv::cli {

[[nodiscard]] nlohmann::json to_json(const ErrorReport& report);
[[nodiscard]] nlohmann::json to_json(const CalibrationResult& result);
/// Reads back what to_json(CalibrationResult) wrote (report and traces are skipped).
[[nodiscard]] CalibrationResult result_from_json(const nlohmann::json& j);

}  // namespace msv::cli
