#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbs/calibration/bma.hpp"
#include "sbs/calibration/checking.hpp"
#include "sbs/smc/config.hpp"
#include "sbs/smc/trace.hpp"

namespace sbs {

using Json = nlohmann::json;

Json to_json(const smc::SamplerConfig& config);
/// Overrides the fields present in `j`; unknown keys throw std::invalid_argument.
smc::SamplerConfig sampler_config_from_json(const Json& j, smc::SamplerConfig base = {});

/// rho, cESS, ESS, resampling flags, log ratios, U means and both evidence values.
Json to_json(const smc::TemperingTrace& trace);

Json to_json(const calibration::CalibrationReport& report);
Json to_json(const calibration::BmaSummary& summary);

/// replicate,method,phi,u rows for every report.
void write_u_csv(const std::filesystem::path& path,
                 const std::vector<calibration::CalibrationReport>& reports);

/// Stable two-space indented dump with a trailing newline. Non-finite numbers become null.
std::string dump_json(const Json& j);

const char* version_string();

}  // namespace sbs
