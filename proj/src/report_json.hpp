#pragma once

// nlohmann/json conversions for the report documents. Internal to the library.

#include <json.hpp>

#include "demandfc/backtest.hpp"
#include "demandfc/diagnostics.hpp"
#include "demandfc/pipeline.hpp"

namespace demandfc::detail {

using Json = nlohmann::ordered_json;

Json to_json(const ArimaOrder& o);
Json to_json(const ArimaModel& m);
Json to_json(const CorrelogramResult& c);
Json to_json(const DistributionSummary& s);
Json to_json(const AdfResult& r);
Json to_json(const PortmanteauResult& r);
Json to_json(const ArchTestResult& r);
Json to_json(const BootstrapResult& r);
Json to_json(const WindowScheme& s);
Json to_json(const RunConfig& cfg);

std::string window_errors_csv(const std::vector<std::pair<std::string, const WindowErrors*>>& rows);
std::string nde_csv(const ComparisonReport& report);

}  // namespace demandfc::detail
