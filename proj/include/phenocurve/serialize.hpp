#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "phenocurve/dates.hpp"
#include "phenocurve/fpca.hpp"
#include "phenocurve/pipeline.hpp"
#include "phenocurve/polygon.hpp"
#include "phenocurve/simulation.hpp"

namespace phenocurve {

nlohmann::json to_json(const PhenoDates& dates);
PhenoDates phenodates_from_json(const nlohmann::json& j);

// Scalar summary of a fit: smoothing values, iterations, flags and traces.
nlohmann::json to_json(const FpcaFit& fit);
nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const PolygonSummary& summary);
// Dates, fit summary and cluster decision of one pixel.
nlohmann::json to_json(const PixelResult& result);

// One-row date tables: six DoY columns then flags ("|"-joined). Empty cells for absent dates.
std::string dates_csv_header(bool with_id);
std::string dates_csv_row(const PhenoDates& dates);
std::string polygon_dates_csv(const std::vector<PixelOutcome>& pixels);

std::string mse_table_csv(const MseTable& table);

}  // namespace phenocurve
