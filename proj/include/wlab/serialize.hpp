#pragma once

#include <json.hpp>

#include "wlab/functionals.hpp"
#include "wlab/moebius.hpp"
#include "wlab/rigidity.hpp"

namespace wlab {

using json = nlohmann::json;

inline constexpr const char* tool_version = "willmore-lab 1.0.0";

json to_json(const EnergyReport& r);
json to_json(const GaussBonnetRecord& r);
json to_json(const InversionLedger& r);
json to_json(const MoebiusTransform& t);
json to_json(const WeightedDistance& d);
json to_json(const AlignmentResult& r);
json to_json(const SweepResult& r);

MoebiusTransform moebius_from_json(const json& j);

/// CSV rows for sweeps; header fixed by the external interface:
/// epsilon,delta,distance,area,normalized_distance,converged
std::string sweep_csv(const SweepResult& r);
/// Energy-report row form for sweep tables.
std::string energy_csv_header();
std::string energy_csv_row(const EnergyReport& r);
/// Weighted-distance row: surface label, model label, value, the three
/// components, grid tag.
std::string distance_csv_header();
std::string distance_csv_row(const std::string& surface, const std::string& model,
                             const WeightedDistance& d);
/// Plot-ready two-column data plus a generated gnuplot script.
std::string sweep_dat(const SweepResult& r);
std::string sweep_gnuplot(const std::string& dat_filename);

}  // namespace wlab
