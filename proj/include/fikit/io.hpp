#pragma once

#include <string>
#include <vector>

#include "fikit/report.hpp"
#include "fikit/space.hpp"
#include "fikit/transport.hpp"

namespace fikit {

// Space file: JSON with kind, points (id, optional coords), metric
// ({"type":"matrix","data":[[...]]} or {"type":"graph","edges":[[i,j,len]]})
// and geo_tol.
void save_space(const MetricSpace& space, const std::string& path);
MetricSpace load_space(const std::string& path);

// Field/measure file: CSV `point_id,value`, LF endings, shortest
// round-trip decimals.
void save_field(const ScalarField& f, const std::string& path);
ScalarField load_field(const std::string& path);
void save_measure(const ProbabilityMeasure& mu, const std::string& path);
ProbabilityMeasure load_measure(const std::string& path);

// Hopf-Lax results: CSV `point_id,u,argmin_id`.
void save_hopf_lax_csv(const ScalarField& u, const std::vector<int>& argmin,
                       const std::string& path);

// Transport plans: sparse triplet CSV `src_id,dst_id,mass`; potentials as
// `point_id,f,g`.
void save_plan_csv(const TransportPlan& plan, const std::string& path);
void save_potentials_csv(const TransportPlan& plan, const std::string& path);

void save_report_json(const CheckReport& report, const std::string& path);
CheckReport load_report_json(const std::string& path);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

/// Write-then-rename so partially written files are never observed.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace fikit
