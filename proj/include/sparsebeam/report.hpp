#ifndef SPARSEBEAM_REPORT_HPP
#define SPARSEBEAM_REPORT_HPP

#include <string>

#include <json.hpp>

#include "sparsebeam/design.hpp"
#include "sparsebeam/evaluation.hpp"
#include "sparsebeam/oracle.hpp"
#include "sparsebeam/scenario_io.hpp"

namespace sparsebeam {

inline constexpr const char* kToolName = "sparsebeam";
inline constexpr const char* kToolVersion = "0.1.0";

// Fixed 9-significant-digit decimal, the one format every CSV uses.
std::string fmt9(double v);

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_report(const nlohmann::json& j);

nlohmann::json cmatrix_to_json(const HermitianMatrix& m);
HermitianMatrix cmatrix_from_json(const nlohmann::json& j);
nlohmann::json cvector_to_json(const ComplexVector& v);

nlohmann::json crosscorr_to_json(const CrossCorrReport& rep);
nlohmann::json droop_to_json(const DroopReport& d);
nlohmann::json trace_record_to_json(const TrialRecord& t);

// report.json payload for a design run (self-contained: carries the
// matrices so `eval` can rebuild every CSV from the report alone).
nlohmann::json design_report(const RunConfig& cfg, const DesignResult& result, const SparseDesignOutcome& outcome,
                             const nlohmann::json& baselines, const nlohmann::json& timings);

// report payload for a fixed-mask baseline run
nlohmann::json baseline_report(const RunConfig& cfg, const std::string& name, const OracleResult& oracle,
                               const DesignResult& result, const DroopReport& droop,
                               const CrossCorrReport& crosscorr);

// Re-validate a stored report against its own scenario echo; throws on
// inconsistency and returns the parsed scenario.
Scenario validate_report(const nlohmann::json& report);

void write_text_file(const std::string& path, const std::string& content);
void write_beampattern_csv(const std::string& path, const BeampatternResult& bp);
void write_crosscorr_json(const std::string& path, const CrossCorrReport& rep);
// columns: mask_bits (grid-ordered 0/1 string), value, value_db_rel_best
void write_enumeration_csv(const std::string& path, const std::vector<EnumerationRow>& table, int n,
                           double best_value);
void write_trace_log(const std::string& path, const std::vector<TrialRecord>& trace);

}  // namespace sparsebeam

#endif
