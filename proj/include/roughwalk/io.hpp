#pragma once

// Serialization: CSV path formats (header `t,x1,...,xd` for sampled paths,
// `t,dx1,...,dxd` for jump increments, lifts appending `a11,...,add`
// row-major) and JSON configs/reports.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "roughwalk/homog.hpp"
#include "roughwalk/lift.hpp"
#include "roughwalk/mc.hpp"
#include "roughwalk/paths.hpp"
#include "roughwalk/rde.hpp"

namespace roughwalk {

using json = nlohmann::json;

void write_sampled_csv(std::ostream& os, const SampledPath& path);
void write_jump_csv(std::ostream& os, const JumpPath& path);
// jump_format selects the increment columns (dx1,...) of the jump-path
// serialization; otherwise value columns (x1,...) are written.
void write_lift_csv(std::ostream& os, const Level2Lift& lift, bool jump_format = false);

// Reads either format, detected from the header.
struct ParsedPath {
    bool is_jump = false;
    SampledPath sampled;
    JumpPath jump;
};
ParsedPath read_path_csv(std::istream& is);

json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j, const std::string& field);

json report_to_json(const EstimatorReport& rep);
json prediction_to_json(const RoughLimitPrediction& pred);
json sweep_to_json(const ConvergenceSweep& sweep);
json probe_to_json(const TightnessProbe& probe);
json lepingle_to_json(const LepingleReport& rep);
json compare_to_json(const CompareReport& rep);

// Model configuration: {"model": "conductance"|"ou"|"periodic", params...,
// seed, horizon, scale_n, step}. Unknown models or malformed fields raise
// std::invalid_argument naming the offending field.
ModelConfig model_from_json(const json& j);
json model_to_json(const ModelConfig& model);
ConductanceLaw law_from_json(const json& j);
json law_to_json(const ConductanceLaw& law);
PeriodicCoefficients coeffs_from_json(const json& j);
json coeffs_to_json(const PeriodicCoefficients& coeffs);

// Long-format estimator CSV: statistic,i,j,mean,stderr,n,M,seed.
void write_report_csv(std::ostream& os, const EstimatorReport& rep, bool header = true);

double json_number(const json& j, const std::string& field);
double json_number_or(const json& j, const std::string& field, double fallback);
uint64_t json_seed_or(const json& j, uint64_t fallback);

}  // namespace roughwalk
