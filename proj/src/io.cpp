#include "roughwalk/io.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace roughwalk {

namespace {

void write_row(std::ostream& os, const double* vals, size_t count) {
    os << std::setprecision(17);
    for (size_t i = 0; i < count; ++i) os << (i ? "," : "") << vals[i];
    os << "\n";
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, delim)) out.push_back(tok);
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(what);
        return v;
    } catch (...) {
        throw std::invalid_argument("bad numeric value in " + what + ": '" + s + "'");
    }
}

}  // namespace

void write_sampled_csv(std::ostream& os, const SampledPath& path) {
    os << "t";
    for (int i = 1; i <= path.d; ++i) os << ",x" << i;
    os << "\n";
    os << std::setprecision(17);
    for (size_t k = 0; k < path.npoints(); ++k) {
        os << path.times[k];
        for (int i = 0; i < path.d; ++i) os << "," << path.values[k * path.d + i];
        os << "\n";
    }
}

void write_jump_csv(std::ostream& os, const JumpPath& path) {
    os << "t";
    for (int i = 1; i <= path.d; ++i) os << ",dx" << i;
    os << "\n";
    os << std::setprecision(17);
    // row at t = 0 carries the start value; horizon rides on a trailing
    // zero-increment row when no jump sits at T
    os << 0.0;
    for (int i = 0; i < path.d; ++i) os << "," << path.start[i];
    os << "\n";
    for (size_t k = 0; k < path.njumps(); ++k) {
        os << path.times[k];
        for (int i = 0; i < path.d; ++i) os << "," << path.increments[k * path.d + i];
        os << "\n";
    }
    if (path.times.empty() || path.times.back() < path.horizon) {
        os << path.horizon;
        for (int i = 0; i < path.d; ++i) os << ",0";
        os << "\n";
    }
}

void write_lift_csv(std::ostream& os, const Level2Lift& lift, bool jump_format) {
    os << "t";
    for (int i = 1; i <= lift.d; ++i) os << "," << (jump_format ? "dx" : "x") << i;
    for (int i = 1; i <= lift.d; ++i)
        for (int j = 1; j <= lift.d; ++j) os << ",a" << i << j;
    os << "\n";
    os << std::setprecision(17);
    const size_t dd = static_cast<size_t>(lift.d) * lift.d;
    for (size_t k = 0; k < lift.npoints(); ++k) {
        os << lift.times[k];
        for (int i = 0; i < lift.d; ++i) {
            // jump format: the t=0 row carries the start value, later rows the
            // increments, as in the plain jump-path serialization
            const double v = (jump_format && k > 0)
                                 ? lift.values[k * lift.d + i] - lift.values[(k - 1) * lift.d + i]
                                 : lift.values[k * lift.d + i];
            os << "," << v;
        }
        for (size_t i = 0; i < dd; ++i) os << "," << lift.area[k * dd + i];
        os << "\n";
    }
}

ParsedPath read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("path csv: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split(line, ',');
    if (header.size() < 2 || header[0] != "t")
        throw std::invalid_argument("path csv: header must start with 't'");
    const bool jump = header[1].rfind("dx", 0) == 0;
    const int d = static_cast<int>(header.size()) - 1;

    std::vector<double> times;
    std::vector<double> rows;
    size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> toks = split(line, ',');
        if (static_cast<int>(toks.size()) != d + 1)
            throw std::invalid_argument("path csv: wrong column count at line " + std::to_string(lineno));
        times.push_back(parse_double(toks[0], "time column"));
        for (int i = 0; i < d; ++i) rows.push_back(parse_double(toks[static_cast<size_t>(i) + 1], "value column"));
    }
    if (times.empty()) throw std::invalid_argument("path csv: no data rows");
    for (size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("path csv: times must be strictly increasing (tie rejected)");

    ParsedPath out;
    out.is_jump = jump;
    if (jump) {
        if (times.front() != 0.0) throw std::invalid_argument("path csv: jump file must start with the t=0 row");
        out.jump.d = d;
        out.jump.start.assign(rows.begin(), rows.begin() + d);
        for (size_t k = 1; k < times.size(); ++k) {
            bool zero = true;
            for (int i = 0; i < d; ++i) zero = zero && rows[k * d + i] == 0.0;
            const bool last = k + 1 == times.size();
            if (zero && last) break;  // trailing horizon marker
            out.jump.times.push_back(times[k]);
            for (int i = 0; i < d; ++i) out.jump.increments.push_back(rows[k * d + i]);
        }
        out.jump.horizon = times.back();
        out.jump.validate();
    } else {
        out.sampled.d = d;
        out.sampled.times = times;
        out.sampled.values = rows;
        out.sampled.interp = Interp::PiecewiseLinear;
        out.sampled.validate();
    }
    return out;
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.d; ++i) {
        json row = json::array();
        for (int j = 0; j < m.d; ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Mat mat_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("field '" + field + "': expected a square matrix as nested arrays");
    const int d = static_cast<int>(j.size());
    Mat m(d);
    for (int i = 0; i < d; ++i) {
        if (!j[static_cast<size_t>(i)].is_array() || static_cast<int>(j[static_cast<size_t>(i)].size()) != d)
            throw std::invalid_argument("field '" + field + "': ragged matrix rows");
        for (int jj = 0; jj < d; ++jj) m(i, jj) = j[static_cast<size_t>(i)][static_cast<size_t>(jj)].get<double>();
    }
    return m;
}

json report_to_json(const EstimatorReport& rep) {
    return json{{"statistic", rep.statistic},
                {"mean", mat_to_json(rep.mean)},
                {"stderr", mat_to_json(rep.stderr_entry)},
                {"replicas", rep.replicas},
                {"scale_n", rep.scale_n},
                {"seed", rep.seed},
                {"wall_seconds", rep.wall_seconds}};
}

json prediction_to_json(const RoughLimitPrediction& pred) {
    const char* prov = pred.provenance == Provenance::ClosedForm
                           ? "closed-form"
                           : (pred.provenance == Provenance::Spectral ? "spectral" : "empirical-formula");
    json j{{"covariance", mat_to_json(pred.covariance)},
           {"gamma_strato", mat_to_json(pred.gamma_strato)},
           {"ito_correction", mat_to_json(pred.ito_correction)},
           {"gap_prediction", mat_to_json(pred.gap_prediction)},
           {"provenance", prov}};
    if (pred.provenance == Provenance::Spectral) j["residual"] = pred.residual;
    return j;
}

json sweep_to_json(const ConvergenceSweep& sweep) {
    json pts = json::array();
    for (const auto& pt : sweep.points)
        pts.push_back(json{{"n", pt.n}, {"deviation", pt.deviation}, {"report", report_to_json(pt.report)}});
    return json{{"statistic", sweep.statistic},
                {"target", mat_to_json(sweep.target)},
                {"points", pts},
                {"slope", sweep.slope}};
}

json probe_to_json(const TightnessProbe& probe) {
    json rows = json::array();
    for (const auto& r : probe.rows)
        rows.push_back(json{{"n", r.n}, {"q50", r.q50}, {"q90", r.q90}, {"q99", r.q99}});
    return json{{"p", probe.p},          {"rows", rows},
                {"slope_q90", probe.slope_q90}, {"max_slope", probe.max_slope},
                {"flat", probe.flat},    {"asserted", probe.asserted}};
}

json lepingle_to_json(const LepingleReport& rep) {
    return json{{"p", rep.p},
                {"mean_norm_sq", rep.mean_norm_sq},
                {"mean_qv", rep.mean_qv},
                {"ratio", rep.ratio},
                {"replicas", rep.replicas},
                {"in_band", rep.in_band}};
}

json compare_to_json(const CompareReport& rep) {
    json coords = json::array();
    for (const auto& c : rep.coords)
        coords.push_back(json{{"mean_a", c.mean_a},
                              {"mean_b", c.mean_b},
                              {"gap", c.gap},
                              {"stderr", c.stderr_gap},
                              {"z", c.zscore},
                              {"var_a", c.var_a},
                              {"var_b", c.var_b},
                              {"var_gap", c.var_gap},
                              {"var_z", c.var_zscore}});
    return json{{"coords", coords}, {"max_abs_z", rep.max_abs_z}, {"max_abs_var_z", rep.max_abs_var_z}};
}

double json_number(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number())
        throw std::invalid_argument("missing or non-numeric field '" + field + "'");
    return j[field].get<double>();
}

double json_number_or(const json& j, const std::string& field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number()) throw std::invalid_argument("non-numeric field '" + field + "'");
    return j[field].get<double>();
}

uint64_t json_seed_or(const json& j, uint64_t fallback) {
    if (!j.contains("seed")) return fallback;
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
        throw std::invalid_argument("non-integer field 'seed'");
    return j["seed"].get<uint64_t>();
}

ConductanceLaw law_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw std::invalid_argument("field 'law': expected an object with a 'type' string");
    const std::string type = j["type"].get<std::string>();
    ConductanceLaw law;
    if (type == "constant") {
        law = ConductanceLaw::constant(json_number(j, "value"));
    } else if (type == "uniform") {
        law = ConductanceLaw::uniform(json_number(j, "a"), json_number(j, "b"));
    } else if (type == "two_point") {
        law = ConductanceLaw::two_point(json_number(j, "a"), json_number(j, "b"),
                                        json_number_or(j, "q", 0.5));
    } else {
        throw std::invalid_argument("field 'law.type': unknown law '" + type + "'");
    }
    law.validate();
    return law;
}

json law_to_json(const ConductanceLaw& law) {
    switch (law.type) {
        case ConductanceLaw::Type::Constant: return json{{"type", "constant"}, {"value", law.a}};
        case ConductanceLaw::Type::Uniform: return json{{"type", "uniform"}, {"a", law.a}, {"b", law.b}};
        case ConductanceLaw::Type::TwoPoint:
            return json{{"type", "two_point"}, {"a", law.a}, {"b", law.b}, {"q", law.q}};
    }
    return {};
}

PeriodicCoefficients coeffs_from_json(const json& j) {
    if (j.is_object() && j.contains("preset")) {
        const std::string preset = j["preset"].get<std::string>();
        if (preset == "identity") return PeriodicCoefficients::identity(static_cast<int>(json_number_or(j, "d", 2)));
        if (preset == "antisym_sin")
            return PeriodicCoefficients::antisym_sin2(json_number_or(j, "kappa", 0.5));
        if (preset == "d1_cosine")
            return PeriodicCoefficients::d1_cosine(json_number_or(j, "a0", 1.0), json_number_or(j, "a1", 0.5));
        throw std::invalid_argument("field 'coeffs.preset': unknown preset '" + preset + "'");
    }
    if (!j.is_object() || !j.contains("d") || !j.contains("modes"))
        throw std::invalid_argument("field 'coeffs': expected {preset,...} or {d, modes}");
    PeriodicCoefficients c;
    c.d = static_cast<int>(json_number(j, "d"));
    for (const auto& mode : j["modes"]) {
        FourierMode fm;
        for (const auto& ki : mode.at("k")) fm.k.push_back(ki.get<int>());
        const auto& re = mode.at("re");
        const json im = mode.contains("im") ? mode["im"] : json();
        for (int i = 0; i < c.d; ++i)
            for (int jj = 0; jj < c.d; ++jj) {
                const double rr = re[static_cast<size_t>(i)][static_cast<size_t>(jj)].get<double>();
                const double ii = im.is_null() ? 0.0 : im[static_cast<size_t>(i)][static_cast<size_t>(jj)].get<double>();
                fm.m.emplace_back(rr, ii);
            }
        c.modes.push_back(std::move(fm));
    }
    c.validate();
    return c;
}

json coeffs_to_json(const PeriodicCoefficients& coeffs) {
    json modes = json::array();
    for (const auto& mode : coeffs.modes) {
        json re = json::array(), im = json::array();
        for (int i = 0; i < coeffs.d; ++i) {
            json rrow = json::array(), irow = json::array();
            for (int jj = 0; jj < coeffs.d; ++jj) {
                rrow.push_back(mode.m[static_cast<size_t>(i) * coeffs.d + jj].real());
                irow.push_back(mode.m[static_cast<size_t>(i) * coeffs.d + jj].imag());
            }
            re.push_back(rrow);
            im.push_back(irow);
        }
        modes.push_back(json{{"k", mode.k}, {"re", re}, {"im", im}});
    }
    return json{{"d", coeffs.d}, {"modes", modes}};
}

ModelConfig model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
        throw std::invalid_argument("missing or non-string field 'model'");
    const std::string name = j["model"].get<std::string>();
    if (name == "conductance") {
        ConductanceModel m;
        m.d = static_cast<int>(json_number_or(j, "d", 2));
        if (m.d < 1 || m.d > 3) throw std::invalid_argument("field 'd': conductance dimension must be 1..3");
        if (!j.contains("law")) throw std::invalid_argument("missing field 'law'");
        m.law = law_from_json(j["law"]);
        return m;
    }
    if (name == "ou") {
        OuModel m;
        m.step = json_number_or(j, "step", 0.01);
        if (!(m.step > 0.0)) throw std::invalid_argument("field 'step': must be positive");
        return m;
    }
    if (name == "periodic") {
        PeriodicModel m;
        if (!j.contains("coeffs")) throw std::invalid_argument("missing field 'coeffs'");
        m.coeffs = coeffs_from_json(j["coeffs"]);
        m.step = json_number_or(j, "step", 2e-3);
        if (!(m.step > 0.0)) throw std::invalid_argument("field 'step': must be positive");
        m.K = static_cast<int>(json_number_or(j, "K", 32));
        return m;
    }
    throw std::invalid_argument("field 'model': unknown model '" + name + "'");
}

json model_to_json(const ModelConfig& model) {
    if (const auto* c = std::get_if<ConductanceModel>(&model))
        return json{{"model", "conductance"}, {"d", c->d}, {"law", law_to_json(c->law)}};
    if (const auto* o = std::get_if<OuModel>(&model)) return json{{"model", "ou"}, {"step", o->step}};
    const auto& p = std::get<PeriodicModel>(model);
    return json{{"model", "periodic"}, {"coeffs", coeffs_to_json(p.coeffs)}, {"step", p.step}, {"K", p.K}};
}

void write_report_csv(std::ostream& os, const EstimatorReport& rep, bool header) {
    if (header) os << "statistic,i,j,mean,stderr,n,M,seed\n";
    os << std::setprecision(17);
    for (int i = 0; i < rep.mean.d; ++i)
        for (int j = 0; j < rep.mean.d; ++j)
            os << rep.statistic << "," << i + 1 << "," << j + 1 << "," << rep.mean(i, j) << ","
               << rep.stderr_entry(i, j) << "," << rep.scale_n << "," << rep.replicas << "," << rep.seed
               << "\n";
}

}  // namespace roughwalk
