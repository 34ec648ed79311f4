#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "bellbound/bell.hpp"
#include "bellbound/qcore.hpp"
#include "bellbound/sdp.hpp"

namespace bellbound::io {

using json = nlohmann::ordered_json;

// {"d_a", "d_b", "entries": [[re, im], ...]} row-major.
json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const json& j);

// {"m_a","m_b","n_a","n_b","b00","marg_a","marg_b","joint","beta_lhv"};
// marg_* are [setting][outcome], joint is [s_a][s_b][o_a][o_b].
json inequality_to_json(const bell::BellInequality& ineq);
bell::BellInequality inequality_from_json(const json& j);

json measurements_to_json(const bell::MeasurementAssignment& meas);
bell::MeasurementAssignment measurements_from_json(const json& j);

// Plain dumps of SDP instances for external-solver cross-checks.
json sdp_to_json(const sdp::SdpStandard& p);
json sdp_to_json(const sdp::SdpInequality& p);

enum class Verdict { Violates, NoViolationCertified, Undecided };
std::string to_string(Verdict v);

struct BoundReport {
    std::string instance;
    double classical_bound = 0.0;
    std::optional<double> lb_value;
    std::optional<json> lb_measurements;
    std::optional<double> ub_state_independent;
    std::optional<double> ub_fixed_trace;
    std::optional<double> ub_semianalytic;
    Verdict verdict = Verdict::Undecided;
    bool convexity_derived = false;
    double timing_ms = 0.0;

    std::optional<double> best_ub() const;
    void decide(double tol = 1e-8);
};

json report_to_json(const BoundReport& report);

// Numbers are printed with 7 significant digits to match the reference tables.
std::string format_number(double v);

json load_json_file(const std::string& path);
void write_output(const json& j, const std::string& path); // "-" for stdout

} // namespace bellbound::io
