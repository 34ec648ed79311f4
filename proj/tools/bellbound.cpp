// Command-line front end: builds states and inequalities, runs the bound
// algorithms, and reproduces the reference tables as JSON/CSV reports.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "bellbound/bell.hpp"
#include "bellbound/io.hpp"
#include "bellbound/lb.hpp"
#include "bellbound/nonstandard.hpp"
#include "bellbound/states.hpp"
#include "bellbound/ub.hpp"

using namespace bellbound;
using io::json;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

std::map<std::string, std::string> parse_params(const std::string& spec) {
    std::map<std::string, std::string> params;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw invalid_argument("bad parameter: '" + item + "'");
        params[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return params;
}

double need(const std::map<std::string, std::string>& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw invalid_argument("missing parameter '" + key + "'");
    return std::stod(it->second);
}

DensityMatrix parse_state(const std::string& spec) {
    if (spec.rfind("file:", 0) == 0)
        return io::state_from_json(io::load_json_file(spec.substr(5)));
    if (!spec.empty() && spec[0] == '@')
        return io::state_from_json(io::load_json_file(spec.substr(1)));

    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const auto params =
        colon == std::string::npos ? std::map<std::string, std::string>{}
                                   : parse_params(spec.substr(colon + 1));
    if (name == "werner") return states::werner(int(need(params, "d")), need(params, "p"));
    if (name == "isotropic")
        return states::isotropic(int(need(params, "d")), need(params, "p"));
    if (name == "max_entangled")
        return states::max_entangled(int(need(params, "d"))).density();
    if (name == "singlet") {
        CVector v = CVector::Zero(4);
        v[1] = 1.0 / std::sqrt(2.0);
        v[2] = -1.0 / std::sqrt(2.0);
        return PureState(v, {2, 2}).density();
    }
    if (name == "ghz")
        return states::ghz(int(need(params, "n")),
                           params.count("alpha") ? need(params, "alpha") : 0.0)
            .density();
    if (name == "gisin") return states::gisin(need(params, "p"), need(params, "theta"));
    if (name == "collins_gisin") return states::collins_gisin(need(params, "p"));
    if (name == "horodecki_h3") return states::horodecki_h3(need(params, "p"));
    if (name == "choi_horodecki") return states::choi_horodecki(need(params, "alpha"));
    if (name == "dur") return states::dur(int(need(params, "n")));
    if (name == "toth_acin") return states::toth_acin(need(params, "p"));
    if (name == "pure_schmidt") {
        auto it = params.find("c");
        if (it == params.end()) throw invalid_argument("pure_schmidt needs c=c1;c2;...");
        std::vector<double> coeffs;
        std::stringstream cs(it->second);
        std::string tok;
        while (std::getline(cs, tok, ';')) coeffs.push_back(std::stod(tok));
        return states::pure_schmidt(coeffs).density();
    }
    throw invalid_argument("unknown state '" + name + "'");
}

bell::AnyInequality parse_inequality(const std::string& spec) {
    if (spec.rfind("file:", 0) == 0)
        return io::inequality_from_json(io::load_json_file(spec.substr(5)));
    if (!spec.empty() && spec[0] == '@')
        return io::inequality_from_json(io::load_json_file(spec.substr(1)));
    return bell::named(spec);
}

double any_beta(const bell::AnyInequality& any) {
    return std::visit([](const auto& q) { return q.beta_lhv; }, any);
}

std::string csv_or_json(const json& rows, const std::vector<std::string>& cols,
                        const std::string& format) {
    if (format == "json") return rows.dump(2) + "\n";
    std::ostringstream out;
    for (size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < cols.size(); ++c) {
            if (c) out << ",";
            const json& v = row.at(cols[c]);
            if (v.is_number_integer()) out << v.get<long>();
            else if (v.is_number()) out << io::format_number(v.get<double>());
            else out << v.get<std::string>();
        }
        out << "\n";
    }
    return out.str();
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw invalid_argument("cannot open output file: " + path);
    out << text;
}

// Schmidt coefficients of the N-fold tensor power of a Schmidt vector.
std::vector<double> coeff_power(const std::vector<double>& c, int copies) {
    std::vector<double> out = {1.0};
    for (int k = 0; k < copies; ++k) {
        std::vector<double> next;
        next.reserve(out.size() * c.size());
        for (double a : out)
            for (double b : c) next.push_back(a * b);
        out = std::move(next);
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Bell-inequality violation bounds for bipartite quantum states"};
    app.require_subcommand(1);

    std::string state_spec, ineq_spec, out_path, format = "json", mode = "ub-si";
    std::string profile_spec, filter_spec, table_name;
    uint64_t seed = 0;
    int restarts = 20, threads = 1, cglmp_n = 3, dmax = 4, numeric_dmax = 4;
    double tol = 1e-9;
    bool with_horodecki = false;

    if (const char* env = std::getenv("BELLBOUND_TOL_OVERRIDE")) tol = std::stod(env);

    auto add_common = [&](CLI::App* cmd, bool needs_state, bool needs_ineq) {
        if (needs_state) cmd->add_option("--state", state_spec)->required();
        if (needs_ineq) cmd->add_option("--ineq", ineq_spec)->required();
        cmd->add_option("--out", out_path);
        cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--threads", threads);
    };

    auto* c_state = app.add_subcommand("state", "emit a state as JSON");
    add_common(c_state, true, false);

    auto* c_ineq = app.add_subcommand("inequality", "emit an inequality as JSON");
    add_common(c_ineq, false, true);

    auto* c_bound =
        app.add_subcommand("classical-bound", "classical bound by vertex enumeration");
    add_common(c_bound, false, true);

    auto* c_lb = app.add_subcommand("lb", "see-saw lower bound");
    add_common(c_lb, true, true);
    c_lb->add_option("--seed", seed);
    c_lb->add_option("--restarts", restarts);
    c_lb->add_option("--tol", tol);

    auto* c_ub = app.add_subcommand("ub", "Lagrange-dual upper bound");
    add_common(c_ub, true, true);
    c_ub->add_option("--mode", mode)->check(CLI::IsMember({"ub-si", "ub-ft", "ub-semi"}));
    c_ub->add_option("--profile", profile_spec,
                     "comma-separated traces; enumerate the grid when omitted");

    auto* c_horo = app.add_subcommand("horodecki", "two-qubit CHSH criterion");
    add_common(c_horo, true, false);

    auto* c_filter = app.add_subcommand("filter", "local filtering protocols");
    add_common(c_filter, true, false);
    c_filter->add_option("--filter", filter_spec, "gisin:theta=.. | popescu:d=..")
        ->required();
    c_filter->add_flag("--horodecki", with_horodecki,
                       "run the Horodecki criterion before and after");

    auto* c_convert = app.add_subcommand("convert", "CGLMP -> I22nn conversion");
    c_convert->add_option("--n", cglmp_n)->required();
    c_convert->add_option("--out", out_path);

    auto* c_table = app.add_subcommand("table", "reference tables");
    c_table->add_option("name", table_name)
        ->required()
        ->check(CLI::IsMember({"isotropic-chsh", "pure-ch", "cglmp-i22dd"}));
    c_table->add_option("--dmax", dmax);
    c_table->add_option("--numeric-dmax", numeric_dmax);
    c_table->add_option("--out", out_path);
    c_table->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    c_table->add_option("--threads", threads);

    CLI11_PARSE(app, argc, argv);

    if (c_state->parsed()) {
        io::write_output(io::state_to_json(parse_state(state_spec)), out_path);
        return 0;
    }

    if (c_ineq->parsed()) {
        const bell::AnyInequality any = parse_inequality(ineq_spec);
        if (const auto* q = std::get_if<bell::BellInequality>(&any)) {
            io::write_output(io::inequality_to_json(*q), out_path);
        } else {
            json j;
            j["tag"] = ineq_spec;
            j["beta_lhv"] = any_beta(any);
            io::write_output(j, out_path);
        }
        return 0;
    }

    if (c_bound->parsed()) {
        json j;
        j["inequality"] = ineq_spec;
        j["classical_bound"] = any_beta(parse_inequality(ineq_spec));
        io::write_output(j, out_path);
        return 0;
    }

    if (c_lb->parsed()) {
        Timer timer;
        const DensityMatrix rho = parse_state(state_spec);
        const bell::AnyInequality any = parse_inequality(ineq_spec);
        lb::SeesawConfig cfg;
        cfg.rng_seed = seed;
        cfg.restarts = restarts;
        cfg.convergence_tol = tol;
        cfg.threads = threads;
        lb::LbResult res;
        if (const auto* q = std::get_if<bell::BellInequality>(&any))
            res = lb::seesaw(rho, *q, cfg);
        else if (const auto* cq = std::get_if<bell::CorrelationInequality>(&any))
            res = lb::seesaw(rho, *cq, cfg);
        else
            throw invalid_argument("lb: multipartite inequalities are not supported");
        io::BoundReport rep;
        rep.instance = state_spec + " / " + ineq_spec;
        rep.classical_bound = any_beta(any);
        rep.lb_value = res.value;
        rep.lb_measurements = io::measurements_to_json(res.measurements);
        rep.decide();
        rep.timing_ms = timer.ms();
        io::write_output(io::report_to_json(rep), out_path);
        return 0;
    }

    if (c_ub->parsed()) {
        Timer timer;
        const DensityMatrix rho = parse_state(state_spec);
        const bell::AnyInequality any = parse_inequality(ineq_spec);
        ub::UbOptions opts;
        opts.threads = threads;
        io::BoundReport rep;
        rep.instance = state_spec + " / " + ineq_spec;
        rep.classical_bound = any_beta(any);

        if (mode == "ub-semi") {
            rep.ub_semianalytic = ub::chsh_semianalytic(rho).value;
        } else {
            ub::QcqpInstance inst;
            if (const auto* q = std::get_if<bell::BellInequality>(&any))
                inst = ub::build_qcqp(*q, rho);
            else if (const auto* cq = std::get_if<bell::CorrelationInequality>(&any))
                inst = ub::build_qcqp(*cq, rho);
            else
                throw invalid_argument("ub: multipartite inequalities are not supported");
            if (mode == "ub-si") {
                rep.ub_state_independent = ub::ub_state_independent(inst, opts).value;
            } else if (profile_spec.empty()) {
                rep.ub_fixed_trace = ub::ub_enumerate_profiles(inst, opts).value;
            } else {
                ub::TraceProfile profile;
                std::stringstream ss(profile_spec);
                std::string tok;
                while (std::getline(ss, tok, ',')) profile.z.push_back(std::stoi(tok));
                rep.ub_fixed_trace = ub::ub_fixed_trace(inst, profile, opts).value;
            }
        }
        rep.decide();
        rep.timing_ms = timer.ms();
        io::write_output(io::report_to_json(rep), out_path);
        return 0;
    }

    if (c_horo->parsed()) {
        const lb::HorodeckiValues v = lb::horodecki_values(parse_state(state_spec));
        json j;
        j["state"] = state_spec;
        j["sqm_ch"] = json::parse(io::format_number(v.sqm_ch));
        j["sqm_chsh"] = json::parse(io::format_number(v.sqm_chsh));
        j["violates"] = v.violates;
        io::write_output(j, out_path);
        return 0;
    }

    if (c_filter->parsed()) {
        const DensityMatrix rho = parse_state(state_spec);
        const auto colon = filter_spec.find(':');
        const std::string name = filter_spec.substr(0, colon);
        const auto params =
            colon == std::string::npos ? std::map<std::string, std::string>{}
                                       : parse_params(filter_spec.substr(colon + 1));
        nonstd::FilterPair f =
            name == "gisin"     ? nonstd::gisin_filter(need(params, "theta"))
            : name == "popescu" ? nonstd::two_level_projection(int(need(params, "d")))
                                : throw invalid_argument("unknown filter '" + name + "'");
        auto [filtered, p_suc] = nonstd::apply_filter(rho, {f});
        json j;
        j["state"] = state_spec;
        j["filter"] = filter_spec;
        j["success_probability"] = json::parse(io::format_number(p_suc));
        if (with_horodecki) {
            const lb::HorodeckiValues before = lb::horodecki_values(rho);
            const lb::HorodeckiValues after = lb::horodecki_values(filtered);
            j["before"] = {{"sqm_chsh", json::parse(io::format_number(before.sqm_chsh))},
                           {"violates", before.violates}};
            j["after"] = {{"sqm_chsh", json::parse(io::format_number(after.sqm_chsh))},
                          {"violates", after.violates}};
        }
        j["filtered_state"] = io::state_to_json(filtered);
        io::write_output(j, out_path);
        return 0;
    }

    if (c_convert->parsed()) {
        const bell::CglmpConversion conv = bell::cglmp_to_i22nn(cglmp_n);
        json j;
        j["n"] = conv.n;
        j["scale"] = conv.scale;
        j["moves"] = conv.moves;
        j["exact_match"] = conv.exact_match;
        j["transformed"] = io::inequality_to_json(conv.transformed);
        io::write_output(j, out_path);
        return 0;
    }

    if (table_name == "isotropic-chsh") {
        json rows = json::array();
        ub::UbOptions opts;
        opts.threads = threads;
        for (int d = 2; d <= dmax; ++d) {
            json row;
            row["d"] = d;
            row["p_sep"] = 1.0 / (d + 1.0);
            row["p_ub_semianalytic"] = ub::isotropic_chsh_threshold_semianalytic(d);
            if (d <= numeric_dmax)
                row["p_ub_numerical"] = ub::isotropic_chsh_threshold_numeric(d, opts);
            else
                row["p_ub_numerical"] = "-";
            const states::ThresholdRecord rec =
                states::thresholds(states::Family::Isotropic, d);
            row["p_proj_lhv"] = rec.p_proj_lhv;
            row["p_povm_lhv"] = rec.p_povm_lhv;
            rows.push_back(std::move(row));
        }
        emit(csv_or_json(rows,
                         {"d", "p_sep", "p_ub_semianalytic", "p_ub_numerical",
                          "p_proj_lhv", "p_povm_lhv"},
                         format),
             out_path);
        return 0;
    }

    if (table_name == "pure-ch") {
        const std::vector<std::pair<std::string, std::vector<double>>> entries = {
            {"phi_2:1", {2, 1}},
            {"phi_1:1:1", {1, 1, 1}},
            {"phi_3:2:1", {3, 2, 1}},
            {"phi_4:3:2:1", {4, 3, 2, 1}},
            {"phi_3:3:2:1", {3, 3, 2, 1}},
        };
        json rows = json::array();
        for (int copies = 1; copies <= 3; ++copies)
            for (const auto& [label, coeffs] : entries) {
                json row;
                row["state"] = label;
                row["copies"] = copies;
                row["value"] = nonstd::pure_ch_value(coeff_power(coeffs, copies));
                rows.push_back(std::move(row));
            }
        emit(csv_or_json(rows, {"state", "copies", "value"}, format), out_path);
        return 0;
    }

    // cglmp-i22dd
    json rows = json::array();
    for (int d = 2; d <= dmax; ++d) {
        const double v = nonstd::i22dd_me_value(d);
        json row;
        row["d"] = d;
        row["cglmp_me"] = 2.0 * d / (d - 1.0) * v + 2.0;
        row["i22dd_me"] = v;
        row["p_d"] = nonstd::i22dd_isotropic_threshold(d);
        rows.push_back(std::move(row));
    }
    emit(csv_or_json(rows, {"d", "cglmp_me", "i22dd_me", "p_d"}, format), out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
}
