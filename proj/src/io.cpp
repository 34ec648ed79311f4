#include "bellbound/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace bellbound::io {

namespace {

json cmatrix_entries(const CMatrix& m) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            entries.push_back({m(i, j).real(), m(i, j).imag()});
    return entries;
}

CMatrix cmatrix_from_entries(const json& entries, Eigen::Index rows, Eigen::Index cols) {
    if (entries.size() != size_t(rows * cols))
        throw invalid_argument("json matrix: wrong entry count");
    CMatrix m(rows, cols);
    size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const json& e = entries[idx++];
            m(i, j) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    return m;
}

} // namespace

json state_to_json(const DensityMatrix& rho) {
    json j;
    j["d_a"] = rho.split().d_a;
    j["d_b"] = rho.split().d_b;
    j["entries"] = cmatrix_entries(rho.mat());
    return j;
}

DensityMatrix state_from_json(const json& j) {
    const int da = j.at("d_a").get<int>();
    const int db = j.at("d_b").get<int>();
    return DensityMatrix(cmatrix_from_entries(j.at("entries"), da * db, da * db),
                         {da, db});
}

json inequality_to_json(const bell::BellInequality& q) {
    json j;
    j["m_a"] = q.sc.m_a;
    j["m_b"] = q.sc.m_b;
    j["n_a"] = q.sc.n_a;
    j["n_b"] = q.sc.n_b;
    j["b00"] = q.b00;
    json ma = json::array();
    for (int sa = 0; sa < q.sc.m_a; ++sa) {
        json row = json::array();
        for (int oa = 0; oa < q.sc.n_a; ++oa) row.push_back(q.ma(sa, oa));
        ma.push_back(std::move(row));
    }
    j["marg_a"] = std::move(ma);
    json mb = json::array();
    for (int sb = 0; sb < q.sc.m_b; ++sb) {
        json row = json::array();
        for (int ob = 0; ob < q.sc.n_b; ++ob) row.push_back(q.mb(sb, ob));
        mb.push_back(std::move(row));
    }
    j["marg_b"] = std::move(mb);
    json joint = json::array();
    for (int sa = 0; sa < q.sc.m_a; ++sa) {
        json bya = json::array();
        for (int sb = 0; sb < q.sc.m_b; ++sb) {
            json block = json::array();
            for (int oa = 0; oa < q.sc.n_a; ++oa) {
                json row = json::array();
                for (int ob = 0; ob < q.sc.n_b; ++ob) row.push_back(q.j(sa, sb, oa, ob));
                block.push_back(std::move(row));
            }
            bya.push_back(std::move(block));
        }
        joint.push_back(std::move(bya));
    }
    j["joint"] = std::move(joint);
    j["beta_lhv"] = q.beta_lhv;
    return j;
}

bell::BellInequality inequality_from_json(const json& j) {
    bell::BellScenario sc{j.at("m_a").get<int>(), j.at("m_b").get<int>(),
                          j.at("n_a").get<int>(), j.at("n_b").get<int>()};
    bell::BellInequality q = bell::BellInequality::zeros(sc);
    q.b00 = j.at("b00").get<double>();
    for (int sa = 0; sa < sc.m_a; ++sa)
        for (int oa = 0; oa < sc.n_a; ++oa)
            q.ma(sa, oa) = j.at("marg_a").at(sa).at(oa).get<double>();
    for (int sb = 0; sb < sc.m_b; ++sb)
        for (int ob = 0; ob < sc.n_b; ++ob)
            q.mb(sb, ob) = j.at("marg_b").at(sb).at(ob).get<double>();
    for (int sa = 0; sa < sc.m_a; ++sa)
        for (int sb = 0; sb < sc.m_b; ++sb)
            for (int oa = 0; oa < sc.n_a; ++oa)
                for (int ob = 0; ob < sc.n_b; ++ob)
                    q.j(sa, sb, oa, ob) =
                        j.at("joint").at(sa).at(sb).at(oa).at(ob).get<double>();
    // Recompute the bound rather than trusting the stored one.
    q.beta_lhv = bell::classical_bound(q);
    return q;
}

json measurements_to_json(const bell::MeasurementAssignment& meas) {
    auto party = [](const std::vector<std::vector<CMatrix>>& p) {
        json out = json::array();
        for (const auto& setting : p) {
            json s = json::array();
            for (const CMatrix& e : setting) {
                json elem;
                elem["d"] = e.rows();
                elem["entries"] = cmatrix_entries(e);
                s.push_back(std::move(elem));
            }
            out.push_back(std::move(s));
        }
        return out;
    };
    json j;
    j["alice"] = party(meas.alice);
    j["bob"] = party(meas.bob);
    return j;
}

bell::MeasurementAssignment measurements_from_json(const json& j) {
    auto party = [](const json& p) {
        std::vector<std::vector<CMatrix>> out;
        for (const json& setting : p) {
            std::vector<CMatrix> s;
            for (const json& elem : setting) {
                const Eigen::Index d = elem.at("d").get<Eigen::Index>();
                s.push_back(cmatrix_from_entries(elem.at("entries"), d, d));
            }
            out.push_back(std::move(s));
        }
        return out;
    };
    bell::MeasurementAssignment meas;
    meas.alice = party(j.at("alice"));
    meas.bob = party(j.at("bob"));
    return meas;
}

json sdp_to_json(const sdp::SdpStandard& p) {
    json j;
    j["form"] = "standard";
    j["dimension"] = p.f0.rows();
    j["f0"] = cmatrix_entries(p.f0);
    json fs = json::array();
    for (const auto& f : p.fs) fs.push_back(cmatrix_entries(f));
    j["fs"] = std::move(fs);
    j["c"] = std::vector<double>(p.c.data(), p.c.data() + p.c.size());
    return j;
}

json sdp_to_json(const sdp::SdpInequality& p) {
    json j;
    j["form"] = "inequality";
    j["dimension"] = p.g0.rows();
    j["g0"] = cmatrix_entries(p.g0);
    json gs = json::array();
    for (const auto& g : p.gs) gs.push_back(cmatrix_entries(g));
    j["gs"] = std::move(gs);
    j["c"] = std::vector<double>(p.c.data(), p.c.data() + p.c.size());
    return j;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Violates: return "violates";
        case Verdict::NoViolationCertified: return "no_violation_certified";
        default: return "undecided";
    }
}

std::optional<double> BoundReport::best_ub() const {
    std::optional<double> best;
    for (const auto& u : {ub_state_independent, ub_fixed_trace, ub_semianalytic})
        if (u && (!best || *u < *best)) best = u;
    return best;
}

void BoundReport::decide(double tol) {
    verdict = Verdict::Undecided;
    if (lb_value && *lb_value > classical_bound + tol) verdict = Verdict::Violates;
    else if (auto ub = best_ub(); ub && *ub <= classical_bound + tol)
        verdict = Verdict::NoViolationCertified;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7g", v);
    return buf;
}

json report_to_json(const BoundReport& r) {
    json j;
    j["instance"] = r.instance;
    j["classical_bound"] = json::parse(format_number(r.classical_bound));
    if (r.lb_value) j["lb"] = json::parse(format_number(*r.lb_value));
    if (r.lb_measurements) j["lb_measurements"] = *r.lb_measurements;
    if (r.ub_state_independent)
        j["ub_state_independent"] = json::parse(format_number(*r.ub_state_independent));
    if (r.ub_fixed_trace)
        j["ub_fixed_trace"] = json::parse(format_number(*r.ub_fixed_trace));
    if (r.ub_semianalytic)
        j["ub_semianalytic"] = json::parse(format_number(*r.ub_semianalytic));
    j["verdict"] = to_string(r.verdict);
    if (r.convexity_derived) j["convexity_derived"] = true;
    j["timing_ms"] = r.timing_ms;
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_argument("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

void write_output(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw invalid_argument("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

} // namespace bellbound::io
