#pragma once

#include <string>
#include <vector>

#include "bellbound/qcore.hpp"

namespace bellbound::sdp {

enum class SdpStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

struct SdpOptions {
    double feas_tol = 1e-8;
    double gap_tol = 1e-8;
    int max_iter = 200;
    int dim_cap = 400; // LMI dimension cap after real embedding
};

// Standard form: maximize -tr(F0 Z) s.t. tr(Fi Z) = c[i], Z >= 0.
struct SdpStandard {
    CMatrix f0;
    std::vector<CMatrix> fs;
    RVector c;
};

// Inequality form: minimize c.x s.t. G0 + sum_i x[i] Gi >= 0.
struct SdpInequality {
    RVector c;
    CMatrix g0;
    std::vector<CMatrix> gs;
};

struct IterateRecord {
    double primal_obj;
    double dual_obj;
    double primal_infeas;
    double dual_infeas;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    double objective = 0.0; // in the problem's own convention
    CMatrix Z;              // standard form: the primal matrix
    RVector x;              // inequality form: the variable vector
    double duality_gap = 0.0;
    int iterations = 0;
    std::string message;
    std::vector<IterateRecord> history;
    bool optimal() const { return status == SdpStatus::Optimal; }
};

SdpSolution solve_standard(const SdpStandard& p, const SdpOptions& opts = {});
SdpSolution solve_inequality(const SdpInequality& p, const SdpOptions& opts = {});

// [[Re H, -Im H], [Im H, Re H]]: real symmetric with the spectrum of H doubled.
RMatrix real_embedding(const CMatrix& h);

// Hermitian matrix recovered from a real symmetric matrix of doubled dimension;
// inverse of real_embedding on its image, PSD-preserving projection elsewhere.
CMatrix real_unembedding(const RMatrix& m);

} // namespace bellbound::sdp
