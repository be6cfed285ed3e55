#pragma once

#include <functional>
#include <vector>

#include "tlab/opcore.hpp"

namespace tlab {

// t -> W_t for t >= 0
struct SemigroupSampler {
    std::function<OperatorRep(double)> eval;
    Index dim = 0;
};

enum class CClass { C00, C01, C10, C11, inconclusive };
const char* to_string(CClass c);

struct ClassReport {
    std::vector<std::vector<double>> forward_decay;  // per probe, n = 0..n_max
    std::vector<std::vector<double>> adjoint_decay;
    CClass verdict = CClass::inconclusive;
    bool one_not_eigenvalue = true;
    double decay_ratio = 1e-6;
    double persist_ratio = 0.5;
};

// verdict from raw sequences; exposed so callers can re-threshold a report
CClass classify_sequences(const std::vector<std::vector<double>>& forward,
                          const std::vector<std::vector<double>>& adjoint, double decay_ratio = 1e-6,
                          double persist_ratio = 0.5);

OperatorRep cayley_cogenerator(const OperatorRep& A);
OperatorRep cayley_generator(const OperatorRep& W);
OperatorRep semigroup_element(const OperatorRep& W, double t);
SemigroupSampler semigroup_of(const OperatorRep& W);

struct CogeneratorEstimate {
    OperatorRep W;
    // W_t numerically equal to I: the estimate -I is the cogenerator of the zero generator,
    // not of a flow with 1 outside the spectrum
    bool degenerate = false;
};
CogeneratorEstimate cogenerator_from_semigroup(const SemigroupSampler& S, double t_small);

ClassReport classify_c_class(const OperatorRep& W, const std::vector<Vec>& probes, Index n_max);

// numerical range inside the closed left half-plane
bool is_dissipative(const Mat& A, double tol = 1e-12);

}  // namespace tlab
