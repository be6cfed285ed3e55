#pragma once

#include <optional>
#include <vector>

#include "tlab/opcore.hpp"
#include "tlab/report.hpp"

namespace tlab {

// Subspace of the coefficient window [-M, M] of L^2 with d-dimensional fiber.
// Coefficient (k, c) sits at index (k + M) * d + c. The natural sample grid is
// the N = 2M + 1 roots of unity, on which the window is exactly the space of samples.
struct FourierWindowSubspace {
    Index d = 1;
    Index M = 0;
    SubspaceBasis basis;
    Index margin = 0;

    Index window_dim() const { return d * (2 * M + 1); }
    Index grid_size() const { return 2 * M + 1; }
    Index index(Index k, Index c) const { return (k + M) * d + c; }
};

// margin < 0 means: distance of the support from the window edge
FourierWindowSubspace make_window_subspace(Index d, Index M, const Mat& vectors, Index margin = -1,
                                           double tol = 1e-10);

// chi^k e_c for k in [first, last]
Mat monomial_columns(Index d, Index M, Index first, Index last, Index channel);
// scalar window vectors whose samples on the natural grid are the indicator of point j, for j in E
Mat wiener_columns(Index M, const std::vector<bool>& E);
// window truncations of q * chi^k, k = 0..M, for analytic q given by its Taylor coefficients
Mat planted_columns(Index M, const std::vector<cplx>& q);
std::vector<cplx> blaschke_coefficients(cplx a, Index count);
// block-diagonal stacking: scalar columns for each channel
Mat tensor_channel(const Mat& scalar_cols, Index d, Index channel);

FourierWindowSubspace shift_action(const FourierWindowSubspace& S, int power);

enum class Invariance { doubly, simply, not_invariant };
const char* to_string(Invariance v);

struct InvarianceReport {
    Invariance verdict = Invariance::not_invariant;
    double forward_defect = 0.0;   // chi S_int into S
    double backward_defect = 0.0;  // chi^{-1} S_int into S
    Index interior_rank = 0;
    Index margin_used = 1;
    double tol = 1e-8;
    std::optional<RangeFunction> range;
};

InvarianceReport classify_invariance(const FourierWindowSubspace& S, double tol = 1e-8);

struct InnovationResult {
    FourierWindowSubspace space;  // I_0 with the margin left after the shift
    bool doubly_flag = false;
};
InnovationResult innovation_basis(const FourierWindowSubspace& S, double tol = 1e-8);

struct RigidFunction {
    GridDomain grid = GridDomain::circle(1);
    std::vector<Mat> values;
    Mat initial_projection;
    double partial_isometry_defect = 0.0;
    Index rank() const;
};

RigidFunction rigid_from_innovation(const FourierWindowSubspace& I0, Index N = 0, double tol = 1e-8);
// two-sided distance between span{chi^n u_i : n >= 0} (window-truncated) and `target`
double rigid_span_defect(const FourierWindowSubspace& I0, const FourierWindowSubspace& target);

struct BeurlingResult {
    GridDomain grid = GridDomain::circle(1);
    std::vector<cplx> q;
    double modulus_deviation = 0.0;
};
BeurlingResult beurling_inner(const FourierWindowSubspace& S, Index N = 0, double tol = 1e-8);

// K(w_j) = {x : delta_j (x) x in S}, on the natural grid
RangeFunction doubly_invariant_core(const FourierWindowSubspace& S, double tol = 1e-8);
// window subspace spanned by delta_j (x) K(w_j)
FourierWindowSubspace range_function_subspace(const RangeFunction& K, Index M, Index margin);
// intersection of C^n S, n = 0..depth, for the cyclic coefficient shift C
FourierWindowSubspace doubly_invariant_core_iterated(const FourierWindowSubspace& S, Index depth,
                                                     double tol = 1e-8);

struct HalmosHelsonReport {
    RigidFunction U;
    RangeFunction K;
    RangeFunction J;
    std::vector<Index> rank_J, rank_K;
    double orthogonality_residual = 0.0;  // max_j |J(w_j) K(w_j)|
    Index dim_M = 0, dim_shift_part = 0, dim_core = 0;
    double reproduction_defect = 0.0;
    Index window_depth = 0;  // K is computed within this many cyclic steps
    Index margin_used = 0;
    Invariance verdict = Invariance::not_invariant;
    double tol = 1e-8;
};

HalmosHelsonReport halmos_helson_decompose(const FourierWindowSubspace& S, double tol = 1e-8);
json to_json(const HalmosHelsonReport& r);

}  // namespace tlab
