#pragma once

// Data-parallel kernels. Every kernel takes an Exec switch: `serial` is the
// reference path kept for testing, `parallel` distributes independent
// iterations over OpenMP threads. Each iteration writes only its own output
// slot, so both paths produce bit-identical results.

#include <functional>
#include <vector>

#include "tlab/opcore.hpp"

namespace tlab {

enum class Exec { serial, parallel };

template <class Fn>
void for_each_index(Index n, Exec exec, Fn&& fn) {
    if (exec == Exec::serial) {
        for (Index i = 0; i < n; ++i) fn(i);
        return;
    }
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) fn(i);
}

int worker_threads();

// column j of the result is op applied to column j of x
Mat apply_columns(const OperatorRep& op, const Mat& x, Exec exec = Exec::parallel);
Mat apply_adjoint_columns(const OperatorRep& op, const Mat& x, Exec exec = Exec::parallel);

// f evaluated at every point, one matrix per point
std::vector<Mat> evaluate_at_points(const std::function<Mat(cplx)>& f, const std::vector<cplx>& points,
                                    Exec exec = Exec::parallel);

// (I - T_j^H T_j)^{1/2} per sample
std::vector<Mat> defect_roots(const std::vector<Mat>& thetas, Index fiber, Exec exec = Exec::parallel);

// Trigonometric sample values of window coefficient columns.
// coeffs: d*(2M+1) x r in layout (k+M)*d + c. Result entry j is d x r: sum_k c_k w_j^k.
std::vector<Mat> window_samples(const Mat& coeffs, Index d, Index M, const std::vector<cplx>& points,
                                Exec exec = Exec::parallel);

// orthogonal projection onto the column span of each sample; the rank cutoff is
// relative to the largest singular value found over the whole grid
std::vector<Mat> pointwise_range_projections(const std::vector<Mat>& samples, double tol,
                                             Exec exec = Exec::parallel);

}  // namespace tlab
