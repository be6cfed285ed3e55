#include "tlab/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tlab {

int worker_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Mat apply_columns(const OperatorRep& op, const Mat& x, Exec exec) {
    if (x.rows() != op.dim()) throw DimensionError("apply_columns: row count does not match operator");
    if (const auto* d = std::get_if<OperatorRep::Dense>(&op.variant())) return d->m * x;
    Mat y(x.rows(), x.cols());
    for_each_index(x.cols(), exec, [&](Index j) { y.col(j) = op.apply(x.col(j)); });
    return y;
}

Mat apply_adjoint_columns(const OperatorRep& op, const Mat& x, Exec exec) {
    if (const auto* d = std::get_if<OperatorRep::Dense>(&op.variant())) return d->m.adjoint() * x;
    return apply_columns(op.adjoint(), x, exec);
}

std::vector<Mat> evaluate_at_points(const std::function<Mat(cplx)>& f, const std::vector<cplx>& points,
                                    Exec exec) {
    std::vector<Mat> out(points.size());
    for_each_index(static_cast<Index>(points.size()), exec,
                   [&](Index j) { out[static_cast<std::size_t>(j)] = f(points[static_cast<std::size_t>(j)]); });
    return out;
}

std::vector<Mat> defect_roots(const std::vector<Mat>& thetas, Index fiber, Exec exec) {
    std::vector<Mat> out(thetas.size());
    for_each_index(static_cast<Index>(thetas.size()), exec, [&](Index j) {
        const Mat& t = thetas[static_cast<std::size_t>(j)];
        Mat g = Mat::Identity(fiber, fiber);
        if (t.size()) g -= t.adjoint() * t;
        out[static_cast<std::size_t>(j)] = hermitian_sqrt_psd(g);
    });
    return out;
}

std::vector<Mat> window_samples(const Mat& coeffs, Index d, Index M, const std::vector<cplx>& points, Exec exec) {
    const Index width = 2 * M + 1;
    if (coeffs.rows() != d * width) throw DimensionError("window_samples: coefficient layout mismatch");
    std::vector<Mat> out(points.size());
    for_each_index(static_cast<Index>(points.size()), exec, [&](Index j) {
        const cplx w = points[static_cast<std::size_t>(j)];
        Mat s = Mat::Zero(d, coeffs.cols());
        // powers by direct evaluation keep every point independent of the others
        for (Index k = -M; k <= M; ++k) {
            const cplx wk = std::pow(w, static_cast<double>(k));
            s += wk * coeffs.middleRows((k + M) * d, d);
        }
        out[static_cast<std::size_t>(j)] = std::move(s);
    });
    return out;
}

std::vector<Mat> pointwise_range_projections(const std::vector<Mat>& samples, double tol, Exec exec) {
    const Index n = static_cast<Index>(samples.size());
    std::vector<RVec> sv(samples.size());
    std::vector<Mat> us(samples.size());
    for_each_index(n, exec, [&](Index j) {
        const Mat& s = samples[static_cast<std::size_t>(j)];
        if (s.cols() == 0) {
            sv[static_cast<std::size_t>(j)] = RVec();
            us[static_cast<std::size_t>(j)] = Mat(s.rows(), 0);
            return;
        }
        Eigen::JacobiSVD<Mat> svd(s, Eigen::ComputeThinU);
        sv[static_cast<std::size_t>(j)] = svd.singularValues();
        us[static_cast<std::size_t>(j)] = svd.matrixU();
    });
    double top = 0.0;
    for (const RVec& s : sv)
        if (s.size()) top = std::max(top, s(0));
    std::vector<Mat> out(samples.size());
    for_each_index(n, exec, [&](Index j) {
        const std::size_t i = static_cast<std::size_t>(j);
        const Index d = samples[i].rows();
        Index r = 0;
        while (r < sv[i].size() && sv[i](r) > tol * top) ++r;
        const Mat u = us[i].leftCols(r);
        out[i] = r ? Mat(u * u.adjoint()) : Mat(Mat::Zero(d, d));
    });
    return out;
}

}  // namespace tlab
