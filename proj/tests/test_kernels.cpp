#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "support.hpp"
#include "tlab/kernels.hpp"

using namespace tlab;
using tlab::testing::random_mat;

namespace {

// serial and parallel paths must agree bit for bit
bool identical(const std::vector<Mat>& a, const std::vector<Mat>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols() || !(a[i].array() == b[i].array()).all())
            return false;
    return true;
}

struct Threads {
    Threads() {
#ifdef _OPENMP
        omp_set_num_threads(4);
#endif
    }
} const force_threads;

std::vector<cplx> circle_points(Index n) {
    std::vector<cplx> p;
    for (Index j = 0; j < n; ++j) p.push_back(root_of_unity(j, n));
    return p;
}

}  // namespace

TEST_CASE("for_each_index visits every index once on both paths") {
    for (Exec e : {Exec::serial, Exec::parallel}) {
        std::vector<int> hits(1000, 0);
        for_each_index(1000, e, [&](Index i) { hits[static_cast<std::size_t>(i)] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
}

TEST_CASE("apply_columns") {
    std::mt19937_64 rng(1);
    const Mat x = random_mat(64, 9, rng);
    const OperatorRep op = OperatorRep::compose({OperatorRep::cyclic_shift(64, 3), OperatorRep::trunc_shift_bwd(64)});
    const Mat s = apply_columns(op, x, Exec::serial), p = apply_columns(op, x, Exec::parallel);
    CHECK((s.array() == p.array()).all());
    // shift oracle: row j+3 of the result is row j+1 of x
    for (Index j = 0; j < 60; ++j) CHECK(s.row((j + 3) % 64) == x.row(j + 1));
    CHECK((apply_adjoint_columns(op, x, Exec::serial).array() == apply_adjoint_columns(op, x, Exec::parallel).array()).all());
    CHECK_THROWS_AS(apply_columns(op, Mat::Zero(3, 1)), DimensionError);
}

TEST_CASE("window_samples against direct trigonometric sums") {
    std::mt19937_64 rng(2);
    const Index d = 2, M = 5;
    const Mat coeffs = random_mat(d * (2 * M + 1), 3, rng);
    const auto pts = circle_points(2 * M + 1);
    const auto s = window_samples(coeffs, d, M, pts, Exec::serial);
    CHECK(identical(s, window_samples(coeffs, d, M, pts, Exec::parallel)));
    double err = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j)
        for (Index c = 0; c < d; ++c)
            for (Index r = 0; r < 3; ++r) {
                cplx acc = 0.0;
                for (Index k = -M; k <= M; ++k)
                    acc += coeffs((k + M) * d + c, r) * std::polar(1.0, k * std::arg(pts[j]));
                err = std::max(err, std::abs(acc - s[j](c, r)));
            }
    CHECK(err < 1e-12);
    CHECK_THROWS_AS(window_samples(coeffs, d, M + 1, pts), DimensionError);
}

TEST_CASE("pointwise range projections") {
    std::mt19937_64 rng(3);
    std::vector<Mat> samples;
    for (int j = 0; j < 40; ++j) {
        // rank j % 3 in C^3
        Mat a = Mat::Zero(3, 2);
        if (j % 3 >= 1) a.col(0) = tlab::testing::random_vec(3, rng);
        if (j % 3 >= 2) a.col(1) = tlab::testing::random_vec(3, rng);
        samples.push_back(a);
    }
    const auto p = pointwise_range_projections(samples, 1e-10, Exec::serial);
    CHECK(identical(p, pointwise_range_projections(samples, 1e-10, Exec::parallel)));
    for (std::size_t j = 0; j < p.size(); ++j) {
        CHECK(max_abs(p[j] * p[j] - p[j]) < 1e-12);
        CHECK(std::abs(p[j].trace().real() - static_cast<double>(j % 3)) < 1e-12);
        CHECK(max_abs(p[j] * samples[j] - samples[j]) < 1e-12);
    }
}

TEST_CASE("evaluate_at_points and defect_roots") {
    const auto pts = circle_points(33);
    auto f = [](cplx z) {
        Mat m(2, 2);
        m << 0.5 * z, 0.0, 0.1, 0.3 * z * z;
        return m;
    };
    const auto a = evaluate_at_points(f, pts, Exec::serial);
    CHECK(identical(a, evaluate_at_points(f, pts, Exec::parallel)));
    const auto r = defect_roots(a, 2, Exec::serial);
    CHECK(identical(r, defect_roots(a, 2, Exec::parallel)));
    for (std::size_t j = 0; j < r.size(); ++j)
        CHECK(max_abs(r[j] * r[j] - (Mat::Identity(2, 2) - a[j].adjoint() * a[j])) < 1e-12);
}
