// Serial reference against OpenMP kernels: wall time and bitwise agreement.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>

#include "tlab/charfun.hpp"
#include "tlab/kernels.hpp"
#include "tlab/timeop.hpp"

using namespace tlab;

namespace {

template <class F>
double seconds(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

bool same(const std::vector<Mat>& a, const std::vector<Mat>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].size() != b[i].size() || a[i] != b[i]) return false;
    return true;
}

int report(const char* name, double ts, double tp, bool identical) {
    std::printf("%-28s serial %10.3f ms  parallel %10.3f ms  speedup %6.2f  %s\n", name, 1e3 * ts, 1e3 * tp,
                tp > 0 ? ts / tp : 0.0, identical ? "identical" : "MISMATCH");
    return identical ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    const int reps = quick ? 1 : 5;
    const Index M = quick ? 64 : 256, d = 3, r = 8;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::printf("threads: %d\n", worker_threads());
    int bad = 0;

    Mat coeffs(d * (2 * M + 1), r);
    for (Index i = 0; i < coeffs.rows(); ++i)
        for (Index j = 0; j < r; ++j) coeffs(i, j) = cplx(g(rng), g(rng));
    const GridDomain circ = GridDomain::circle(2 * M + 1);
    std::vector<cplx> pts;
    for (Index j = 0; j < circ.size(); ++j) pts.push_back(circ.circle_point(j));
    std::vector<Mat> s1, s2;
    const double a1 = seconds([&] { s1 = window_samples(coeffs, d, M, pts, Exec::serial); }, reps);
    const double a2 = seconds([&] { s2 = window_samples(coeffs, d, M, pts, Exec::parallel); }, reps);
    bad += report("window_samples", a1, a2, same(s1, s2));

    std::vector<Mat> p1, p2;
    const double b1 = seconds([&] { p1 = pointwise_range_projections(s1, 1e-10, Exec::serial); }, reps);
    const double b2 = seconds([&] { p2 = pointwise_range_projections(s1, 1e-10, Exec::parallel); }, reps);
    bad += report("pointwise_range_projections", b1, b2, same(p1, p2));

    Mat w(16, 16);
    for (Index i = 0; i < 16; ++i)
        for (Index j = 0; j < 16; ++j) w(i, j) = cplx(g(rng), g(rng));
    w /= 1.01 * op_norm(w);
    const DefectData dd = defect(OperatorRep::dense(w));
    const Index Nc = quick ? 256 : 2048;
    std::vector<cplx> circle_pts;
    for (Index j = 0; j < Nc; ++j) circle_pts.push_back(root_of_unity(j, Nc));
    auto th = [&](cplx l) { return theta(dd, l); };
    std::vector<Mat> t1, t2;
    const double c1 = seconds([&] { t1 = evaluate_at_points(th, circle_pts, Exec::serial); }, reps);
    const double c2 = seconds([&] { t2 = evaluate_at_points(th, circle_pts, Exec::parallel); }, reps);
    bad += report("theta_on_circle", c1, c2, same(t1, t2));

    std::vector<Mat> d1, d2;
    const double e1 = seconds([&] { d1 = defect_roots(t1, 16, Exec::serial); }, reps);
    const double e2 = seconds([&] { d2 = defect_roots(t1, 16, Exec::parallel); }, reps);
    bad += report("defect_roots", e1, e2, same(d1, d2));

    const Index Nl = quick ? 256 : 1024;
    const OperatorRep P = spectral_derivative(GridDomain::line(Nl, 0.05, -0.025 * static_cast<double>(Nl)));
    Mat x(Nl, quick ? 32 : 256);
    for (Index i = 0; i < x.rows(); ++i)
        for (Index j = 0; j < x.cols(); ++j) x(i, j) = cplx(g(rng), g(rng));
    Mat y1, y2;
    const double f1 = seconds([&] { y1 = apply_columns(P, x, Exec::serial); }, reps);
    const double f2 = seconds([&] { y2 = apply_columns(P, x, Exec::parallel); }, reps);
    bad += report("spectral_derivative_columns", f1, f2, y1 == y2);

    const FiniteWeylPair fw = finite_weyl_pair(quick ? 256 : 1024);
    double r1 = 0, r2 = 0;
    const double h1 = seconds([&] { r1 = finite_weyl_residual(fw, Exec::serial); }, reps);
    const double h2 = seconds([&] { r2 = finite_weyl_residual(fw, Exec::parallel); }, reps);
    bad += report("finite_weyl_residual", h1, h2, r1 == r2);
    return bad ? 1 : 0;
}
