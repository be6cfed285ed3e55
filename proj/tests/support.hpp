#pragma once

#include <cmath>
#include <random>

#include "tlab/opcore.hpp"

namespace tlab::testing {

inline Vec random_vec(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
    return v;
}

inline Mat random_mat(Index r, Index c, std::mt19937_64& rng) {
    Mat m(r, c);
    for (Index j = 0; j < c; ++j) m.col(j) = random_vec(r, rng);
    return m;
}

inline Mat random_hermitian(Index d, std::mt19937_64& rng) {
    const Mat a = random_mat(d, d, rng);
    return 0.5 * (a + a.adjoint());
}

inline Mat random_unitary(Index d, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Mat> qr(random_mat(d, d, rng));
    return qr.householderQ() * Mat::Identity(d, d);
}

// direct O(N^2) line transform: h/sqrt(2 pi) sum_j f_j exp(-i xi_k x_j)
inline Vec naive_line_dft(const Vec& f, double h, double x0, double xi0, double dxi) {
    const Index n = f.size();
    Vec out(n);
    for (Index k = 0; k < n; ++k) {
        cplx s = 0.0;
        for (Index j = 0; j < n; ++j) s += f(j) * std::polar(1.0, -(xi0 + k * dxi) * (x0 + j * h));
        out(k) = h / std::sqrt(2.0 * kPi) * s;
    }
    return out;
}

}  // namespace tlab::testing
