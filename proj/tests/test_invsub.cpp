#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "tlab/invsub.hpp"

using namespace tlab;

namespace {

// circle samples on the natural grid of an explicit coefficient vector
cplx evaluate(const Vec& coeffs, Index M, cplx w) {
    cplx s = 0.0;
    for (Index k = -M; k <= M; ++k) s += coeffs(k + M) * std::pow(w, static_cast<double>(k));
    return s;
}

std::vector<bool> lower_half(Index N) {
    std::vector<bool> E(static_cast<std::size_t>(N));
    for (Index j = 0; j < N; ++j) E[static_cast<std::size_t>(j)] = std::sin(2.0 * kPi * j / N) < 0.0;
    return E;
}

FourierWindowSubspace h2(Index M, Index from = 0) {
    return make_window_subspace(1, M, monomial_columns(1, M, from, M, 0), M / 2);
}

}  // namespace

TEST_CASE("window layout") {
    const FourierWindowSubspace s = h2(4);
    CHECK(s.window_dim() == 9);
    CHECK(s.grid_size() == 9);
    CHECK(s.index(-4, 0) == 0);
    CHECK(s.index(0, 0) == 4);
    CHECK(s.margin < s.M);
    CHECK_THROWS_AS(make_window_subspace(1, 4, Mat::Zero(8, 1)), DimensionError);
    // blaschke coefficients against the geometric series by hand
    const auto c = blaschke_coefficients(0.5, 4);
    CHECK(std::abs(c[0] + 0.5) < 1e-15);
    CHECK(std::abs(c[1] - 0.75) < 1e-15);
    CHECK(std::abs(c[3] - 0.75 * 0.25) < 1e-15);
}

TEST_CASE("shift_action") {
    const FourierWindowSubspace one = make_window_subspace(1, 4, monomial_columns(1, 4, 0, 0, 0), 2);
    const FourierWindowSubspace chi = shift_action(one, 1);
    CHECK(chi.basis.rank() == 1);
    CHECK(std::abs(std::abs(chi.basis.columns(chi.index(1, 0), 0)) - 1.0) < 1e-15);
    CHECK(chi.margin == 1);
    const FourierWindowSubspace back = shift_action(chi, -1);
    CHECK(contains(one.basis, back.basis, 1e-12));
    const FourierWindowSubspace top = make_window_subspace(1, 4, monomial_columns(1, 4, 4, 4, 0));
    CHECK(top.margin == 0);
    CHECK_THROWS_AS(shift_action(top, 1), MarginError);
    CHECK_THROWS_AS(shift_action(one, 2), DomainError);
}

TEST_CASE("classify_invariance") {
    const Index M = 8, N = 2 * M + 1;
    const auto full = classify_invariance(make_window_subspace(1, M, Mat::Identity(N, N), M / 2));
    CHECK(full.verdict == Invariance::doubly);
    REQUIRE(full.range.has_value());
    CHECK(full.range->is_constant_full());

    CHECK(classify_invariance(h2(M)).verdict == Invariance::simply);

    const auto E = lower_half(N);
    const auto wie = classify_invariance(make_window_subspace(1, M, wiener_columns(M, E), M / 2));
    CHECK(wie.verdict == Invariance::doubly);
    REQUIRE(wie.range.has_value());
    for (Index j = 0; j < N; ++j) CHECK(wie.range->rank_at(j) == (E[static_cast<std::size_t>(j)] ? 1 : 0));

    // a lone chi^2 is not invariant
    const auto lone = classify_invariance(make_window_subspace(1, M, monomial_columns(1, M, 2, 2, 0), M / 2));
    CHECK(lone.verdict == Invariance::not_invariant);

    const FourierWindowSubspace flat = make_window_subspace(1, M, monomial_columns(1, M, 0, M, 0), 0);
    CHECK_THROWS_AS(classify_invariance(flat), MarginError);
    CHECK(std::string(to_string(Invariance::simply)) == "simply");
}

TEST_CASE("innovation_basis") {
    const Index M = 10;
    SUBCASE("H2 gives constants") {
        const InnovationResult r = innovation_basis(h2(M));
        REQUIRE(r.space.basis.rank() == 1);
        CHECK(std::abs(std::abs(r.space.basis.columns(M, 0)) - 1.0) < 1e-12);
    }
    SUBCASE("chi^3 H2 gives chi^3") {
        const InnovationResult r = innovation_basis(h2(M, 3));
        REQUIRE(r.space.basis.rank() == 1);
        CHECK(std::abs(std::abs(r.space.basis.columns(M + 3, 0)) - 1.0) < 1e-12);
    }
    SUBCASE("two channels: chi H2 e1 + H2 e2") {
        const Index N = 2 * M + 1;
        Mat cols(2 * N, 2 * M + 1);
        cols << monomial_columns(2, M, 1, M, 0), monomial_columns(2, M, 0, M, 1);
        const FourierWindowSubspace S = make_window_subspace(2, M, cols, M / 2);
        const InnovationResult r = innovation_basis(S);
        CHECK(r.space.basis.rank() == 2);
        const SubspaceBasis want = coordinate_subspace(2 * N, {S.index(1, 0), S.index(0, 1)});
        CHECK(contains(want, r.space.basis, 1e-10));
    }
    SUBCASE("doubly invariant input is flagged") {
        const Index N = 2 * M + 1;
        const InnovationResult r = innovation_basis(make_window_subspace(1, M, Mat::Identity(N, N), M / 2));
        CHECK(r.doubly_flag);
        CHECK(r.space.basis.rank() == 0);
    }
    SUBCASE("innovations at different depths are orthogonal") {
        const FourierWindowSubspace S = h2(M);
        const InnovationResult i0 = innovation_basis(S);
        const InnovationResult i1 = innovation_basis(shift_action(S, 1));
        CHECK(max_abs(i0.space.basis.columns.adjoint() * i1.space.basis.columns) <= 1e-10);
    }
}

TEST_CASE("rigid_from_innovation") {
    const Index M = 10, N = 2 * M + 1;
    const RigidFunction u1 = rigid_from_innovation(innovation_basis(h2(M)).space);
    for (const Mat& v : u1.values) CHECK(std::abs(v(0, 0) - 1.0) < 1e-12);
    const RigidFunction u3 = rigid_from_innovation(innovation_basis(h2(M, 3)).space);
    const cplx ph = u3.values[0](0, 0);
    CHECK(std::abs(std::abs(ph) - 1.0) < 1e-12);
    for (Index j = 0; j < N; ++j) {
        const cplx w = root_of_unity(j, N);
        CHECK(std::abs(u3.values[static_cast<std::size_t>(j)](0, 0) - ph * w * w * w) < 1e-12);
    }
    CHECK(u3.partial_isometry_defect < 1e-8);
    CHECK(u3.rank() == 1);
    // U H2 reproduces the shift part
    const FourierWindowSubspace S = h2(M, 3);
    CHECK(rigid_span_defect(innovation_basis(S).space, S) < 1e-8);
    FourierWindowSubspace empty = S;
    empty.basis = SubspaceBasis::empty(S.window_dim());
    CHECK_THROWS_AS(rigid_from_innovation(empty), PreconditionError);
}

TEST_CASE("beurling_inner") {
    const Index M = 32, N = 2 * M + 1;
    const BeurlingResult one = beurling_inner(h2(M));
    for (cplx q : one.q) CHECK(std::abs(q - 1.0) < 1e-12);

    // normalized so that q at the first grid point is positive real
    const BeurlingResult c3 = beurling_inner(h2(M, 3));
    CHECK(std::abs(c3.q[0] - 1.0) < 1e-12);
    for (Index j = 0; j < N; ++j) CHECK(std::abs(c3.q[static_cast<std::size_t>(j)] - std::pow(root_of_unity(j, N), 3.0)) < 1e-12);

    // the planted span misses H2 only along the truncated Szego kernel, of weight |a|^M;
    // that must sit far below the orthonormalization cutoff
    for (double a : {0.5, -0.3, 0.9}) {
        const Index Ma = static_cast<Index>(std::ceil(std::log(1e-15) / std::log(std::abs(a))));
        const Index Na = 2 * Ma + 1;
        const BeurlingResult b = beurling_inner(make_window_subspace(1, Ma, planted_columns(Ma, blaschke_coefficients(a, Ma + 1)), Ma / 2));
        CHECK(b.modulus_deviation <= 1e-8);
        // recovered / planted is one unimodular constant across the grid
        auto planted = [a](cplx w) { return (w - a) / (1.0 - a * w); };
        const cplx ratio0 = b.q[0] / planted(1.0);
        CHECK(std::abs(std::abs(ratio0) - 1.0) < 1e-8);
        double spread = 0.0;
        for (Index j = 0; j < Na; ++j) {
            const cplx w = root_of_unity(j, Na);
            spread = std::max(spread, std::abs(b.q[static_cast<std::size_t>(j)] - ratio0 * planted(w)));
        }
        CHECK(spread <= 1e-7);
    }
    CHECK_THROWS_AS(beurling_inner(make_window_subspace(2, 4, Mat::Identity(18, 18), 2)), DimensionError);
}

TEST_CASE("Halmos-Helson decomposition") {
    const Index m = 12, N = 2 * m + 1;
    SUBCASE("H2 gives U = 1, K = 0") {
        const HalmosHelsonReport r = halmos_helson_decompose(h2(m));
        CHECK(r.U.rank() == 1);
        for (Index j = 0; j < N; ++j) CHECK(r.rank_K[static_cast<std::size_t>(j)] == 0);
    }
    SUBCASE("doubly invariant: no shift part, K = J") {
        const auto E = lower_half(N);
        const HalmosHelsonReport r = halmos_helson_decompose(make_window_subspace(1, m, wiener_columns(m, E), m / 2));
        CHECK(r.U.rank() == 0);
        CHECK(r.dim_shift_part == 0);
        for (Index j = 0; j < N; ++j) CHECK(r.rank_K[static_cast<std::size_t>(j)] == (E[static_cast<std::size_t>(j)] ? 1 : 0));
    }
    SUBCASE("mixed example") {
        const auto E = lower_half(N);
        const Index ne = std::count(E.begin(), E.end(), true);
        Mat cols(2 * N, m + ne);
        cols << monomial_columns(2, m, 1, m, 0), tensor_channel(wiener_columns(m, E), 2, 1);
        const FourierWindowSubspace S = make_window_subspace(2, m, cols, m / 2);
        const HalmosHelsonReport r = halmos_helson_decompose(S);
        CHECK(r.orthogonality_residual <= 1e-8);
        CHECK(r.U.partial_isometry_defect <= 1e-8);
        CHECK(r.reproduction_defect <= 1e-8);
        for (Index j = 0; j < N; ++j) {
            const std::size_t s = static_cast<std::size_t>(j);
            CHECK(r.rank_J[s] == 1);
            CHECK(r.rank_K[s] == (E[s] ? 1 : 0));
            // J on channel 0, K on channel 1
            CHECK(std::abs(r.J.projections[s](0, 0) - 1.0) < 1e-8);
            if (E[s]) CHECK(std::abs(r.K.projections[s](1, 1) - 1.0) < 1e-8);
        }
        // chi e1 generator: U(w) = phase * w on the first channel
        const cplx ph = r.U.values[0](0, 0) / root_of_unity(0, N);
        for (Index j = 0; j < N; ++j)
            CHECK(std::abs(r.U.values[static_cast<std::size_t>(j)](0, 0) - ph * root_of_unity(j, N)) < 1e-8);
        // core: pointwise route against iterated cyclic intersection
        const FourierWindowSubspace core = range_function_subspace(r.K, m, S.margin);
        const FourierWindowSubspace iter = doubly_invariant_core_iterated(S, N - 1);
        CHECK(core.basis.rank() == iter.basis.rank());
        CHECK(containment_defect(core.basis, iter.basis) < 1e-8);
        const json j = to_json(r);
        CHECK(j.contains("orthogonality_residual"));
    }
    SUBCASE("non-invariant input is refused") {
        CHECK_THROWS_AS(halmos_helson_decompose(make_window_subspace(1, m, monomial_columns(1, m, 2, 2, 0), m / 2)),
                        PreconditionError);
    }
}

TEST_CASE("range function per-point diff") {
    const Index m = 6, N = 2 * m + 1;
    auto E1 = lower_half(N), E2 = E1;
    E2[0] = true;
    const RangeFunction K1 = doubly_invariant_core(make_window_subspace(1, m, wiener_columns(m, E1), m / 2));
    const RangeFunction K2 = doubly_invariant_core(make_window_subspace(1, m, wiener_columns(m, E2), m / 2));
    const RangeFunctionDiff d = range_function_diff(K1, K2);
    CHECK(d.differing_points == std::vector<Index>{0});
}

TEST_CASE("window sample oracle") {
    // the Wiener column for point j is a unit vector sampling to sqrt(N) times the indicator of j
    const Index M = 5, N = 2 * M + 1;
    std::vector<bool> E(static_cast<std::size_t>(N), false);
    E[3] = true;
    const Vec c = wiener_columns(M, E).col(0);
    for (Index j = 0; j < N; ++j) CHECK(std::abs(evaluate(c, M, root_of_unity(j, N)) - (j == 3 ? std::sqrt(double(N)) : 0.0)) < 1e-12);
}
