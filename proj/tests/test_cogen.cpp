#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "tlab/cogen.hpp"

using namespace tlab;
using tlab::testing::random_hermitian;
using tlab::testing::random_mat;

namespace {

Mat scalar(cplx c) { return Mat::Constant(1, 1, c); }

Mat diag2(cplx a, cplx b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// A = iH - B B^H has numerical range in the closed left half-plane
Mat random_dissipative(Index d, std::mt19937_64& rng) {
    const Mat b = random_mat(d, d, rng) / std::sqrt(static_cast<double>(d));
    return kI * random_hermitian(d, rng) - b * b.adjoint();
}

std::vector<Vec> unit_probes(Index n, std::initializer_list<Index> at) {
    std::vector<Vec> p;
    for (Index k : at) {
        Vec e = Vec::Zero(n);
        e(k) = 1.0;
        p.push_back(e);
    }
    return p;
}

}  // namespace

TEST_CASE("cayley_cogenerator examples") {
    CHECK(std::abs(cayley_cogenerator(OperatorRep::dense(scalar(-1.0))).to_dense()(0, 0)) < 1e-15);
    CHECK(std::abs(cayley_cogenerator(OperatorRep::dense(scalar(kI))).to_dense()(0, 0) + kI) < 1e-15);
    const Mat w = cayley_cogenerator(OperatorRep::dense(diag2(-1.0, -2.0))).to_dense();
    // per eigenvalue: (a + 1) / (a - 1)
    CHECK(max_abs(w - diag2(0.0, (-2.0 + 1.0) / (-2.0 - 1.0))) < 1e-15);
    CHECK_THROWS_AS(cayley_cogenerator(OperatorRep::dense(scalar(1.0))), SpectrumError);
}

TEST_CASE("cayley_generator examples") {
    CHECK(std::abs(cayley_generator(OperatorRep::dense(scalar(0.0))).to_dense()(0, 0) + 1.0) < 1e-15);
    CHECK(std::abs(cayley_generator(OperatorRep::dense(scalar(1.0 / 3.0))).to_dense()(0, 0) + 2.0) < 1e-14);
    CHECK_THROWS_AS(cayley_generator(OperatorRep::dense(diag2(1.0, 0.5))), SpectrumError);
}

TEST_CASE("Cayley round trip and contraction property on random dissipative generators") {
    std::mt19937_64 rng(11);
    for (Index d : {1, 3, 8, 16}) {
        const Mat A = random_dissipative(d, rng);
        REQUIRE(is_dissipative(A));
        const OperatorRep W = cayley_cogenerator(OperatorRep::dense(A));
        CHECK(op_norm(W.to_dense()) <= 1.0 + 1e-10);
        CHECK(max_abs(cayley_generator(W).to_dense() - A) <= 1e-9);
    }
}

TEST_CASE("skew-adjoint generators give unitary cogenerators") {
    std::mt19937_64 rng(12);
    const Mat W = cayley_cogenerator(OperatorRep::dense(kI * random_hermitian(6, rng))).to_dense();
    CHECK(max_abs(W.adjoint() * W - Mat::Identity(6, 6)) < 1e-10);
}

TEST_CASE("semigroup_element") {
    CHECK(std::abs(semigroup_element(OperatorRep::dense(scalar(0.0)), 1.0).to_dense()(0, 0) - 0.367879441171442) < 1e-12);
    const Mat w = semigroup_element(OperatorRep::dense(diag2(0.0, 1.0 / 3.0)), 1.0).to_dense();
    CHECK(max_abs(w - diag2(std::exp(-1.0), std::exp(-2.0))) < 1e-12);
    std::mt19937_64 rng(13);
    const OperatorRep W = cayley_cogenerator(OperatorRep::dense(random_dissipative(5, rng)));
    CHECK(max_abs(semigroup_element(W, 0.0).to_dense() - Mat::Identity(5, 5)) == 0.0);
    for (double t : {0.3, 2.0, 5.0})
        for (double s : {0.1, 1.7, 5.0}) {
            const Mat lhs = semigroup_element(W, t).to_dense() * semigroup_element(W, s).to_dense();
            CHECK(max_abs(lhs - semigroup_element(W, t + s).to_dense()) < 1e-9);
        }
    CHECK_THROWS_AS(semigroup_element(W, -1.0), DomainError);
    // sampler agrees with the direct evaluation
    const SemigroupSampler S = semigroup_of(W);
    CHECK(max_abs(S.eval(0.7).to_dense() - semigroup_element(W, 0.7).to_dense()) == 0.0);
}

TEST_CASE("cogenerator_from_semigroup") {
    SUBCASE("scalar exp(-t)") {
        const SemigroupSampler S{[](double t) { return OperatorRep::dense(scalar(std::exp(-t))); }, 1};
        const CogeneratorEstimate e = cogenerator_from_semigroup(S, 1e-3);
        const cplx w = e.W.to_dense()(0, 0);
        CHECK(std::abs(w) < 3e-4);
        // Taylor: phi_t(exp(-t)) = (e^{-t} - 1 + t)/(e^{-t} - 1 - t) ~ -t/4
        CHECK(std::abs(w.real() + 0.25e-3) < 1e-6);
        CHECK_FALSE(e.degenerate);
    }
    SUBCASE("identity semigroup is flagged") {
        const SemigroupSampler S{[](double) { return OperatorRep::identity(3); }, 3};
        const CogeneratorEstimate e = cogenerator_from_semigroup(S, 1e-3);
        CHECK(e.degenerate);
        CHECK(max_abs(e.W.to_dense() + Mat::Identity(3, 3)) < 1e-12);
    }
    SUBCASE("O(t) convergence for diag(0, 1/3)") {
        const OperatorRep W = OperatorRep::dense(diag2(0.0, 1.0 / 3.0));
        const SemigroupSampler S = semigroup_of(W);
        const double e1 = max_abs(cogenerator_from_semigroup(S, 1e-2).W.to_dense() - W.to_dense());
        const double e2 = max_abs(cogenerator_from_semigroup(S, 5e-3).W.to_dense() - W.to_dense());
        CHECK(e2 <= 0.6 * e1);
    }
    CHECK_THROWS(cogenerator_from_semigroup(semigroup_of(OperatorRep::dense(scalar(0.0))), 0.0));
}

TEST_CASE("C-class examples") {
    SUBCASE("scalar 1/2 is C00") {
        const ClassReport r = classify_c_class(OperatorRep::dense(scalar(0.5)), unit_probes(1, {0}), 40);
        CHECK(r.verdict == CClass::C00);
        CHECK(r.forward_decay[0].size() == 41);
        // |0.5|^n by hand
        for (std::size_t n = 0; n < r.forward_decay[0].size(); ++n)
            CHECK(std::abs(r.forward_decay[0][n] - std::pow(0.5, static_cast<double>(n))) < 1e-15);
    }
    SUBCASE("backward shift is C01") {
        const ClassReport r = classify_c_class(OperatorRep::trunc_shift_bwd(64), unit_probes(64, {5}), 32);
        CHECK(r.verdict == CClass::C01);
        CHECK(r.forward_decay[0][5] == 1.0);
        CHECK(r.forward_decay[0][6] == 0.0);
        CHECK(r.adjoint_decay[0].back() == 1.0);
    }
    SUBCASE("forward shift is C10") {
        const ClassReport r = classify_c_class(OperatorRep::trunc_shift_fwd(64), unit_probes(64, {5}), 32);
        CHECK(r.verdict == CClass::C10);
    }
    SUBCASE("unimodular scalar is C11") {
        const ClassReport r = classify_c_class(OperatorRep::dense(scalar(std::polar(1.0, 0.7))), unit_probes(1, {0}), 20);
        CHECK(r.verdict == CClass::C11);
    }
    SUBCASE("dense c.n.u. contraction with spectral radius < 1 is C00") {
        std::mt19937_64 rng(14);
        for (int trial = 0; trial < 3; ++trial) {
            Mat m = random_mat(6, 6, rng);
            m *= 0.6 / op_norm(m);
            std::vector<Vec> probes = {tlab::testing::random_vec(6, rng), tlab::testing::random_vec(6, rng)};
            CHECK(classify_c_class(OperatorRep::dense(m), probes, 60).verdict == CClass::C00);
        }
    }
}

TEST_CASE("classify_sequences thresholds") {
    const std::vector<double> decays = {1.0, 1e-3, 1e-7}, stays = {1.0, 0.9, 0.8}, middle = {1.0, 0.4, 0.3};
    CHECK(classify_sequences({decays}, {decays}) == CClass::C00);
    CHECK(classify_sequences({decays}, {stays}) == CClass::C01);
    CHECK(classify_sequences({stays}, {decays}) == CClass::C10);
    CHECK(classify_sequences({stays}, {stays}) == CClass::C11);
    CHECK(classify_sequences({middle}, {stays}) == CClass::inconclusive);
    // raw sequences may be re-thresholded by the caller
    CHECK(classify_sequences({middle}, {stays}, 0.35, 0.5) == CClass::C01);
    CHECK(std::string(to_string(CClass::C01)) == "C01");
}

TEST_CASE("is_dissipative") {
    CHECK(is_dissipative(diag2(-1.0, kI)));
    CHECK_FALSE(is_dissipative(diag2(0.1, -1.0)));
}
