#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "tlab/abclock.hpp"
#include "tlab/timeop.hpp"

using namespace tlab;

namespace {

double ab_probe_error(double h) {
    const MomentumGrid g = MomentumGrid::make(h, 6.0);
    const auto out = ab_momentum_apply(MomentumWavefunction::from_function(g, [](double k) { return k * k * std::exp(-k * k); }));
    double e = 0.0;
    for (Index j = 0; j < g.size(); ++j) {
        const double k = g.k(j);
        e = std::max(e, std::abs(out.samples(j) - 0.5 * kI * (3.0 - 4.0 * k * k) * std::exp(-k * k)));
    }
    return e;
}

MomentumWavefunction normalized_packet(const MomentumGrid& g, double k0, double sigma) {
    auto psi = MomentumWavefunction::from_function(
        g, [&](double k) { return std::exp(-(k - k0) * (k - k0) / (2.0 * sigma * sigma)); });
    psi.samples /= psi.norm();
    return psi;
}

}  // namespace

TEST_CASE("momentum grid") {
    const MomentumGrid g = MomentumGrid::make(0.1, 2.0);
    CHECK(g.n == 17);
    CHECK(g.size() == 34);
    CHECK(std::abs(g.k(g.pos(0)) - 0.4) < 1e-15);
    CHECK(std::abs(g.k(g.neg(0)) + 0.4) < 1e-15);
    CHECK(std::abs(g.k(0) + 2.0) < 1e-12);
    CHECK(std::abs(g.k(g.size() - 1) - 2.0) < 1e-12);
    for (Index j = 1; j < g.size(); ++j) CHECK(g.k(j) > g.k(j - 1));
    CHECK_THROWS_AS(MomentumGrid::make(0.0, 2.0), DimensionError);
    CHECK_THROWS_AS(MomentumGrid::make(0.5, 2.0), DimensionError);
}

TEST_CASE("ab_momentum_apply") {
    const double e1 = ab_probe_error(0.02), e2 = ab_probe_error(0.01);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e2 < 1e-3);

    const MomentumGrid g = MomentumGrid::make(0.02, 6.0);
    const auto zero = MomentumWavefunction::from_function(g, [](double) { return cplx(0.0); });
    CHECK(ab_momentum_apply(zero).samples.cwiseAbs().maxCoeff() == 0.0);

    const auto gauss = MomentumWavefunction::from_function(g, [](double k) { return std::exp(-k * k); });
    CHECK_FALSE(gauss.vanishing_at_zero);
    CHECK_THROWS_AS(ab_momentum_apply(gauss), DomainError);
    auto rough = MomentumWavefunction::from_function(g, [](double k) { return k * k * std::exp(-k * k); }, false);
    CHECK_THROWS_AS(ab_momentum_apply(rough), DomainError);
}

TEST_CASE("AB operator is symmetric up to O(h^2)") {
    auto asym = [](double h) {
        const MomentumGrid g = MomentumGrid::make(h, 7.0);
        const auto phi = MomentumWavefunction::from_function(g, [](double k) { return k * k * std::exp(-k * k); });
        const auto psi = MomentumWavefunction::from_function(
            g, [](double k) { return cplx(k * k * k, 0.5 * k * k) * std::exp(-(k - 0.3) * (k - 0.3)); });
        return std::abs(momentum_inner(ab_momentum_apply(phi), psi) - momentum_inner(phi, ab_momentum_apply(psi)));
    };
    const double a1 = asym(0.02), a2 = asym(0.01);
    CHECK(a1 < 1e-2);
    CHECK(a1 / a2 >= 3.0);
}

TEST_CASE("energy representation") {
    const MomentumGrid g = MomentumGrid::make(0.25, 3.0);
    SUBCASE("unit sample at k = 1") {
        auto d = MomentumWavefunction::from_function(g, [](double) { return cplx(0.0); });
        const Index i = 0;  // k = 4h = 1
        REQUIRE(g.k(g.pos(i)) == 1.0);
        d.samples(g.pos(i)) = 1.0;
        const EnergyRepVector v = energy_rep(d);
        CHECK(v.lambda(i) == 0.5);
        CHECK(v.values(i, 0) == cplx(1.0));
        CHECK(v.values(i, 1) == cplx(0.0));
    }
    SUBCASE("zero and round trip") {
        const auto z = MomentumWavefunction::from_function(g, [](double) { return cplx(0.0); });
        CHECK(energy_rep(z).values.cwiseAbs().maxCoeff() == 0.0);
        std::mt19937_64 rng(31);
        MomentumWavefunction r = z;
        r.samples = tlab::testing::random_vec(g.size(), rng);
        const EnergyRepVector v = energy_rep(r);
        CHECK(max_abs(energy_rep_inverse(v, g).samples - r.samples) <= 1e-12);
        CHECK(std::abs(v.norm() - r.norm()) <= 1e-12);
        // channel order is (+k, -k)
        CHECK(std::abs(v.values(2, 1) - r.samples(g.neg(2)) / std::sqrt(g.k(g.pos(2)))) < 1e-15);
        EnergyRepVector bad = v;
        bad.lambda(1) += 0.1;
        CHECK_THROWS_AS(energy_rep_inverse(bad, g), DimensionError);
        CHECK_THROWS_AS(energy_rep_inverse(v, MomentumGrid::make(0.125, 3.0)), DimensionError);
    }
    SUBCASE("Gaussian: defect against the continuum norm is first order") {
        const double exact = std::pow(kPi / 2.0, 0.25);
        std::vector<double> d;
        for (double h : {0.04, 0.02, 0.01}) {
            const auto psi = MomentumWavefunction::from_function(MomentumGrid::make(h, 6.0),
                                                                 [](double k) { return std::exp(-k * k); });
            d.push_back(isometry_defect(energy_rep(psi), exact));
        }
        CHECK(d[0] / d[1] >= 1.9);
        CHECK(d[1] / d[2] >= 1.9);
    }
}

TEST_CASE("Werner dilation") {
    const WernerDilation w = werner_dilation(8.0, 256);
    const Mat P = w.P_ext.to_dense();
    CHECK(max_abs(P - P.adjoint()) <= 1e-12);
    CHECK(w.grid.coordinate(w.zero_index()) == 0.0);
    // same operators as the two-channel Schroedinger couple on that grid
    const auto sq = schrodinger_couple(w.grid, 2);
    CHECK(max_abs(P - sq.P.to_dense()) == 0.0);
    Vec psi(2 * w.grid.size());
    for (Index j = 0; j < w.grid.size(); ++j) {
        const double l = w.grid.coordinate(j);
        psi(2 * j) = std::exp(-l * l);
        psi(2 * j + 1) = l * std::exp(-l * l);
    }
    CHECK(check_ccr(w.Q_ext, w.P_ext, {psi}).max_residual == check_ccr(sq.Q, sq.P, {psi}).max_residual);

    const GridFunction ext = w.zero_extension([](double l) { return std::array<cplx, 2>{l, 2.0 * l}; });
    for (Index j = 0; j <= w.zero_index(); ++j) CHECK(ext.samples.row(j).norm() == 0.0);
    CHECK(ext.samples(w.zero_index() + 3, 1) == 2.0 * w.grid.coordinate(w.zero_index() + 3));

    CHECK_THROWS_AS(werner_dilation(8.0, 100), DimensionError);
    CHECK_THROWS_AS(werner_dilation(0.0, 128), DimensionError);
}

TEST_CASE("Werner compression") {
    SUBCASE("probe vanishing to second order at 0: O(h^2)") {
        auto f = [](double l) { return cplx(l * l * l * std::exp(-l * l)); };
        auto df = [](double l) { return cplx((3.0 * l * l - 2.0 * l * l * l * l) * std::exp(-l * l)); };
        const auto c1 = compression_check(werner_dilation(8.0, 256), f, df, 1.0);
        const auto c2 = compression_check(werner_dilation(8.0, 512), f, df, 1.0);
        CHECK(c1.max_error / c2.max_error >= 3.5);
        CHECK(c2.points > c1.points);
    }
    SUBCASE("lambda exp(-lambda^2): the kink at 0 limits the rate") {
        // error on lambda in [from, 7]
        auto err = [](Index n, double from) {
            const WernerDilation w = werner_dilation(8.0, n);
            const GridFunction ext = w.zero_extension([](double l) { return std::array<cplx, 2>{l * std::exp(-l * l), 0.0}; });
            const Vec out = w.P_ext.apply(ext.flatten());
            double e = 0.0;
            for (Index j = w.zero_index() + 1; j < w.grid.size(); ++j) {
                const double l = w.grid.coordinate(j);
                if (l > 7.0) break;
                if (l >= from) e = std::max(e, std::abs(out(2 * j) + kI * (1.0 - 2.0 * l * l) * std::exp(-l * l)));
            }
            return e;
        };
        // first order at fixed distance from the kink
        CHECK(err(256, 1.0) / err(512, 1.0) >= 1.9);
        CHECK(err(512, 1.0) / err(1024, 1.0) >= 1.9);
        // no max-norm convergence next to it
        CHECK(err(1024, 0.0) / err(2048, 0.0) < 1.1);
    }
}

TEST_CASE("dilated pair satisfies WWR on aligned interior probes") {
    const WernerDilation w = werner_dilation(8.0, 256);
    const Index np = w.grid.size();
    Vec probe = Vec::Zero(2 * np);
    for (Index j = np / 4; j < 3 * np / 4; ++j) {
        const double l = w.grid.coordinate(j);
        probe(2 * j) = std::exp(-l * l);
        probe(2 * j + 1) = l * std::exp(-l * l);
    }
    const double h = w.grid.spacing();
    const auto r = check_wwr(WeylPairCandidate{Evolution::translation(w.grid, 2), w.Q_ext, 1}, {probe}, {h, -3 * h, 8 * h});
    CHECK(r.max_residual <= 1e-13);
}

TEST_CASE("embedding") {
    const MomentumGrid g = MomentumGrid::make(0.01, 8.0);
    const auto psi = normalized_packet(g, 4.0, 0.5);
    const WernerDilation w = werner_dilation(32.0, 4096);
    const Embedding e = embed(w, energy_rep(psi));
    for (Index j = 0; j <= w.zero_index(); ++j) CHECK(e.ext.samples.row(j).norm() == 0.0);
    CHECK(e.interpolation_error < 1e-6);
    // the embedding keeps the norm to quadrature accuracy
    CHECK(std::abs(std::sqrt(w.grid.spacing()) * e.ext.samples.norm() - 1.0) < 1e-6);
}

TEST_CASE("arrival density") {
    const MomentumGrid g = MomentumGrid::make(0.01, 8.0);
    const WernerDilation w = werner_dilation(32.0, 4096);
    const auto psi = normalized_packet(g, 4.0, 0.5);
    const ArrivalDensity d = arrival_density(psi, w);
    CHECK(std::abs(d.integral - 1.0) <= 1e-6);
    CHECK(d.density.minCoeff() >= 0.0);

    // aligned phase modulation moves the density by whole cells
    const GridFunction ext = embed(w, energy_rep(psi)).ext;
    const ArrivalDensity base = arrival_density_embedded(ext);
    const Index nt = base.density.size();
    for (Index m : {3, -11}) {
        const ArrivalDensity moved = arrival_density_embedded(phase_modulate(ext, static_cast<double>(m) * base.time_grid.spacing()));
        double diff = 0.0;
        for (Index k = 0; k < nt; ++k) diff = std::max(diff, std::abs(moved.density(k) - base.density(((k - m) % nt + nt) % nt)));
        CHECK(diff <= 1e-10);
    }

    const auto zero = MomentumWavefunction::from_function(g, [](double) { return cplx(0.0); });
    CHECK(arrival_density(zero, w).density.cwiseAbs().maxCoeff() == 0.0);
    MomentumWavefunction twice = psi;
    twice.samples *= 2.0;
    CHECK_THROWS_AS(arrival_density(twice, w), PreconditionError);

    const CsvTable c = density_curve(d);
    CHECK(c.header.size() == 2);
}
