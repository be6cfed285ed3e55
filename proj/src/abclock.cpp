#include "tlab/abclock.hpp"

#include <algorithm>
#include <cmath>

#include "tlab/timeop.hpp"

namespace tlab {

// ---------------------------------------------------------------- momentum grid

MomentumGrid MomentumGrid::make(double h, double k_max) {
    if (!(h > 0.0)) throw DimensionError("momentum spacing must be positive");
    MomentumGrid g;
    g.h = h;
    const Index m_max = static_cast<Index>(std::floor(k_max / h + 1e-9));
    if (m_max < g.m_min + 4) throw DimensionError("k_max leaves too few points outside the puncture");
    g.n = m_max - g.m_min + 1;
    return g;
}

double MomentumGrid::k(Index j) const {
    if (j < n) return -h * static_cast<double>(m_min + (n - 1 - j));
    return h * static_cast<double>(m_min + (j - n));
}

MomentumWavefunction MomentumWavefunction::from_function(const MomentumGrid& g,
                                                         const std::function<cplx(double)>& f, bool smooth) {
    MomentumWavefunction w;
    w.grid = g;
    w.samples.resize(g.size());
    for (Index j = 0; j < g.size(); ++j) w.samples(j) = f(g.k(j));
    w.smooth = smooth;
    w.refresh_flags();
    return w;
}

double MomentumWavefunction::puncture_ratio() const {
    const double s = std::sqrt(grid.k_min());
    return std::max(std::abs(samples(grid.pos(0))), std::abs(samples(grid.neg(0)))) / s;
}

void MomentumWavefunction::refresh_flags() { vanishing_at_zero = puncture_ratio() < puncture_threshold(); }

cplx momentum_inner(const MomentumWavefunction& a, const MomentumWavefunction& b) {
    if (a.samples.size() != b.samples.size()) throw DimensionError("momentum grids differ");
    return a.grid.h * a.samples.dot(b.samples);
}

namespace {

// d/dk on one half-line, uniform spacing h: central inside, second-order one-sided at the ends
Vec derivative(const Vec& f, double h) {
    const Index n = f.size();
    Vec d(n);
    for (Index i = 1; i + 1 < n; ++i) d(i) = (f(i + 1) - f(i - 1)) / (2.0 * h);
    d(0) = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    d(n - 1) = (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
    return d;
}

}  // namespace

MomentumWavefunction ab_momentum_apply(const MomentumWavefunction& psi) {
    if (!psi.vanishing_at_zero)
        throw DomainError("psi(k)/|k|^{1/2} does not vanish at the puncture: outside the operator domain");
    if (!psi.smooth) throw DomainError("probe is not flagged smooth");
    const MomentumGrid& g = psi.grid;
    MomentumWavefunction out = psi;
    // each half-line separately, ordered away from the puncture
    for (int side = 0; side < 2; ++side) {
        Vec f(g.n), k(g.n);
        for (Index i = 0; i < g.n; ++i) {
            const Index j = side == 0 ? g.pos(i) : g.neg(i);
            f(i) = psi.samples(j);
            k(i) = g.k(j);
        }
        // ordered by |k|, so the step in k is +h on the right and -h on the left
        const double step = side == 0 ? g.h : -g.h;
        const Vec fk = f.cwiseQuotient(k);
        const Vec d1 = derivative(fk, step), d2 = derivative(f, step);
        for (Index i = 0; i < g.n; ++i) {
            const Index j = side == 0 ? g.pos(i) : g.neg(i);
            out.samples(j) = 0.5 * kI * (d1(i) + d2(i) / k(i));
        }
    }
    out.refresh_flags();
    return out;
}

// ---------------------------------------------------------------- energy representation

double EnergyRepVector::norm() const {
    double s = 0.0;
    for (Index j = 0; j < lambda.size(); ++j) s += weight(j) * values.row(j).squaredNorm();
    return std::sqrt(s);
}

EnergyRepVector energy_rep(const MomentumWavefunction& psi) {
    const MomentumGrid& g = psi.grid;
    EnergyRepVector v;
    v.lambda.resize(g.n);
    v.weight.resize(g.n);
    v.values.resize(g.n, 2);
    for (Index i = 0; i < g.n; ++i) {
        const double k = g.k(g.pos(i));
        v.lambda(i) = 0.5 * k * k;
        v.weight(i) = k * g.h;
        const double s = 1.0 / std::sqrt(k);  // (2 lambda)^{-1/4}
        v.values(i, 0) = s * psi.samples(g.pos(i));
        v.values(i, 1) = s * psi.samples(g.neg(i));
    }
    return v;
}

MomentumWavefunction energy_rep_inverse(const EnergyRepVector& v, const MomentumGrid& g) {
    if (v.lambda.size() != g.n || v.values.rows() != g.n || v.values.cols() != 2)
        throw DimensionError("energy grid does not match the momentum grid");
    MomentumWavefunction w;
    w.grid = g;
    w.samples.resize(g.size());
    for (Index i = 0; i < g.n; ++i) {
        const double k = g.k(g.pos(i));
        if (std::abs(v.lambda(i) - 0.5 * k * k) > 1e-12 * std::max(1.0, v.lambda(i)))
            throw DimensionError("energy grid is not the image of the momentum grid");
        const double s = std::sqrt(k);
        w.samples(g.pos(i)) = s * v.values(i, 0);
        w.samples(g.neg(i)) = s * v.values(i, 1);
    }
    w.smooth = true;
    w.refresh_flags();
    return w;
}

double isometry_defect(const EnergyRepVector& v, double reference_norm) { return std::abs(v.norm() - reference_norm); }

// ---------------------------------------------------------------- Werner dilation

WernerDilation werner_dilation(double Lambda, Index n) {
    if (!(Lambda > 0.0)) throw DimensionError("Lambda must be positive");
    if (n < 4 || (n & (n - 1)) != 0) throw DimensionError("uniform energy grid needs N a power of two");
    WernerDilation w;
    const double h = 2.0 * Lambda / static_cast<double>(n);
    w.grid = GridDomain::line(n, h, -Lambda);
    const auto sq = schrodinger_couple(w.grid, 2);
    w.P_ext = sq.P;
    w.Q_ext = sq.Q;
    return w;
}

Index WernerDilation::zero_index() const { return grid.size() / 2; }

GridFunction WernerDilation::zero_extension(const std::function<std::array<cplx, 2>(double)>& f) const {
    Mat s = Mat::Zero(grid.size(), 2);
    for (Index j = zero_index() + 1; j < grid.size(); ++j) {
        const auto v = f(grid.coordinate(j));
        s(j, 0) = v[0];
        s(j, 1) = v[1];
    }
    return GridFunction(grid, std::move(s));
}

namespace {

cplx lagrange(const std::vector<double>& x, const Mat& y, Index c, Index lo, Index cnt, double at) {
    cplx acc = 0.0;
    for (Index a = lo; a < lo + cnt; ++a) {
        double l = 1.0;
        for (Index b = lo; b < lo + cnt; ++b)
            if (b != a) l *= (at - x[static_cast<std::size_t>(b)]) / (x[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(b)]);
        acc += l * y(a, c);
    }
    return acc;
}

}  // namespace

Embedding embed(const WernerDilation& w, const EnergyRepVector& v) {
    const Index m = v.lambda.size();
    if (m < 6) throw DimensionError("too few energy nodes to interpolate");
    std::vector<double> x(static_cast<std::size_t>(m + 1));
    Mat y(m + 1, 2);
    x[0] = 0.0;
    y.row(0).setZero();
    for (Index i = 0; i < m; ++i) {
        x[static_cast<std::size_t>(i + 1)] = v.lambda(i);
        y.row(i + 1) = v.values.row(i);
    }
    const Index nodes = m + 1;
    Embedding e{GridFunction(w.grid, Mat::Zero(w.grid.size(), 2)), 0.0};
    for (Index j = w.zero_index() + 1; j < w.grid.size(); ++j) {
        const double at = w.grid.coordinate(j);
        if (at > x.back()) break;
        const Index i = static_cast<Index>(std::upper_bound(x.begin(), x.end(), at) - x.begin()) - 1;
        const Index lo6 = std::clamp<Index>(i - 2, 0, nodes - 6);
        const Index lo4 = std::clamp<Index>(i - 1, 0, nodes - 4);
        for (Index c = 0; c < 2; ++c) {
            const cplx v6 = lagrange(x, y, c, lo6, 6, at);
            e.ext.samples(j, c) = v6;
            e.interpolation_error = std::max(e.interpolation_error, std::abs(v6 - lagrange(x, y, c, lo4, 4, at)));
        }
    }
    return e;
}

CompressionCheck compression_check(const WernerDilation& w, const std::function<cplx(double)>& f,
                                   const std::function<cplx(double)>& df, double edge) {
    const GridFunction ext = w.zero_extension([&](double l) { return std::array<cplx, 2>{f(l), f(l)}; });
    const Vec out = w.P_ext.apply(ext.flatten());
    CompressionCheck c;
    const double top = -w.grid.origin() - edge;
    for (Index j = w.zero_index() + 1; j < w.grid.size(); ++j) {
        const double l = w.grid.coordinate(j);
        if (l > top) break;
        const cplx want = -kI * df(l);
        for (Index ch = 0; ch < 2; ++ch) c.max_error = std::max(c.max_error, std::abs(out(2 * j + ch) - want));
        ++c.points;
    }
    return c;
}

// ---------------------------------------------------------------- arrival density

ArrivalDensity arrival_density_embedded(const GridFunction& ext) {
    const GridFunction t = fourier(ext, FourierDirection::forward);
    ArrivalDensity d;
    d.time_grid = t.domain;
    d.density.resize(t.points());
    for (Index j = 0; j < t.points(); ++j) d.density(j) = t.samples.row(j).squaredNorm();
    d.integral = d.time_grid.spacing() * d.density.sum();
    return d;
}

ArrivalDensity arrival_density(const MomentumWavefunction& psi, const WernerDilation& w) {
    const bool zero = psi.samples.cwiseAbs().maxCoeff() == 0.0;
    if (!zero && std::abs(psi.norm() - 1.0) > 1e-10) throw PreconditionError("wavefunction is not normalized");
    const Embedding e = embed(w, energy_rep(psi));
    ArrivalDensity d = arrival_density_embedded(e.ext);
    d.interpolation_error = e.interpolation_error;
    return d;
}

GridFunction phase_modulate(const GridFunction& ext, double t0) {
    GridFunction out = ext;
    for (Index j = 0; j < ext.points(); ++j) out.samples.row(j) *= std::polar(1.0, ext.domain.coordinate(j) * t0);
    return out;
}

CsvTable density_curve(const ArrivalDensity& d) {
    CsvTable t;
    t.header = {"t", "density"};
    for (Index j = 0; j < d.density.size(); ++j) t.add({d.time_grid.coordinate(j), d.density(j)});
    return t;
}

CsvTable energy_curve(const EnergyRepVector& v) {
    CsvTable t;
    t.header = {"lambda", "norm_sq"};
    for (Index j = 0; j < v.lambda.size(); ++j) t.add({v.lambda(j), v.values.row(j).squaredNorm()});
    return t;
}

}  // namespace tlab
