#pragma once

#include <array>
#include <functional>
#include <vector>

#include "tlab/opcore.hpp"
#include "tlab/report.hpp"

namespace tlab {

// k_m = m h for |m| in [4, m_max]; the puncture (-4h, 4h) is excluded.
// Layout: negative side ascending, then positive side ascending, n points each.
struct MomentumGrid {
    double h = 0.01;
    Index m_min = 4;
    Index n = 0;  // points per side

    static MomentumGrid make(double h, double k_max);
    Index size() const { return 2 * n; }
    double k_min() const { return static_cast<double>(m_min) * h; }
    double k(Index j) const;
    // index of +k_m / -k_m for m = m_min + i
    Index pos(Index i) const { return n + i; }
    Index neg(Index i) const { return n - 1 - i; }
};

struct MomentumWavefunction {
    MomentumGrid grid;
    Vec samples;
    bool vanishing_at_zero = false;
    bool smooth = false;

    static MomentumWavefunction from_function(const MomentumGrid& g, const std::function<cplx(double)>& f,
                                              bool smooth = true);
    // |psi(k)| / |k|^{1/2} at the innermost points
    double puncture_ratio() const;
    double puncture_threshold() const { return 10.0 * std::sqrt(grid.h); }
    double norm() const { return std::sqrt(grid.h) * samples.norm(); }
    void refresh_flags();
};

MomentumWavefunction ab_momentum_apply(const MomentumWavefunction& psi);
// h-weighted inner product on the momentum grid
cplx momentum_inner(const MomentumWavefunction& a, const MomentumWavefunction& b);

// channels (+sqrt(2 lambda), -sqrt(2 lambda)); weights k_j h
struct EnergyRepVector {
    RVec lambda;
    RVec weight;
    Mat values;  // n x 2

    double norm() const;
};

EnergyRepVector energy_rep(const MomentumWavefunction& psi);
MomentumWavefunction energy_rep_inverse(const EnergyRepVector& v, const MomentumGrid& g);
// |norm(v) - reference|
double isometry_defect(const EnergyRepVector& v, double reference_norm);

// -i d/d lambda on the uniform doubled line [-Lambda, Lambda), two channels
struct WernerDilation {
    GridDomain grid = GridDomain::line(2, 1.0, 0.0);
    OperatorRep P_ext = OperatorRep::identity(1);
    OperatorRep Q_ext = OperatorRep::identity(1);

    // zero extension to lambda < 0 of a two-channel function given for lambda > 0
    GridFunction zero_extension(const std::function<std::array<cplx, 2>(double)>& f) const;
    Index zero_index() const;
};

WernerDilation werner_dilation(double Lambda, Index n);

struct Embedding {
    GridFunction ext;
    double interpolation_error = 0.0;  // 6-point against 4-point interpolant
};
// 6-point Lagrange interpolation of the energy representation onto the uniform grid, with
// the node (0, 0) added; zero beyond the last lambda
Embedding embed(const WernerDilation& w, const EnergyRepVector& v);

// embed^H P_ext embed against -i f' at lambda in (0, Lambda - edge]
struct CompressionCheck {
    double max_error = 0.0;
    Index points = 0;
};
CompressionCheck compression_check(const WernerDilation& w, const std::function<cplx(double)>& f,
                                   const std::function<cplx(double)>& df, double edge);

struct ArrivalDensity {
    GridDomain time_grid = GridDomain::line(2, 1.0, 0.0);
    RVec density;
    double integral = 0.0;
    double interpolation_error = 0.0;
};

ArrivalDensity arrival_density(const MomentumWavefunction& psi, const WernerDilation& w);
ArrivalDensity arrival_density_embedded(const GridFunction& ext);
// multiplies the extended energy representation by exp(i lambda t0)
GridFunction phase_modulate(const GridFunction& ext, double t0);

CsvTable density_curve(const ArrivalDensity& d);
CsvTable energy_curve(const EnergyRepVector& v);

}  // namespace tlab
