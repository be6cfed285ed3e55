#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "tlab/kernels.hpp"
#include "tlab/opcore.hpp"
#include "tlab/report.hpp"

namespace tlab {

struct SchrodingerCouple {
    OperatorRep P;  // -i d/dx, Fourier-spectral
    OperatorRep Q;  // multiplication by x
};
SchrodingerCouple schrodinger_couple(const GridDomain& line, Index channels = 1);
// F^{-1} diag(xi) F on a line grid
OperatorRep spectral_derivative(const GridDomain& line, Index channels = 1);

struct FiniteWeylPair {
    OperatorRep clock;  // diag(w^j)
    OperatorRep shift;  // e_j -> e_{j-1}, so that shift*clock = w*clock*shift
};
FiniteWeylPair finite_weyl_pair(Index N);
double finite_weyl_residual(const FiniteWeylPair& p, Exec exec = Exec::parallel);

// U_t = exp(itH) for Hermitian H, or translation g(x) -> g(x - t) on a line grid
class Evolution {
public:
    enum class Kind { generator, translation };

    static Evolution from_generator(const Mat& H);
    static Evolution translation(const GridDomain& line, Index channels = 1);

    Kind kind() const { return kind_; }
    Index dim() const;
    const GridDomain& grid() const { return grid_; }
    Index channels() const { return channels_; }
    bool aligned(double t) const;
    // grid steps of an aligned translation
    Index steps(double t) const;
    OperatorRep at(double t) const;

private:
    Kind kind_ = Kind::generator;
    Mat eigvecs_;
    RVec eigvals_;
    GridDomain grid_ = GridDomain::line(1, 1.0, 0.0);
    Index channels_ = 1;
};

struct WeylPairCandidate {
    Evolution evolution;
    OperatorRep T;
    Index domain_margin = 0;
};

enum class Relation { WWR, GWWR, WR, CCR };
const char* to_string(Relation r);

struct CommutationReport {
    Relation relation = Relation::WWR;
    std::vector<double> times;
    std::vector<std::pair<double, double>> parameters;  // (t, s) for WR
    Index probes = 0;
    std::vector<std::vector<double>> residuals;  // [probe or interval][time]
    std::vector<double> frobenius;                // dense WWR only, per time
    std::vector<double> lower_bound_witness;      // |trace| / sqrt(d), per time
    double max_residual = 0.0;
    double tol = 1e-9;
    bool pass = false;
    bool alignment_warning = false;
    std::optional<std::uint64_t> seed;
};
json to_json(const CommutationReport& r);
CsvTable residual_curve(const CommutationReport& r);

CommutationReport check_wwr(const WeylPairCandidate& cand, const std::vector<Vec>& probes,
                            const std::vector<double>& times, double tol = 1e-9);

// half-open [lo, hi)
struct Interval {
    double lo;
    double hi;
};
using IntervalSet = std::vector<Interval>;

CommutationReport check_gwwr(const WeylPairCandidate& cand, const std::vector<IntervalSet>& sets,
                             const std::vector<double>& times, double tol = 1e-9);

using Family = std::function<OperatorRep(double)>;
// max-abs of U(t) V(s) - exp(its) V(s) U(t)
CommutationReport check_weyl_relation(const Family& U, const Family& V,
                                      const std::vector<std::pair<double, double>>& ts, double tol = 1e-9);
// |(XY - YX - iI) psi| per probe
CommutationReport check_ccr(const OperatorRep& X, const OperatorRep& Y, const std::vector<Vec>& probes,
                            Index interior_margin = 0, double tol = 1e-9);

// s -> diag(exp(isj)) and t -> shift^t for the finite pair
Family clock_family(Index N);
Family shift_family(Index N);

struct NestedProjectionFamily {
    std::vector<double> times;
    // P_k projects onto the span of columns [first[k], flag.cols())
    Mat flag;
    std::vector<Index> first;
    bool coordinate_flag = false;
    double tol = 1e-10;

    static NestedProjectionFamily from_projections(const std::vector<double>& times, const std::vector<Mat>& P,
                                                   double tol = 1e-10);
    static NestedProjectionFamily from_flag(const std::vector<double>& times, const Mat& flag,
                                            const std::vector<Index>& first);
    static NestedProjectionFamily coordinate(const std::vector<double>& times);
    NestedProjectionFamily shifted(double dt) const;

    Index dim() const { return flag.rows(); }
    Mat projection(Index k) const;
    double monotonicity_defect() const;
};

struct TimeOperator {
    OperatorRep T = OperatorRep::dense(Mat(0, 0));
    NestedProjectionFamily family;
    RVec tau;  // value of T on each flag column
    OperatorRep companion(double s) const;
};

TimeOperator time_operator_from_projections(const NestedProjectionFamily& fam);

struct OutgoingReport {
    double invariance_defect = 0.0;
    bool invariant = false;
    Index intersection_dim = 0;
    Index union_codim = 0;
    Index depth = 0;
    Index band = 1;
    Index stationary_removed = 0;
    double tol = 1e-9;
    bool pass() const { return invariant && intersection_dim == 0 && union_codim == 0; }
};
json to_json(const OutgoingReport& r);

// `band` coordinates at each end of the index range are excluded from the invariance test
OutgoingReport verify_outgoing(const SubspaceBasis& Mp, const OperatorRep& U, Index depth, Index band = 1,
                               double tol = 1e-9);

struct TranslationRep {
    Mat G;  // column (n - n_lo) * k + i is U^n nu_i; the map is G^H
    SubspaceBasis fiber;
    Index k = 0, n_lo = 0, n_hi = 0;
    double orthonormality_defect = 0.0;
    double conjugation_residual = 0.0;
    double mplus_residual = 0.0;
    OutgoingReport outgoing;

    Vec to_coordinates(const Vec& psi) const { return G.adjoint() * psi; }
    // flag family P_n = span{U^m nu : m >= n} for the time operator
    NestedProjectionFamily projection_family() const;
};

TranslationRep sinai_translation_representation(const OperatorRep& U, const SubspaceBasis& Mp, Index depth,
                                                Index band = 1, double tol = 1e-9);

struct SpectralRep {
    Index L = 0, k = 0, n_lo = 0;
    Mat G;
    double phase_residual = 0.0;
    double derivative_residual = 0.0;
    double hardy_residual = 0.0;
    double roundtrip_residual = 0.0;

    // L x k circle samples of psi
    Mat to_samples(const Vec& psi) const;
    Vec from_samples(const Mat& f) const;
    // -i d/dtheta on samples
    Mat derivative(const Mat& f) const;
    Index signed_index(Index idx) const;
};

SpectralRep spectral_representation(const TranslationRep& tr, const OperatorRep& U, const SubspaceBasis& Mp,
                                    std::uint64_t seed = 1);

}  // namespace tlab
