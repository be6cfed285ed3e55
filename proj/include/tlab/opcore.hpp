#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace tlab {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// error hierarchy; every failure in the library is one of these
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct SpectrumError : Error {  // singular resolvent, 1 in the spectrum, point outside A_W
    using Error::Error;
};
struct ContractionError : Error {
    using Error::Error;
};
struct MarginError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct PreconditionError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------- grids

// exp(2 pi i j / n)
cplx root_of_unity(Index j, Index n);

class GridDomain {
public:
    enum class Kind { circle, line, coefficients };

    static GridDomain circle(Index n);
    static GridDomain line(Index n, double h, double x0);
    // line grid whose Fourier dual starts at dual_origin instead of -floor(n/2)*dxi
    static GridDomain line(Index n, double h, double x0, double dual_origin);
    static GridDomain coefficients(Index n);

    Kind kind() const { return kind_; }
    Index size() const { return n_; }
    double spacing() const { return h_; }
    double origin() const { return x0_; }
    double dual_origin() const { return xi0_; }

    double coordinate(Index j) const { return x0_ + h_ * static_cast<double>(j); }
    cplx circle_point(Index j) const;
    double default_weight() const;

    bool operator==(const GridDomain& o) const;

private:
    Kind kind_ = Kind::circle;
    Index n_ = 1;
    double h_ = 1.0;
    double x0_ = 0.0;
    double xi0_ = 0.0;
};

// samples(j, c): point j, channel c
struct GridFunction {
    GridDomain domain;
    Mat samples;
    Index boundary_margin = 0;

    GridFunction(GridDomain dom, Mat s, Index margin = 0);
    static GridFunction from_function(const GridDomain& dom, const std::function<cplx(double)>& f,
                                      Index margin = 0);

    Index points() const { return samples.rows(); }
    Index channels() const { return samples.cols(); }

    double norm() const { return norm(domain.default_weight()); }
    double norm(double weight) const;

    // point-major flattening, index j*d + c
    Vec flatten() const;
    static GridFunction unflatten(const GridDomain& dom, const Vec& v, Index channels, Index margin = 0);
};

enum class FourierDirection { forward, inverse };

GridFunction fourier(const GridFunction& gf, FourierDirection dir);
GridDomain fourier_output_domain(const GridDomain& dom, FourierDirection dir);

// ---------------------------------------------------------------- subspaces

struct SubspaceBasis {
    Mat columns;
    double tol = 1e-10;

    SubspaceBasis() = default;
    SubspaceBasis(Mat c, double t) : columns(std::move(c)), tol(t) {}
    static SubspaceBasis empty(Index dim, double tol = 1e-10);

    Index dim() const { return columns.rows(); }
    Index rank() const { return columns.cols(); }
    Mat projector() const { return columns * columns.adjoint(); }
    double orthonormality_defect() const;
};

SubspaceBasis orthonormalize(const Mat& vectors, double tol = 1e-10);
SubspaceBasis orthonormalize(const std::vector<Vec>& vectors, double tol = 1e-10);
Vec project(const SubspaceBasis& b, const Vec& v);

// principal angles, ascending; computed from sines for small-angle accuracy
std::vector<double> principal_angles(const SubspaceBasis& a, const SubspaceBasis& b);
// largest distance from a unit vector of `inner` to `outer`
double containment_defect(const SubspaceBasis& outer, const SubspaceBasis& inner);
bool contains(const SubspaceBasis& outer, const SubspaceBasis& inner, double tol);

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b, double tol = 1e-8);
// two-projection alternating method, fixed iteration cap
SubspaceBasis intersect_alternating(const SubspaceBasis& a, const SubspaceBasis& b, double tol = 1e-8,
                                    int iterations = 50);
SubspaceBasis span_sum(const SubspaceBasis& a, const SubspaceBasis& b, double tol = 1e-10);
// a ⊖ b: the part of a orthogonal to b
SubspaceBasis orth_difference(const SubspaceBasis& a, const SubspaceBasis& b, double tol = 1e-10);
SubspaceBasis orth_complement(const SubspaceBasis& a);
SubspaceBasis coordinate_subspace(Index dim, const std::vector<Index>& coords, double tol = 1e-10);
SubspaceBasis restrict_to_coordinates(const SubspaceBasis& a, const std::vector<Index>& coords,
                                      double tol = 1e-8);

// ---------------------------------------------------------------- range functions

struct RangeFunction {
    GridDomain grid;
    std::vector<Mat> projections;
    double tol = 1e-8;

    Index fiber_dim() const { return projections.empty() ? 0 : projections.front().rows(); }
    Index rank_at(Index j) const;
    std::vector<Index> ranks() const;
    double hermitian_defect() const;
    double idempotent_defect() const;
    bool is_constant_full() const;
};

struct RangeFunctionDiff {
    std::vector<double> per_point;  // max-abs of J1(w_j) - J2(w_j)
    std::vector<Index> differing_points;
};
RangeFunctionDiff range_function_diff(const RangeFunction& a, const RangeFunction& b, double tol = 1e-8);

// ---------------------------------------------------------------- operators

class OperatorRep {
public:
    struct Dense {
        Mat m;
    };
    // e_j -> e_{j+power mod n}, applied blockwise to `channels` interleaved channels
    struct CyclicShift {
        Index n;
        Index power;
        Index channels = 1;
    };
    // e_j -> e_{j+1}, e_{n-1} -> 0
    struct TruncShiftFwd {
        Index n;
    };
    // e_j -> e_{j-1}, e_0 -> 0
    struct TruncShiftBwd {
        Index n;
    };
    // pointwise d x d symbols on a grid, point-major layout
    struct MulSymbol {
        std::vector<Mat> symbol;
    };
    // `domain` is the input grid; scale multiplies the output
    struct FourierOp {
        GridDomain domain;
        FourierDirection dir;
        Index channels = 1;
        double scale = 1.0;
    };
    struct Sum {
        std::vector<OperatorRep> terms;
    };
    // factors applied right to left: factors[0] * factors[1] * ...
    struct Compose {
        std::vector<OperatorRep> factors;
    };
    using Variant = std::variant<Dense, CyclicShift, TruncShiftFwd, TruncShiftBwd, MulSymbol, FourierOp, Sum,
                                 Compose>;

    OperatorRep(Variant v, Index boundary_radius = 0);

    static OperatorRep dense(Mat m);
    static OperatorRep identity(Index n);
    static OperatorRep cyclic_shift(Index n, Index power, Index channels = 1);
    static OperatorRep trunc_shift_fwd(Index n);
    static OperatorRep trunc_shift_bwd(Index n);
    static OperatorRep diagonal(const Vec& d);
    static OperatorRep mul_symbol(std::vector<Mat> symbol);
    static OperatorRep fourier_op(const GridDomain& dom, FourierDirection dir, Index channels = 1);
    static OperatorRep sum(std::vector<OperatorRep> terms);
    static OperatorRep compose(std::vector<OperatorRep> factors);

    const Variant& variant() const { return v_; }
    Index dim() const;
    Index boundary_radius() const { return radius_; }
    bool is_dense() const { return std::holds_alternative<Dense>(v_); }

    Vec apply(const Vec& x) const;
    Vec apply_adjoint(const Vec& x) const;
    Mat apply_columns(const Mat& x) const;
    Mat apply_adjoint_columns(const Mat& x) const;
    OperatorRep adjoint() const;
    Mat to_dense() const;

private:
    Variant v_;
    Index radius_ = 0;
};

double op_norm(const Mat& m);
double max_abs(const Mat& m);
Mat hermitian_sqrt_psd(const Mat& m, double clip_lo = 0.0, double clip_hi = 1.0);

}  // namespace tlab
