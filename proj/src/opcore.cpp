#include "tlab/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/FFT>

#include "tlab/kernels.hpp"

namespace tlab {

// ---------------------------------------------------------------- grids

GridDomain GridDomain::circle(Index n) {
    if (n < 1) throw DimensionError("circle grid needs N >= 1");
    GridDomain g;
    g.kind_ = Kind::circle;
    g.n_ = n;
    g.h_ = 2.0 * kPi / static_cast<double>(n);
    return g;
}

GridDomain GridDomain::line(Index n, double h, double x0) {
    const double dxi = 2.0 * kPi / (static_cast<double>(n) * h);
    return line(n, h, x0, -static_cast<double>(n / 2) * dxi);
}

GridDomain GridDomain::line(Index n, double h, double x0, double dual_origin) {
    if (n < 1) throw DimensionError("line grid needs N >= 1");
    if (!(h > 0.0)) throw DimensionError("line grid needs h > 0");
    GridDomain g;
    g.kind_ = Kind::line;
    g.n_ = n;
    g.h_ = h;
    g.x0_ = x0;
    g.xi0_ = dual_origin;
    return g;
}

GridDomain GridDomain::coefficients(Index n) {
    if (n < 1) throw DimensionError("coefficient grid needs N >= 1");
    GridDomain g;
    g.kind_ = Kind::coefficients;
    g.n_ = n;
    return g;
}

cplx root_of_unity(Index j, Index n) {
    Index r = j % n;
    if (r < 0) r += n;
    // quarter turns are returned exactly
    if ((4 * r) % n == 0) {
        switch ((4 * r) / n) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    return std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(n));
}

cplx GridDomain::circle_point(Index j) const { return root_of_unity(j, n_); }

double GridDomain::default_weight() const {
    switch (kind_) {
        case Kind::circle: return 1.0 / static_cast<double>(n_);
        case Kind::coefficients: return 1.0;
        case Kind::line: return h_;
    }
    return 1.0;
}

bool GridDomain::operator==(const GridDomain& o) const {
    return kind_ == o.kind_ && n_ == o.n_ && h_ == o.h_ && x0_ == o.x0_ && xi0_ == o.xi0_;
}

GridFunction::GridFunction(GridDomain dom, Mat s, Index margin)
    : domain(std::move(dom)), samples(std::move(s)), boundary_margin(margin) {
    if (samples.rows() != domain.size()) throw DimensionError("sample count does not match grid size");
    if (samples.cols() < 1) throw DimensionError("grid function needs at least one channel");
}

GridFunction GridFunction::from_function(const GridDomain& dom, const std::function<cplx(double)>& f,
                                         Index margin) {
    Mat s(dom.size(), 1);
    for (Index j = 0; j < dom.size(); ++j) s(j, 0) = f(dom.coordinate(j));
    return GridFunction(dom, std::move(s), margin);
}

double GridFunction::norm(double weight) const {
    return std::sqrt(weight * samples.squaredNorm());
}

Vec GridFunction::flatten() const {
    const Index n = points(), d = channels();
    Vec v(n * d);
    for (Index j = 0; j < n; ++j)
        for (Index c = 0; c < d; ++c) v(j * d + c) = samples(j, c);
    return v;
}

GridFunction GridFunction::unflatten(const GridDomain& dom, const Vec& v, Index channels, Index margin) {
    if (channels < 1 || v.size() != dom.size() * channels)
        throw DimensionError("flattened length does not match grid and channels");
    Mat s(dom.size(), channels);
    for (Index j = 0; j < dom.size(); ++j)
        for (Index c = 0; c < channels; ++c) s(j, c) = v(j * channels + c);
    return GridFunction(dom, std::move(s), margin);
}

GridDomain fourier_output_domain(const GridDomain& dom, FourierDirection dir) {
    const Index n = dom.size();
    switch (dom.kind()) {
        case GridDomain::Kind::circle:
            if (dir != FourierDirection::forward) throw DimensionError("circle samples only transform forward");
            return GridDomain::coefficients(n);
        case GridDomain::Kind::coefficients:
            if (dir != FourierDirection::inverse) throw DimensionError("coefficients only transform inverse");
            return GridDomain::circle(n);
        case GridDomain::Kind::line: {
            const double dual_h = 2.0 * kPi / (static_cast<double>(n) * dom.spacing());
            return GridDomain::line(n, dual_h, dom.dual_origin(), dom.origin());
        }
    }
    throw DimensionError("unknown grid kind");
}

namespace {

Vec fft_column(const Vec& x, bool forward) {
    if (x.size() == 1) return x;  // Eigen's backend faults on length 1
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    Vec out(x.size());
    if (forward)
        fft.fwd(out, x);
    else
        fft.inv(out, x);
    return out;
}

}  // namespace

// Line convention: fhat(xi_k) = h/sqrt(2 pi) sum_j f(x_j) exp(-i xi_k x_j), xi_k = xi0 + k dxi.
// With these weights the transform is unitary between h- and dxi-weighted norms.
GridFunction fourier(const GridFunction& gf, FourierDirection dir) {
    const GridDomain& dom = gf.domain;
    const GridDomain out_dom = fourier_output_domain(dom, dir);
    const Index n = dom.size();
    const double nd = static_cast<double>(n);
    Mat out(n, gf.channels());

    for (Index c = 0; c < gf.channels(); ++c) {
        Vec col = gf.samples.col(c);
        if (dom.kind() == GridDomain::Kind::circle) {
            out.col(c) = fft_column(col, true) / nd;
        } else if (dom.kind() == GridDomain::Kind::coefficients) {
            out.col(c) = fft_column(col, false);
        } else {
            const double h = dom.spacing(), x0 = dom.origin(), xi0 = dom.dual_origin();
            const double dxi = out_dom.spacing();
            const double sgn = dir == FourierDirection::forward ? -1.0 : 1.0;
            for (Index j = 0; j < n; ++j) col(j) *= std::polar(1.0, sgn * xi0 * h * static_cast<double>(j));
            Vec g = fft_column(col, dir == FourierDirection::forward);
            const cplx pre = std::polar(h / std::sqrt(2.0 * kPi), sgn * xi0 * x0);
            for (Index k = 0; k < n; ++k)
                out(k, c) = pre * std::polar(1.0, sgn * static_cast<double>(k) * dxi * x0) * g(k);
        }
    }
    return GridFunction(out_dom, std::move(out), 0);
}

// ---------------------------------------------------------------- subspaces

SubspaceBasis SubspaceBasis::empty(Index dim, double tol) { return SubspaceBasis(Mat(dim, 0), tol); }

double SubspaceBasis::orthonormality_defect() const {
    if (rank() == 0) return 0.0;
    return max_abs(columns.adjoint() * columns - Mat::Identity(rank(), rank()));
}

namespace {

// Eigen 3.4.0 BDCSVD occasionally returns non-finite factors for small complex inputs
struct Svd {
    RVec s;
    Mat u, v;
};

Svd checked_svd(const Mat& x, unsigned int opts) {
    {
        Eigen::BDCSVD<Mat> svd(x, opts);
        Svd out{svd.singularValues(), svd.computeU() ? svd.matrixU() : Mat(), svd.computeV() ? svd.matrixV() : Mat()};
        if (out.s.allFinite() && out.u.allFinite() && out.v.allFinite()) return out;
    }
    Eigen::JacobiSVD<Mat> svd(x, opts);
    return {svd.singularValues(), svd.computeU() ? svd.matrixU() : Mat(), svd.computeV() ? svd.matrixV() : Mat()};
}

// keeps left singular vectors whose singular value exceeds `cutoff`
SubspaceBasis range_basis(const Mat& x, double cutoff, double tol) {
    if (x.cols() == 0 || x.rows() == 0) return SubspaceBasis::empty(x.rows(), tol);
    const Svd svd = checked_svd(x, Eigen::ComputeThinU);
    Index r = 0;
    while (r < svd.s.size() && svd.s(r) > cutoff) ++r;
    return SubspaceBasis(svd.u.leftCols(r), tol);
}

}  // namespace

SubspaceBasis orthonormalize(const Mat& vectors, double tol) {
    if (vectors.cols() == 0) return SubspaceBasis::empty(vectors.rows(), tol);
    const Svd svd = checked_svd(vectors, Eigen::ComputeThinU);
    const RVec& s = svd.s;
    if (s.size() == 0 || s(0) == 0.0) return SubspaceBasis::empty(vectors.rows(), tol);
    const double cutoff = tol * s(0);
    Index r = 0;
    while (r < s.size() && s(r) > cutoff) ++r;
    return SubspaceBasis(svd.u.leftCols(r), tol);
}

SubspaceBasis orthonormalize(const std::vector<Vec>& vectors, double tol) {
    if (vectors.empty()) return SubspaceBasis::empty(0, tol);
    Mat m(vectors.front().size(), static_cast<Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != m.rows()) throw DimensionError("orthonormalize: vectors differ in dimension");
        m.col(static_cast<Index>(i)) = vectors[i];
    }
    return orthonormalize(m, tol);
}

Vec project(const SubspaceBasis& b, const Vec& v) {
    if (v.size() != b.dim()) throw DimensionError("project: dimension mismatch");
    if (b.rank() == 0) return Vec::Zero(v.size());
    return b.columns * (b.columns.adjoint() * v);
}

namespace {

void require_same_dim(const SubspaceBasis& a, const SubspaceBasis& b, const char* what) {
    if (a.dim() != b.dim()) throw DimensionError(std::string(what) + ": ambient dimensions differ");
}

// rotated basis of a aligned with b, plus the sine of each principal direction
struct AlignedBasis {
    Mat x;
    std::vector<double> sines;
    std::vector<double> cosines;
};

AlignedBasis align(const SubspaceBasis& a, const SubspaceBasis& b) {
    AlignedBasis out;
    const Index ra = a.rank();
    if (ra == 0) {
        out.x = Mat(a.dim(), 0);
        return out;
    }
    Mat u;
    RVec sv = RVec::Zero(ra);
    if (b.rank() == 0) {
        u = Mat::Identity(ra, ra);
    } else {
        Mat m = a.columns.adjoint() * b.columns;
        const Svd svd = checked_svd(m, Eigen::ComputeFullU);
        u = svd.u;
        sv.head(svd.s.size()) = svd.s;
    }
    out.x = a.columns * u;
    Mat resid = out.x;
    if (b.rank() > 0) resid -= b.columns * (b.columns.adjoint() * out.x);
    for (Index i = 0; i < ra; ++i) {
        out.sines.push_back(resid.col(i).norm());
        out.cosines.push_back(sv(i));
    }
    return out;
}

}  // namespace

std::vector<double> principal_angles(const SubspaceBasis& a, const SubspaceBasis& b) {
    require_same_dim(a, b, "principal_angles");
    const bool swap = a.rank() > b.rank();
    const SubspaceBasis& small = swap ? b : a;
    const SubspaceBasis& large = swap ? a : b;
    AlignedBasis al = align(small, large);
    std::vector<double> out;
    for (std::size_t i = 0; i < al.sines.size(); ++i) out.push_back(std::atan2(al.sines[i], al.cosines[i]));
    std::sort(out.begin(), out.end());
    return out;
}

double containment_defect(const SubspaceBasis& outer, const SubspaceBasis& inner) {
    require_same_dim(outer, inner, "containment_defect");
    if (inner.rank() == 0) return 0.0;
    Mat r = inner.columns;
    if (outer.rank() > 0) r -= outer.columns * (outer.columns.adjoint() * inner.columns);
    Eigen::SelfAdjointEigenSolver<Mat> es(r.adjoint() * r, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

bool contains(const SubspaceBasis& outer, const SubspaceBasis& inner, double tol) {
    return containment_defect(outer, inner) <= tol;
}

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b, double tol) {
    require_same_dim(a, b, "intersect");
    if (a.rank() == 0 || b.rank() == 0) return SubspaceBasis::empty(a.dim(), tol);
    AlignedBasis al = align(a, b);
    std::vector<Index> keep;
    for (std::size_t i = 0; i < al.sines.size(); ++i)
        if (al.sines[i] <= tol) keep.push_back(static_cast<Index>(i));
    Mat x(a.dim(), static_cast<Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) x.col(static_cast<Index>(i)) = al.x.col(keep[i]);
    return range_basis(x, 0.5, tol);
}

SubspaceBasis intersect_alternating(const SubspaceBasis& a, const SubspaceBasis& b, double tol, int iterations) {
    require_same_dim(a, b, "intersect_alternating");
    if (a.rank() == 0 || b.rank() == 0) return SubspaceBasis::empty(a.dim(), tol);
    Mat x = a.columns;
    for (int it = 0; it < iterations; ++it) {
        x = b.columns * (b.columns.adjoint() * x);
        x = a.columns * (a.columns.adjoint() * x);
    }
    // intersection directions keep unit length; all others shrink like cos^(2*iterations)
    return range_basis(x, 0.5, tol);
}

SubspaceBasis span_sum(const SubspaceBasis& a, const SubspaceBasis& b, double tol) {
    require_same_dim(a, b, "span_sum");
    Mat x(a.dim(), a.rank() + b.rank());
    x << a.columns, b.columns;
    return range_basis(x, tol, tol);
}

SubspaceBasis orth_difference(const SubspaceBasis& a, const SubspaceBasis& b, double tol) {
    require_same_dim(a, b, "orth_difference");
    if (a.rank() == 0) return a;
    Mat x = a.columns;
    if (b.rank() > 0) x -= b.columns * (b.columns.adjoint() * a.columns);
    // a is orthonormal, so the singular values of x lie in [0, 1] and an absolute cutoff is meaningful
    return range_basis(x, std::sqrt(tol), tol);
}

SubspaceBasis orth_complement(const SubspaceBasis& a) {
    const Index n = a.dim(), r = a.rank();
    if (r == 0) return SubspaceBasis(Mat::Identity(n, n), a.tol);
    Eigen::HouseholderQR<Mat> qr(a.columns);
    Mat q = qr.householderQ() * Mat::Identity(n, n);
    return SubspaceBasis(q.rightCols(n - r), a.tol);
}

SubspaceBasis coordinate_subspace(Index dim, const std::vector<Index>& coords, double tol) {
    Mat x = Mat::Zero(dim, static_cast<Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= dim) throw DimensionError("coordinate out of range");
        x(coords[i], static_cast<Index>(i)) = 1.0;
    }
    return SubspaceBasis(std::move(x), tol);
}

SubspaceBasis restrict_to_coordinates(const SubspaceBasis& a, const std::vector<Index>& coords, double tol) {
    const Index n = a.dim(), r = a.rank();
    if (r == 0) return a;
    std::vector<bool> inside(static_cast<std::size_t>(n), false);
    for (Index c : coords) inside[static_cast<std::size_t>(c)] = true;
    std::vector<Index> outside;
    for (Index i = 0; i < n; ++i)
        if (!inside[static_cast<std::size_t>(i)]) outside.push_back(i);
    if (outside.empty()) return a;
    Mat rows(static_cast<Index>(outside.size()), r);
    for (std::size_t i = 0; i < outside.size(); ++i) rows.row(static_cast<Index>(i)) = a.columns.row(outside[i]);
    // null space of the rows that must vanish
    const Svd svd = checked_svd(rows, Eigen::ComputeFullV);
    const RVec& s = svd.s;
    std::vector<Index> null_cols;
    for (Index i = 0; i < r; ++i)
        if (i >= s.size() || s(i) <= tol) null_cols.push_back(i);
    Mat x(n, static_cast<Index>(null_cols.size()));
    for (std::size_t i = 0; i < null_cols.size(); ++i)
        x.col(static_cast<Index>(i)) = a.columns * svd.v.col(null_cols[i]);
    for (Index i : outside) x.row(i).setZero();
    return range_basis(x, 0.5, a.tol);
}

// ---------------------------------------------------------------- range functions

Index RangeFunction::rank_at(Index j) const {
    const Mat& p = projections.at(static_cast<std::size_t>(j));
    if (p.rows() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (p + p.adjoint()), Eigen::EigenvaluesOnly);
    return (es.eigenvalues().array() > 0.5).count();
}

std::vector<Index> RangeFunction::ranks() const {
    std::vector<Index> out;
    for (std::size_t j = 0; j < projections.size(); ++j) out.push_back(rank_at(static_cast<Index>(j)));
    return out;
}

double RangeFunction::hermitian_defect() const {
    double m = 0.0;
    for (const Mat& p : projections)
        if (p.size()) m = std::max(m, max_abs(p - p.adjoint()));
    return m;
}

double RangeFunction::idempotent_defect() const {
    double m = 0.0;
    for (const Mat& p : projections)
        if (p.size()) m = std::max(m, max_abs(p * p - p));
    return m;
}

bool RangeFunction::is_constant_full() const {
    for (const Mat& p : projections)
        if (max_abs(p - Mat::Identity(p.rows(), p.cols())) > tol) return false;
    return true;
}

RangeFunctionDiff range_function_diff(const RangeFunction& a, const RangeFunction& b, double tol) {
    if (a.projections.size() != b.projections.size() || a.fiber_dim() != b.fiber_dim())
        throw DimensionError("range functions live on different grids or fibers");
    RangeFunctionDiff d;
    for (std::size_t j = 0; j < a.projections.size(); ++j) {
        const double v = a.projections[j].size() ? max_abs(a.projections[j] - b.projections[j]) : 0.0;
        d.per_point.push_back(v);
        if (v > tol) d.differing_points.push_back(static_cast<Index>(j));
    }
    return d;
}

// ---------------------------------------------------------------- operators

namespace {

Index child_radius(const std::vector<OperatorRep>& v) {
    Index r = 0;
    for (const auto& c : v) r += c.boundary_radius();
    return r;
}

}  // namespace

OperatorRep::OperatorRep(Variant v, Index boundary_radius) : v_(std::move(v)), radius_(boundary_radius) {}

OperatorRep OperatorRep::dense(Mat m) {
    if (m.rows() != m.cols()) throw DimensionError("dense operator must be square");
    return OperatorRep(Dense{std::move(m)});
}
OperatorRep OperatorRep::identity(Index n) { return cyclic_shift(n, 0); }
OperatorRep OperatorRep::cyclic_shift(Index n, Index power, Index channels) {
    if (n < 1 || channels < 1) throw DimensionError("cyclic shift needs n, channels >= 1");
    return OperatorRep(CyclicShift{n, power, channels});
}
OperatorRep OperatorRep::trunc_shift_fwd(Index n) { return OperatorRep(TruncShiftFwd{n}, 1); }
OperatorRep OperatorRep::trunc_shift_bwd(Index n) { return OperatorRep(TruncShiftBwd{n}, 1); }
OperatorRep OperatorRep::diagonal(const Vec& d) {
    std::vector<Mat> s(static_cast<std::size_t>(d.size()));
    for (Index j = 0; j < d.size(); ++j) s[static_cast<std::size_t>(j)] = Mat::Constant(1, 1, d(j));
    return OperatorRep(MulSymbol{std::move(s)});
}
OperatorRep OperatorRep::mul_symbol(std::vector<Mat> symbol) {
    for (const Mat& m : symbol)
        if (m.rows() != m.cols() || m.rows() != symbol.front().rows())
            throw DimensionError("symbol values must be square and of one size");
    return OperatorRep(MulSymbol{std::move(symbol)});
}
OperatorRep OperatorRep::fourier_op(const GridDomain& dom, FourierDirection dir, Index channels) {
    fourier_output_domain(dom, dir);  // validates direction
    return OperatorRep(FourierOp{dom, dir, channels, 1.0});
}
OperatorRep OperatorRep::sum(std::vector<OperatorRep> terms) {
    if (terms.empty()) throw DimensionError("empty sum");
    for (const auto& t : terms)
        if (t.dim() != terms.front().dim()) throw DimensionError("sum terms differ in dimension");
    const Index r = child_radius(terms);
    return OperatorRep(Sum{std::move(terms)}, r);
}
OperatorRep OperatorRep::compose(std::vector<OperatorRep> factors) {
    if (factors.empty()) throw DimensionError("empty composition");
    for (const auto& f : factors)
        if (f.dim() != factors.front().dim()) throw DimensionError("composition factors differ in dimension");
    const Index r = child_radius(factors);
    return OperatorRep(Compose{std::move(factors)}, r);
}

Index OperatorRep::dim() const {
    return std::visit(
        [](const auto& x) -> Index {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Dense>) return x.m.rows();
            else if constexpr (std::is_same_v<T, CyclicShift>) return x.n * x.channels;
            else if constexpr (std::is_same_v<T, TruncShiftFwd> || std::is_same_v<T, TruncShiftBwd>) return x.n;
            else if constexpr (std::is_same_v<T, MulSymbol>) {
                Index s = 0;
                for (const Mat& m : x.symbol) s += m.rows();
                return s;
            } else if constexpr (std::is_same_v<T, FourierOp>) return x.domain.size() * x.channels;
            else if constexpr (std::is_same_v<T, Sum>) return x.terms.front().dim();
            else return x.factors.front().dim();
        },
        v_);
}

namespace {

Index wrap(Index j, Index n) {
    Index r = j % n;
    return r < 0 ? r + n : r;
}

Vec apply_fourier(const OperatorRep::FourierOp& f, const Vec& x) {
    GridFunction g = GridFunction::unflatten(f.domain, x, f.channels);
    Vec y = fourier(g, f.dir).flatten();
    if (f.scale != 1.0) y *= f.scale;
    return y;
}

OperatorRep::FourierOp fourier_adjoint(const OperatorRep::FourierOp& f) {
    const GridDomain out = fourier_output_domain(f.domain, f.dir);
    const FourierDirection back =
        f.dir == FourierDirection::forward ? FourierDirection::inverse : FourierDirection::forward;
    // plain Euclidean adjoint of the transform matrix, as a multiple of the reverse transform
    double s = 1.0;
    switch (f.domain.kind()) {
        case GridDomain::Kind::circle: s = 1.0 / static_cast<double>(f.domain.size()); break;
        case GridDomain::Kind::coefficients: s = static_cast<double>(f.domain.size()); break;
        case GridDomain::Kind::line: s = f.domain.spacing() / out.spacing(); break;
    }
    return OperatorRep::FourierOp{out, back, f.channels, s * f.scale};
}

}  // namespace

Vec OperatorRep::apply(const Vec& x) const {
    if (x.size() != dim()) throw DimensionError("operator applied to vector of wrong length");
    return std::visit(
        [&](const auto& op) -> Vec {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Dense>) {
                return op.m * x;
            } else if constexpr (std::is_same_v<T, CyclicShift>) {
                Vec y(x.size());
                for (Index j = 0; j < op.n; ++j)
                    for (Index c = 0; c < op.channels; ++c)
                        y(wrap(j + op.power, op.n) * op.channels + c) = x(j * op.channels + c);
                return y;
            } else if constexpr (std::is_same_v<T, TruncShiftFwd>) {
                Vec y = Vec::Zero(x.size());
                for (Index j = 0; j + 1 < op.n; ++j) y(j + 1) = x(j);
                return y;
            } else if constexpr (std::is_same_v<T, TruncShiftBwd>) {
                Vec y = Vec::Zero(x.size());
                for (Index j = 1; j < op.n; ++j) y(j - 1) = x(j);
                return y;
            } else if constexpr (std::is_same_v<T, MulSymbol>) {
                Vec y(x.size());
                Index off = 0;
                for (const Mat& s : op.symbol) {
                    y.segment(off, s.rows()) = s * x.segment(off, s.cols());
                    off += s.rows();
                }
                return y;
            } else if constexpr (std::is_same_v<T, FourierOp>) {
                return apply_fourier(op, x);
            } else if constexpr (std::is_same_v<T, Sum>) {
                Vec y = op.terms.front().apply(x);
                for (std::size_t i = 1; i < op.terms.size(); ++i) y += op.terms[i].apply(x);
                return y;
            } else {
                Vec y = x;
                for (auto it = op.factors.rbegin(); it != op.factors.rend(); ++it) y = it->apply(y);
                return y;
            }
        },
        v_);
}

Vec OperatorRep::apply_adjoint(const Vec& x) const { return adjoint().apply(x); }

OperatorRep OperatorRep::adjoint() const {
    return std::visit(
        [&](const auto& op) -> OperatorRep {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Dense>) {
                return OperatorRep(Dense{op.m.adjoint()}, radius_);
            } else if constexpr (std::is_same_v<T, CyclicShift>) {
                return OperatorRep(CyclicShift{op.n, -op.power, op.channels}, radius_);
            } else if constexpr (std::is_same_v<T, TruncShiftFwd>) {
                return OperatorRep(TruncShiftBwd{op.n}, radius_);
            } else if constexpr (std::is_same_v<T, TruncShiftBwd>) {
                return OperatorRep(TruncShiftFwd{op.n}, radius_);
            } else if constexpr (std::is_same_v<T, MulSymbol>) {
                std::vector<Mat> s;
                for (const Mat& m : op.symbol) s.push_back(m.adjoint());
                return OperatorRep(MulSymbol{std::move(s)}, radius_);
            } else if constexpr (std::is_same_v<T, FourierOp>) {
                return OperatorRep(fourier_adjoint(op), radius_);
            } else if constexpr (std::is_same_v<T, Sum>) {
                std::vector<OperatorRep> t;
                for (const auto& c : op.terms) t.push_back(c.adjoint());
                return OperatorRep(Sum{std::move(t)}, radius_);
            } else {
                std::vector<OperatorRep> f;
                for (auto it = op.factors.rbegin(); it != op.factors.rend(); ++it) f.push_back(it->adjoint());
                return OperatorRep(Compose{std::move(f)}, radius_);
            }
        },
        v_);
}

Mat OperatorRep::apply_columns(const Mat& x) const { return tlab::apply_columns(*this, x); }
Mat OperatorRep::apply_adjoint_columns(const Mat& x) const { return tlab::apply_adjoint_columns(*this, x); }

Mat OperatorRep::to_dense() const {
    if (const auto* d = std::get_if<Dense>(&v_)) return d->m;
    return apply_columns(Mat::Identity(dim(), dim()));
}

double op_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    return checked_svd(m, 0).s(0);
}

double max_abs(const Mat& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

Mat hermitian_sqrt_psd(const Mat& m, double clip_lo, double clip_hi) {
    if (m.rows() == 0) return m;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
    RVec ev = es.eigenvalues().cwiseMax(clip_lo).cwiseMin(clip_hi).cwiseSqrt();
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace tlab
