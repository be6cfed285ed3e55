#include "tlab/invsub.hpp"

#include <algorithm>
#include <cmath>

#include "tlab/kernels.hpp"

namespace tlab {

namespace {

std::vector<cplx> natural_points(Index N) {
    const GridDomain g = GridDomain::circle(N);
    std::vector<cplx> pts;
    for (Index j = 0; j < N; ++j) pts.push_back(g.circle_point(j));
    return pts;
}

// unit window vectors delta_j (x) e_c, c = 0..d-1
Mat delta_block(Index d, Index M, Index j) {
    const Index N = 2 * M + 1;
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    Mat out = Mat::Zero(d * N, d);
    for (Index k = -M; k <= M; ++k) {
        const cplx v = std::polar(s, -2.0 * kPi * static_cast<double>(j * k % N) / static_cast<double>(N));
        for (Index c = 0; c < d; ++c) out((k + M) * d + c, c) = v;
    }
    return out;
}

Mat shift_columns(const Mat& x, Index d, Index M, int power) {
    const Index width = 2 * M + 1;
    Mat y = Mat::Zero(x.rows(), x.cols());
    for (Index p = 0; p < width; ++p) {
        const Index q = p + power;
        if (q < 0 || q >= width) continue;
        y.middleRows(q * d, d) = x.middleRows(p * d, d);
    }
    return y;
}

Index support_margin(const Mat& x, Index d, Index M) {
    const double scale = x.size() ? max_abs(x) : 0.0;
    if (scale == 0.0) return M;
    Index reach = 0;
    for (Index k = -M; k <= M; ++k)
        if (max_abs(x.middleRows((k + M) * d, d)) > 1e-14 * scale) reach = std::max(reach, std::abs(k));
    return M - reach;
}

std::vector<Index> interior_indices(Index d, Index M) {
    std::vector<Index> out;
    for (Index k = -M + 1; k <= M - 1; ++k)
        for (Index c = 0; c < d; ++c) out.push_back((k + M) * d + c);
    return out;
}

}  // namespace

FourierWindowSubspace make_window_subspace(Index d, Index M, const Mat& vectors, Index margin, double tol) {
    if (d < 1 || M < 0) throw DimensionError("window needs d >= 1 and M >= 0");
    if (vectors.rows() != d * (2 * M + 1)) throw DimensionError("vectors do not match the window layout");
    FourierWindowSubspace s;
    s.d = d;
    s.M = M;
    s.basis = orthonormalize(vectors, tol);
    if (margin < 0) margin = support_margin(vectors, d, M);
    s.margin = std::min(margin, std::max<Index>(M - 1, 0));
    return s;
}

Mat monomial_columns(Index d, Index M, Index first, Index last, Index channel) {
    first = std::max(first, -M);
    last = std::min(last, M);
    Mat out = Mat::Zero(d * (2 * M + 1), std::max<Index>(last - first + 1, 0));
    for (Index k = first; k <= last; ++k) out((k + M) * d + channel, k - first) = 1.0;
    return out;
}

Mat wiener_columns(Index M, const std::vector<bool>& E) {
    const Index N = 2 * M + 1;
    if (static_cast<Index>(E.size()) != N) throw DimensionError("indicator must cover the natural grid");
    std::vector<Index> pts;
    for (Index j = 0; j < N; ++j)
        if (E[static_cast<std::size_t>(j)]) pts.push_back(j);
    Mat out(N, static_cast<Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) out.col(static_cast<Index>(i)) = delta_block(1, M, pts[i]);
    return out;
}

Mat planted_columns(Index M, const std::vector<cplx>& q) {
    const Index N = 2 * M + 1;
    Mat out = Mat::Zero(N, M + 1);
    for (Index k = 0; k <= M; ++k)
        for (Index j = k; j <= M; ++j) {
            const Index t = j - k;
            if (t < static_cast<Index>(q.size())) out(j + M, k) = q[static_cast<std::size_t>(t)];
        }
    return out;
}

std::vector<cplx> blaschke_coefficients(cplx a, Index count) {
    // (w - a)/(1 - conj(a) w) = -a + sum_{n>=1} (1 - |a|^2) conj(a)^{n-1} w^n
    std::vector<cplx> c(static_cast<std::size_t>(std::max<Index>(count, 1)));
    c[0] = -a;
    cplx p = 1.0;
    for (Index n = 1; n < count; ++n) {
        c[static_cast<std::size_t>(n)] = (1.0 - std::norm(a)) * p;
        p *= std::conj(a);
    }
    return c;
}

Mat tensor_channel(const Mat& scalar_cols, Index d, Index channel) {
    Mat out = Mat::Zero(scalar_cols.rows() * d, scalar_cols.cols());
    for (Index p = 0; p < scalar_cols.rows(); ++p) out.row(p * d + channel) = scalar_cols.row(p);
    return out;
}

FourierWindowSubspace shift_action(const FourierWindowSubspace& S, int power) {
    if (power != 1 && power != -1) throw DomainError("shift power must be +1 or -1");
    if (S.margin <= 0) throw MarginError("window margin exhausted; enlarge M");
    FourierWindowSubspace out = S;
    out.basis = orthonormalize(shift_columns(S.basis.columns, S.d, S.M, power), S.basis.tol);
    out.margin = S.margin - 1;
    return out;
}

const char* to_string(Invariance v) {
    switch (v) {
        case Invariance::doubly: return "doubly";
        case Invariance::simply: return "simply";
        case Invariance::not_invariant: return "not_invariant";
    }
    return "not_invariant";
}

InvarianceReport classify_invariance(const FourierWindowSubspace& S, double tol) {
    if (S.margin < 1) throw MarginError("classify_invariance needs margin >= 1");
    InvarianceReport rep;
    rep.tol = tol;
    if (S.basis.rank() == 0) {
        rep.verdict = Invariance::doubly;
        rep.range = RangeFunction{GridDomain::circle(S.grid_size()),
                                  std::vector<Mat>(static_cast<std::size_t>(S.grid_size()), Mat::Zero(S.d, S.d)),
                                  tol};
        return rep;
    }
    // only vectors clear of both window edges can be shifted without truncation
    const SubspaceBasis inner = restrict_to_coordinates(S.basis, interior_indices(S.d, S.M), tol);
    rep.interior_rank = inner.rank();
    if (inner.rank() == 0) return rep;
    const SubspaceBasis fwd(shift_columns(inner.columns, S.d, S.M, 1), tol);
    const SubspaceBasis bwd(shift_columns(inner.columns, S.d, S.M, -1), tol);
    rep.forward_defect = containment_defect(S.basis, fwd);
    rep.backward_defect = containment_defect(S.basis, bwd);
    const bool f = rep.forward_defect <= tol, b = rep.backward_defect <= tol;
    if (f && b) rep.verdict = Invariance::doubly;
    else if (f) rep.verdict = Invariance::simply;
    else rep.verdict = Invariance::not_invariant;

    if (rep.verdict == Invariance::doubly) {
        const auto samples = window_samples(S.basis.columns, S.d, S.M, natural_points(S.grid_size()));
        rep.range = RangeFunction{GridDomain::circle(S.grid_size()), pointwise_range_projections(samples, tol), tol};
    }
    return rep;
}

InnovationResult innovation_basis(const FourierWindowSubspace& S, double tol) {
    const InvarianceReport inv = classify_invariance(S, tol);
    InnovationResult out;
    out.space = S;
    out.space.margin = std::max<Index>(S.margin - 1, 0);
    if (inv.verdict == Invariance::doubly) {
        out.doubly_flag = true;
        out.space.basis = SubspaceBasis::empty(S.window_dim(), tol);
        return out;
    }
    if (inv.verdict == Invariance::not_invariant) throw PreconditionError("innovation_basis needs an invariant subspace");
    const FourierWindowSubspace shifted = shift_action(S, 1);
    const SubspaceBasis overlap = intersect(shifted.basis, S.basis, tol);
    out.space.basis = orth_difference(S.basis, overlap);
    out.space.margin = shifted.margin;
    return out;
}

Index RigidFunction::rank() const {
    if (initial_projection.rows() == 0) return 0;
    return static_cast<Index>(std::lround(initial_projection.trace().real()));
}

RigidFunction rigid_from_innovation(const FourierWindowSubspace& I0, Index N, double tol) {
    const Index r = I0.basis.rank(), d = I0.d;
    if (r == 0) throw PreconditionError("rigid_from_innovation needs a nonempty innovation space");
    if (r > d) throw DimensionError("innovation rank exceeds the fiber dimension");
    if (N <= 0) N = I0.grid_size();
    RigidFunction U;
    U.grid = GridDomain::circle(N);
    U.initial_projection = Mat::Zero(d, d);
    U.initial_projection.topLeftCorner(r, r).setIdentity();
    const auto samples = window_samples(I0.basis.columns, d, I0.M, natural_points(N));
    U.values.resize(samples.size());
    std::vector<double> defect(samples.size(), 0.0), smin(samples.size(), 0.0);
    for_each_index(N, Exec::parallel, [&](Index j) {
        const std::size_t i = static_cast<std::size_t>(j);
        Mat v = Mat::Zero(d, d);
        v.leftCols(r) = samples[i];
        Eigen::JacobiSVD<Mat> svd(samples[i]);
        smin[i] = svd.singularValues()(r - 1);
        defect[i] = max_abs(v.adjoint() * v - U.initial_projection);
        U.values[i] = std::move(v);
    });
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (smin[i] < 1e-6) throw SpectrumError("innovation functions are linearly dependent at a grid point");
        U.partial_isometry_defect = std::max(U.partial_isometry_defect, defect[i]);
    }
    (void)tol;
    return U;
}

double rigid_span_defect(const FourierWindowSubspace& I0, const FourierWindowSubspace& target) {
    const Index r = I0.basis.rank(), width = 2 * I0.M + 1;
    Mat cols(I0.window_dim(), r * width);
    Mat cur = I0.basis.columns;
    for (Index n = 0; n < width; ++n) {
        cols.middleCols(n * r, r) = cur;
        cur = shift_columns(cur, I0.d, I0.M, 1);
    }
    const SubspaceBasis span = orthonormalize(cols, 1e-10);
    return std::max(containment_defect(target.basis, span), containment_defect(span, target.basis));
}

BeurlingResult beurling_inner(const FourierWindowSubspace& S, Index N, double tol) {
    if (S.d != 1) throw DimensionError("beurling_inner needs a scalar subspace");
    const InnovationResult inn = innovation_basis(S, tol);
    if (inn.space.basis.rank() != 1) throw PreconditionError("innovation space is not one-dimensional");
    if (N <= 0) N = S.grid_size();
    BeurlingResult out;
    out.grid = GridDomain::circle(N);
    const auto samples = window_samples(inn.space.basis.columns, 1, S.M, natural_points(N));
    const cplx first = samples.front()(0, 0);
    if (std::abs(first) == 0.0) throw SpectrumError("generator vanishes at the first grid point");
    const cplx phase = std::conj(first) / std::abs(first);
    for (const Mat& s : samples) {
        out.q.push_back(s(0, 0) * phase);
        out.modulus_deviation = std::max(out.modulus_deviation, std::abs(std::abs(out.q.back()) - 1.0));
    }
    return out;
}

RangeFunction doubly_invariant_core(const FourierWindowSubspace& S, double tol) {
    const Index N = S.grid_size(), d = S.d;
    RangeFunction K;
    K.grid = GridDomain::circle(N);
    K.tol = tol;
    K.projections.resize(static_cast<std::size_t>(N));
    for_each_index(N, Exec::parallel, [&](Index j) {
        const Mat block = delta_block(d, S.M, j);
        const SubspaceBasis inter = intersect(SubspaceBasis(block, tol), S.basis, tol);
        const Mat y = block.adjoint() * inter.columns;
        K.projections[static_cast<std::size_t>(j)] = y * y.adjoint();
    });
    return K;
}

FourierWindowSubspace range_function_subspace(const RangeFunction& K, Index M, Index margin) {
    const Index N = 2 * M + 1, d = K.fiber_dim();
    if (K.grid.size() != N) throw DimensionError("range function must live on the natural grid");
    std::vector<Vec> cols;
    for (Index j = 0; j < N; ++j) {
        const Mat& p = K.projections[static_cast<std::size_t>(j)];
        if (p.rows() == 0) continue;
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (p + p.adjoint()));
        const Mat block = delta_block(d, M, j);
        for (Index i = 0; i < d; ++i)
            if (es.eigenvalues()(i) > 0.5) cols.push_back(block * es.eigenvectors().col(i));
    }
    Mat x(d * N, static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) x.col(static_cast<Index>(i)) = cols[i];
    return make_window_subspace(d, M, x, margin);
}

FourierWindowSubspace doubly_invariant_core_iterated(const FourierWindowSubspace& S, Index depth, double tol) {
    const OperatorRep C = OperatorRep::cyclic_shift(S.grid_size(), 1, S.d);
    FourierWindowSubspace out = S;
    SubspaceBasis acc = S.basis;
    Mat y = S.basis.columns;
    for (Index n = 1; n <= depth && acc.rank() > 0; ++n) {
        y = C.apply_columns(y);
        acc = intersect(acc, SubspaceBasis(y, tol), tol);
    }
    out.basis = acc;
    return out;
}

HalmosHelsonReport halmos_helson_decompose(const FourierWindowSubspace& S, double tol) {
    HalmosHelsonReport rep;
    rep.tol = tol;
    const InvarianceReport inv = classify_invariance(S, tol);
    rep.verdict = inv.verdict;
    rep.margin_used = inv.margin_used;
    if (inv.verdict == Invariance::not_invariant)
        throw PreconditionError("halmos_helson_decompose needs an invariant subspace");
    const Index N = S.grid_size(), d = S.d;
    rep.window_depth = N - 1;
    rep.K = doubly_invariant_core(S, tol);
    const FourierWindowSubspace core = range_function_subspace(rep.K, S.M, S.margin);
    FourierWindowSubspace shift_part = S;
    shift_part.basis = orth_difference(S.basis, core.basis);
    rep.dim_M = S.basis.rank();
    rep.dim_core = core.basis.rank();
    rep.dim_shift_part = shift_part.basis.rank();

    if (shift_part.basis.rank() == 0) {
        rep.U.grid = GridDomain::circle(N);
        rep.U.values.assign(static_cast<std::size_t>(N), Mat::Zero(d, d));
        rep.U.initial_projection = Mat::Zero(d, d);
    } else {
        const InnovationResult inn = innovation_basis(shift_part, tol);
        rep.margin_used += 1;
        rep.U = rigid_from_innovation(inn.space, N, tol);
        rep.reproduction_defect = rigid_span_defect(inn.space, shift_part);
    }
    rep.J.grid = GridDomain::circle(N);
    rep.J.tol = tol;
    for (const Mat& u : rep.U.values) rep.J.projections.push_back(u * u.adjoint());
    for (Index j = 0; j < N; ++j)
        rep.orthogonality_residual = std::max(
            rep.orthogonality_residual,
            max_abs(rep.J.projections[static_cast<std::size_t>(j)] * rep.K.projections[static_cast<std::size_t>(j)]));
    rep.rank_J = rep.J.ranks();
    rep.rank_K = rep.K.ranks();
    return rep;
}

json to_json(const HalmosHelsonReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["rank_J"] = r.rank_J;
    j["rank_K"] = r.rank_K;
    j["rigid_rank"] = r.U.rank();
    j["partial_isometry_defect"] = r.U.partial_isometry_defect;
    j["orthogonality_residual"] = r.orthogonality_residual;
    j["dim_M"] = r.dim_M;
    j["dim_shift_part"] = r.dim_shift_part;
    j["dim_core"] = r.dim_core;
    j["reproduction_defect"] = r.reproduction_defect;
    j["window_depth"] = r.window_depth;
    j["margin_used"] = r.margin_used;
    j["tol"] = r.tol;
    return j;
}

}  // namespace tlab
