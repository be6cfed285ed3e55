#include "tlab/charfun.hpp"

#include <cmath>
#include <random>

namespace tlab {

namespace {

constexpr double kDefectRankTol = 1e-10;  // on eigenvalues of I - W^H W
constexpr double kRangeTol = 1e-6;        // on eigenvalues of delta

SubspaceBasis unit_vector(Index n, Index k) { return coordinate_subspace(n, {k}); }

void split_defect(const Mat& gram_gap, Mat& root, SubspaceBasis& basis) {
    const Index n = gram_gap.rows();
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (gram_gap + gram_gap.adjoint()));
    RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    root = es.eigenvectors() * ev.cwiseSqrt().cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    std::vector<Index> keep;
    for (Index i = n - 1; i >= 0; --i)
        if (ev(i) > kDefectRankTol) keep.push_back(i);
    Mat b(n, static_cast<Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) b.col(static_cast<Index>(i)) = es.eigenvectors().col(keep[i]);
    basis = SubspaceBasis(std::move(b), kDefectRankTol);
}

std::vector<Mat> range_projections(const std::vector<Mat>& ops) {
    std::vector<Mat> out(ops.size());
    for_each_index(static_cast<Index>(ops.size()), Exec::parallel, [&](Index j) {
        const Mat& m = ops[static_cast<std::size_t>(j)];
        const Index r = m.rows();
        if (r == 0) {
            out[static_cast<std::size_t>(j)] = Mat(0, 0);
            return;
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
        Mat p = Mat::Zero(r, r);
        for (Index i = 0; i < r; ++i)
            if (es.eigenvalues()(i) > kRangeTol) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
        out[static_cast<std::size_t>(j)] = std::move(p);
    });
    return out;
}

std::vector<cplx> roots_of_unity(Index N) {
    const GridDomain g = GridDomain::circle(N);
    std::vector<cplx> pts;
    for (Index j = 0; j < N; ++j) pts.push_back(g.circle_point(j));
    return pts;
}

}  // namespace

DefectData defect(const OperatorRep& W) {
    DefectData dd;
    const Index n = W.dim();
    dd.W = W.to_dense();
    const auto& v = W.variant();
    if (std::holds_alternative<OperatorRep::TruncShiftBwd>(v)) {
        // untruncated backward shift: W W^* = I, W^* W = I - e0 e0^H
        dd.rule = "backward shift";
        dd.artifact_suppressed = true;
        dd.basis_DW = unit_vector(n, 0);
        dd.basis_DWstar = SubspaceBasis::empty(n);
        dd.D_W = dd.basis_DW.projector();
        dd.D_Wstar = Mat::Zero(n, n);
        return dd;
    }
    if (std::holds_alternative<OperatorRep::TruncShiftFwd>(v)) {
        dd.rule = "forward shift";
        dd.artifact_suppressed = true;
        dd.basis_DW = SubspaceBasis::empty(n);
        dd.basis_DWstar = unit_vector(n, 0);
        dd.D_W = Mat::Zero(n, n);
        dd.D_Wstar = dd.basis_DWstar.projector();
        return dd;
    }
    if (std::holds_alternative<OperatorRep::CyclicShift>(v)) {
        dd.rule = "unitary shift";
        dd.basis_DW = SubspaceBasis::empty(n);
        dd.basis_DWstar = SubspaceBasis::empty(n);
        dd.D_W = Mat::Zero(n, n);
        dd.D_Wstar = Mat::Zero(n, n);
        return dd;
    }
    if (op_norm(dd.W) > 1.0 + 1e-12) throw ContractionError("defect: operator norm exceeds 1");
    const Mat id = Mat::Identity(n, n);
    split_defect(id - dd.W.adjoint() * dd.W, dd.D_W, dd.basis_DW);
    split_defect(id - dd.W * dd.W.adjoint(), dd.D_Wstar, dd.basis_DWstar);
    return dd;
}

Mat theta(const DefectData& dd, cplx lambda) {
    const Index r = dd.basis_DW.rank(), rs = dd.basis_DWstar.rank();
    if (r == 0 || rs == 0) return Mat::Zero(rs, r);
    const Index n = dd.W.rows();
    const Mat res = Mat::Identity(n, n) - lambda * dd.W.adjoint();
    Eigen::JacobiSVD<Mat> svd(res);
    const auto& s = svd.singularValues();
    if (!(s(s.size() - 1) > 0.0) || s(0) / s(s.size() - 1) > 1e12)
        throw SpectrumError("I - lambda W^* is singular: lambda is outside A_W");
    const Mat inner = res.partialPivLu().solve(dd.D_W * dd.basis_DW.columns);
    const Mat full = -dd.W * dd.basis_DW.columns + lambda * dd.D_Wstar * inner;
    return dd.basis_DWstar.columns.adjoint() * full;
}

Mat theta(const OperatorRep& W, cplx lambda) { return theta(defect(W), lambda); }

CharFunSamples delta_samples(const DefectData& dd, Index N, Exec exec) {
    CharFunSamples s;
    s.grid = GridDomain::circle(N);
    s.fiber = dd.basis_DW.rank();
    s.theta = evaluate_at_points([&](cplx w) { return theta(dd, w); }, roots_of_unity(N), exec);
    s.delta = defect_roots(s.theta, s.fiber, exec);
    s.idempotent_defect.resize(static_cast<std::size_t>(N));
    for_each_index(N, exec, [&](Index j) {
        const Mat& d = s.delta[static_cast<std::size_t>(j)];
        s.idempotent_defect[static_cast<std::size_t>(j)] = max_abs(d * d - d);
    });
    return s;
}

CharFunSamples delta_samples(const OperatorRep& W, Index N, Exec exec) {
    return delta_samples(defect(W), N, exec);
}

CsvTable charfun_curve(const CharFunSamples& s) {
    CsvTable t;
    t.header = {"j", "omega_re", "omega_im", "norm_delta", "rank_delta"};
    for (Index j = 0; j < s.grid.size(); ++j) {
        const Mat& d = s.delta[static_cast<std::size_t>(j)];
        const cplx w = s.grid.circle_point(j);
        Index rank = 0;
        if (d.rows()) {
            Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
            rank = (es.eigenvalues().array() > kRangeTol).count();
        }
        t.add({static_cast<double>(j), w.real(), w.imag(), op_norm(d), static_cast<double>(rank)});
    }
    return t;
}

OperatorRep HalfPlaneModel::evolution(double t) const {
    std::vector<Mat> sym;
    const Index r = range.fiber_dim();
    for (Index j = 0; j < grid.size(); ++j)
        sym.push_back(std::polar(1.0, t * grid.coordinate(j)) * Mat::Identity(r, r));
    return OperatorRep::mul_symbol(std::move(sym));
}

FunctionalModel functional_model_circle(const OperatorRep& W, Index N, std::optional<GridDomain> halfplane_grid,
                                        Index n_max) {
    const Index n = W.dim();
    const auto& v = W.variant();
    const bool truncated = std::holds_alternative<OperatorRep::TruncShiftFwd>(v) ||
                           std::holds_alternative<OperatorRep::TruncShiftBwd>(v);
    if (n_max <= 0) n_max = truncated ? n / 2 : 400;

    std::vector<Vec> probes;
    if (truncated) {
        const Index last = n - 1 - n_max;
        if (last < 0) throw PreconditionError("window too small for n_max");
        const Index count = std::min<Index>(8, last + 1);
        for (Index i = 0; i < count; ++i) {
            const Index k = count == 1 ? 0 : i * last / (count - 1);
            probes.push_back(Vec::Unit(n, k));
        }
    } else {
        for (Index k = 0; k < std::min<Index>(n, 8); ++k) probes.push_back(Vec::Unit(n, k));
        probes.push_back(Vec::Ones(n) / std::sqrt(static_cast<double>(n)));
    }
    const ClassReport cls = classify_c_class(W, probes, n_max);

    FunctionalModel fm;
    fm.c_class = cls.verdict;
    if (cls.verdict == CClass::inconclusive)
        throw PreconditionError("C-class inconclusive: increase n_max");
    if (cls.verdict != CClass::C00 && cls.verdict != CClass::C01)
        throw PreconditionError(std::string("functional model needs class C00 or C01, got ") + to_string(cls.verdict));

    const DefectData dd = defect(W);
    const Index r = dd.basis_DW.rank();
    fm.range.grid = GridDomain::circle(N);

    if (cls.verdict == CClass::C00) {
        fm.range.projections.assign(static_cast<std::size_t>(N), Mat::Zero(r, r));
    } else {
        const CharFunSamples cs = delta_samples(dd, N);
        fm.range.projections = range_projections(cs.delta);
    }
    for (Index j = 0; j < N; ++j) fm.model_dim += fm.range.rank_at(j);

    if (fm.model_dim == 0) {
        fm.model_shift = OperatorRep::dense(Mat(0, 0));
    } else if (fm.range.is_constant_full()) {
        fm.exact_cyclic = true;
        fm.model_shift = OperatorRep::cyclic_shift(N, 1, r);
    } else {
        std::vector<Mat> sym;
        for (Index j = 0; j < N; ++j)
            sym.push_back(fm.range.grid.circle_point(j) * fm.range.projections[static_cast<std::size_t>(j)]);
        fm.model_shift = OperatorRep::compose({OperatorRep::fourier_op(fm.range.grid, FourierDirection::forward, r),
                                               OperatorRep::mul_symbol(std::move(sym)),
                                               OperatorRep::fourier_op(GridDomain::coefficients(N),
                                                                       FourierDirection::inverse, r)});
    }

    if (fm.model_dim > 0) {
        // model-space projector in coefficient coordinates
        const OperatorRep proj = OperatorRep::compose(
            {OperatorRep::fourier_op(fm.range.grid, FourierDirection::forward, r),
             OperatorRep::mul_symbol(fm.range.projections),
             OperatorRep::fourier_op(GridDomain::coefficients(N), FourierDirection::inverse, r)});
        std::mt19937_64 rng(20240611);
        std::normal_distribution<double> nd;
        for (int trial = 0; trial < 3; ++trial) {
            Vec x(N * r);
            for (Index i = 0; i < x.size(); ++i) x(i) = cplx(nd(rng), nd(rng));
            x = proj.apply(x);
            x /= x.norm();
            const Vec y = fm.model_shift.apply(x);
            fm.invariance_defect = std::max(fm.invariance_defect, (y - proj.apply(y)).norm());
            fm.unitarity_defect = std::max(fm.unitarity_defect, std::abs(y.norm() - 1.0));
        }
    }

    if (halfplane_grid) {
        HalfPlaneModel hp;
        hp.grid = *halfplane_grid;
        std::vector<cplx> pts;
        for (Index j = 0; j < hp.grid.size(); ++j) {
            const double x = hp.grid.coordinate(j);
            pts.push_back((cplx(x, 0.0) - kI) / (cplx(x, 0.0) + kI));
        }
        if (cls.verdict == CClass::C00) {
            hp.upsilon.assign(pts.size(), Mat::Zero(r, r));
        } else {
            const auto xi = evaluate_at_points([&](cplx w) { return theta(dd, w); }, pts);
            hp.upsilon = defect_roots(xi, r);
        }
        hp.range.grid = hp.grid;
        hp.range.projections = range_projections(hp.upsilon);
        fm.halfplane = std::move(hp);
    }
    return fm;
}

namespace {

HalfplaneTransform finish_transform(std::vector<cplx> values, const GridDomain& line, double sup_u,
                                    double norm_u) {
    if (line.kind() != GridDomain::Kind::line) throw DimensionError("halfplane_transform needs a line grid");
    HalfplaneTransform out{GridFunction(line, Mat::Zero(line.size(), 1)), 0.0, norm_u, 0.0};
    double sq = 0.0;
    for (Index j = 0; j < line.size(); ++j) {
        const double x = line.coordinate(j);
        const cplx f = values[static_cast<std::size_t>(j)] / cplx(x, 1.0);
        out.f.samples(j, 0) = f;
        sq += std::norm(f);
    }
    out.norm_f = std::sqrt(sq * line.spacing() / kPi);
    const double L = std::max(std::abs(line.origin()), std::abs(line.coordinate(line.size() - 1)));
    // mass of dx/(pi(1+x^2)) outside [-L, L]
    out.tail_bound = sup_u * sup_u * (1.0 - 2.0 / kPi * std::atan(L));
    return out;
}

}  // namespace

HalfplaneTransform halfplane_transform(const std::function<cplx(cplx)>& u, double sup_u, double norm_u,
                                       const GridDomain& line) {
    std::vector<cplx> vals;
    for (Index j = 0; j < line.size(); ++j) {
        const cplx x(line.coordinate(j), 0.0);
        vals.push_back(u((x - kI) / (x + kI)));
    }
    return finish_transform(std::move(vals), line, sup_u, norm_u);
}

HalfplaneTransform halfplane_transform(const GridFunction& u, const GridDomain& line) {
    if (u.domain.kind() != GridDomain::Kind::circle) throw DimensionError("halfplane_transform needs circle samples");
    if (u.channels() != 1) throw DimensionError("halfplane_transform acts on scalar functions");
    const Index N = u.points();
    const Vec c = fourier(u, FourierDirection::forward).samples.col(0);
    auto interp = [&](cplx w) {
        cplx s = 0.0;
        for (Index k = 0; k < N; ++k) {
            const Index sk = k <= (N - 1) / 2 ? k : k - N;
            s += c(k) * std::pow(w, static_cast<double>(sk));
        }
        return s;
    };
    return halfplane_transform(interp, u.samples.cwiseAbs().maxCoeff(), u.norm(), line);
}

IsometricDilation schaffer_dilation(const OperatorRep& W, Index N_steps) {
    if (N_steps < 0) throw DomainError("N_steps must be nonnegative");
    const DefectData dd = defect(W);
    if (op_norm(dd.W) > 1.0 + 1e-12) throw ContractionError("dilation: operator norm exceeds 1");
    IsometricDilation dil;
    dil.d = dd.W.rows();
    dil.r = dd.basis_DW.rank();
    dil.steps = dil.r ? N_steps : 0;
    dil.W = dd.W;
    const Index dim = dil.d + dil.r * dil.steps;
    Mat u = Mat::Zero(dim, dim);
    u.topLeftCorner(dil.d, dil.d) = dd.W;
    if (dil.steps > 0) {
        u.block(dil.d, 0, dil.r, dil.d) = dd.basis_DW.columns.adjoint() * dd.D_W;
        for (Index s = 0; s + 1 < dil.steps; ++s)
            u.block(dil.d + (s + 1) * dil.r, dil.d + s * dil.r, dil.r, dil.r) = Mat::Identity(dil.r, dil.r);
    }
    dil.U_plus = OperatorRep(OperatorRep::Dense{std::move(u)}, dil.r);
    Mat e = Mat::Zero(dim, dil.d);
    e.topRows(dil.d) = Mat::Identity(dil.d, dil.d);
    dil.embed_H = SubspaceBasis(std::move(e), 1e-10);
    return dil;
}

double compression_defect(const IsometricDilation& dil, Index n) {
    const Mat& u = std::get<OperatorRep::Dense>(dil.U_plus.variant()).m;
    Mat un = dil.embed_H.columns;
    Mat wn = Mat::Identity(dil.d, dil.d);
    for (Index i = 0; i < n; ++i) {
        un = u * un;
        wn = dil.W * wn;
    }
    return max_abs(dil.embed_H.columns.adjoint() * un - wn);
}

std::pair<double, double> isometry_defect(const IsometricDilation& dil) {
    const Mat& u = std::get<OperatorRep::Dense>(dil.U_plus.variant()).m;
    const Index dim = u.rows(), tail = dil.steps ? dil.r : 0;
    const Mat g = u.adjoint() * u - Mat::Identity(dim, dim);
    const Index body = dim - tail;
    double inside = max_abs(g.topLeftCorner(body, body)), edge = 0.0;
    if (tail) edge = std::max(max_abs(g.rightCols(tail)), max_abs(g.bottomRows(tail)));
    return {inside, edge};
}

ResidualPart residual_part(const IsometricDilation& dil, Index n_probe) {
    if (n_probe < 0) throw DomainError("n_probe must be nonnegative");
    if (dil.steps > 0 && n_probe > dil.steps) throw DomainError("n_probe exceeds the dilation depth");
    const Mat& u = std::get<OperatorRep::Dense>(dil.U_plus.variant()).m;
    ResidualPart out;
    out.n_probe = n_probe;
    SubspaceBasis acc = dil.embed_H;
    Mat y = dil.embed_H.columns;
    for (Index n = 1; n <= n_probe && acc.rank() > 0; ++n) {
        y = u * y;
        acc = intersect(acc, orthonormalize(y, 1e-10));
    }
    if (acc.rank() == dil.d && contains(acc, dil.embed_H, 1e-10)) acc = dil.embed_H;
    out.basis = acc;
    out.R = acc.columns.adjoint() * u * acc.columns;
    return out;
}

namespace {

// residual-space coordinates of H unit vectors away from the edges
std::vector<Vec> interior_probes(const IsometricDilation& dil, const ResidualPart& res, Index margin) {
    std::vector<Vec> out;
    if (res.basis.rank() == 0) return out;
    for (Index k = margin; k < dil.d - margin; ++k) {
        Vec c = res.basis.columns.adjoint() * dil.embed_H.columns.col(k);
        const double nc = c.norm();
        if (nc > 0.5) out.push_back(c / nc);
    }
    return out;
}

}  // namespace

QuasiAffinity quasi_affinity_X(const IsometricDilation& dil, const ResidualPart& res, Index probe_margin) {
    QuasiAffinity q;
    q.X = dil.embed_H.columns.adjoint() * res.basis.columns;
    if (res.basis.rank() == 0) {
        q.degenerate = true;
        return q;
    }
    const auto probes = interior_probes(dil, res, probe_margin);
    q.probes_used = static_cast<Index>(probes.size());
    for (const Vec& c : probes)
        q.intertwining_residual = std::max(q.intertwining_residual, (dil.W * (q.X * c) - q.X * (res.R * c)).norm());
    Eigen::JacobiSVD<Mat> svd(q.X);
    const auto& s = svd.singularValues();
    q.smallest_singular_value = s(s.size() - 1);
    q.rank = (s.array() > 1e-10 * s(0)).count();
    return q;
}

ResidualModelMatch compare_residual_to_model(const IsometricDilation& dil, const ResidualPart& res,
                                             const FunctionalModel& model, Index probe_margin) {
    ResidualModelMatch m;
    for (const Vec& c : interior_probes(dil, res, probe_margin))
        m.interior_isometry_defect = std::max(m.interior_isometry_defect, std::abs((res.R * c).norm() - 1.0));
    if (res.basis.rank() > 0)
        m.residual_multiplicity = res.basis.rank() - orthonormalize(res.R, 1e-8).rank();
    for (Index j = 0; j < model.range.grid.size(); ++j)
        m.model_multiplicity = std::max(m.model_multiplicity, model.range.rank_at(j));
    return m;
}

}  // namespace tlab
