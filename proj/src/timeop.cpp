#include "tlab/timeop.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace tlab {

// ---------------------------------------------------------------- couples

namespace {

void require_line(const GridDomain& g) {
    if (g.kind() != GridDomain::Kind::line) throw DimensionError("line grid required");
}

std::vector<Mat> scalar_symbol(const RVec& v, Index channels) {
    std::vector<Mat> s(static_cast<std::size_t>(v.size()));
    for (Index j = 0; j < v.size(); ++j) s[static_cast<std::size_t>(j)] = Mat::Identity(channels, channels) * v(j);
    return s;
}

std::vector<Mat> phase_symbol(const RVec& v, double t, Index channels) {
    std::vector<Mat> s(static_cast<std::size_t>(v.size()));
    for (Index j = 0; j < v.size(); ++j)
        s[static_cast<std::size_t>(j)] = Mat::Identity(channels, channels) * std::polar(1.0, t * v(j));
    return s;
}

RVec coordinates(const GridDomain& g) {
    RVec x(g.size());
    for (Index j = 0; j < g.size(); ++j) x(j) = g.coordinate(j);
    return x;
}

}  // namespace

OperatorRep spectral_derivative(const GridDomain& line, Index channels) {
    require_line(line);
    const GridDomain dual = fourier_output_domain(line, FourierDirection::forward);
    return OperatorRep::compose({OperatorRep::fourier_op(dual, FourierDirection::inverse, channels),
                                 OperatorRep::mul_symbol(scalar_symbol(coordinates(dual), channels)),
                                 OperatorRep::fourier_op(line, FourierDirection::forward, channels)});
}

SchrodingerCouple schrodinger_couple(const GridDomain& line, Index channels) {
    require_line(line);
    const Index n = line.size();
    if (n < 1 || (n & (n - 1)) != 0) throw DimensionError("spectral derivative needs N a power of two");
    return {spectral_derivative(line, channels), OperatorRep::mul_symbol(scalar_symbol(coordinates(line), channels))};
}

FiniteWeylPair finite_weyl_pair(Index N) {
    if (N < 1) throw DimensionError("finite Weyl pair needs N >= 1");
    Vec c(N);
    for (Index j = 0; j < N; ++j) c(j) = root_of_unity(j, N);
    return {OperatorRep::diagonal(c), OperatorRep::cyclic_shift(N, -1)};
}

double finite_weyl_residual(const FiniteWeylPair& p, Exec exec) {
    const Index n = p.clock.dim();
    const cplx w = root_of_unity(1, n);
    const Mat id = Mat::Identity(n, n);
    const Mat lhs = apply_columns(p.shift, apply_columns(p.clock, id, exec), exec);
    const Mat rhs = apply_columns(p.clock, apply_columns(p.shift, id, exec), exec);
    return max_abs(lhs - w * rhs);
}

// ---------------------------------------------------------------- evolution

Evolution Evolution::from_generator(const Mat& H) {
    if (H.rows() != H.cols()) throw DimensionError("generator must be square");
    if (max_abs(H - H.adjoint()) > 1e-10 * std::max(1.0, max_abs(H)))
        throw SpectrumError("generator must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.adjoint()));
    Evolution e;
    e.kind_ = Kind::generator;
    e.eigvecs_ = es.eigenvectors();
    e.eigvals_ = es.eigenvalues();
    return e;
}

Evolution Evolution::translation(const GridDomain& line, Index channels) {
    require_line(line);
    if (channels < 1) throw DimensionError("channels must be positive");
    Evolution e;
    e.kind_ = Kind::translation;
    e.grid_ = line;
    e.channels_ = channels;
    return e;
}

Index Evolution::dim() const {
    return kind_ == Kind::generator ? eigvecs_.rows() : grid_.size() * channels_;
}

bool Evolution::aligned(double t) const {
    if (kind_ == Kind::generator) return true;
    const double m = t / grid_.spacing();
    return std::abs(m - std::round(m)) <= 1e-9;
}

Index Evolution::steps(double t) const {
    if (kind_ == Kind::generator) return 0;
    return static_cast<Index>(std::llround(t / grid_.spacing()));
}

OperatorRep Evolution::at(double t) const {
    if (kind_ == Kind::generator) {
        Vec ph(eigvals_.size());
        for (Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, t * eigvals_(i));
        return OperatorRep::dense(eigvecs_ * ph.asDiagonal() * eigvecs_.adjoint());
    }
    if (t == 0.0) return OperatorRep::identity(dim());
    if (aligned(t)) return OperatorRep::cyclic_shift(grid_.size(), steps(t), channels_);
    // trigonometric interpolation: multiplication by exp(-i xi t) in the dual grid
    const GridDomain dual = fourier_output_domain(grid_, FourierDirection::forward);
    return OperatorRep::compose({OperatorRep::fourier_op(dual, FourierDirection::inverse, channels_),
                                 OperatorRep::mul_symbol(phase_symbol(coordinates(dual), -t, channels_)),
                                 OperatorRep::fourier_op(grid_, FourierDirection::forward, channels_)});
}

// ---------------------------------------------------------------- reports

const char* to_string(Relation r) {
    switch (r) {
        case Relation::WWR: return "WWR";
        case Relation::GWWR: return "GWWR";
        case Relation::WR: return "WR";
        case Relation::CCR: return "CCR";
    }
    return "?";
}

namespace {

void finish(CommutationReport& r) {
    r.max_residual = 0.0;
    for (const auto& row : r.residuals)
        for (double v : row) r.max_residual = std::max(r.max_residual, v);
    r.pass = r.max_residual <= r.tol;
}

}  // namespace

json to_json(const CommutationReport& r) {
    json j;
    j["relation"] = to_string(r.relation);
    j["times"] = r.times;
    json params = json::array();
    for (const auto& [t, s] : r.parameters) params.push_back({t, s});
    j["parameters"] = params;
    j["probes"] = r.probes;
    j["residuals"] = r.residuals;
    j["frobenius"] = r.frobenius;
    j["lower_bound_witness"] = r.lower_bound_witness;
    j["max_residual"] = r.max_residual;
    j["tol"] = r.tol;
    j["verdict"] = r.pass ? "pass" : "fail";
    j["alignment_warning"] = r.alignment_warning;
    j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    return j;
}

CsvTable residual_curve(const CommutationReport& r) {
    CsvTable t;
    if (r.relation == Relation::WR) {
        t.header = {"t", "s", "residual"};
        for (std::size_t p = 0; p < r.parameters.size(); ++p)
            t.add({r.parameters[p].first, r.parameters[p].second, r.residuals.empty() ? 0.0 : r.residuals[0][p]});
        return t;
    }
    t.header = {"time", "max_residual"};
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        double m = 0.0;
        for (const auto& row : r.residuals) m = std::max(m, row[k]);
        t.add({r.times[k], m});
    }
    return t;
}

// ---------------------------------------------------------------- WWR

CommutationReport check_wwr(const WeylPairCandidate& cand, const std::vector<Vec>& probes,
                            const std::vector<double>& times, double tol) {
    const Evolution& ev = cand.evolution;
    const Index n = ev.dim();
    if (cand.T.dim() != n) throw DimensionError("T and evolution dimensions differ");
    for (const auto& p : probes)
        if (p.size() != n) throw DimensionError("probe length mismatch");

    if (ev.kind() == Evolution::Kind::translation) {
        double tmax = 0.0;
        for (double t : times) tmax = std::max(tmax, std::abs(t));
        const Index need = static_cast<Index>(std::ceil(tmax / ev.grid().spacing() - 1e-9)) + cand.domain_margin;
        const Index pts = ev.grid().size(), ch = ev.channels();
        for (const auto& p : probes) {
            for (Index i = 0; i < n; ++i) {
                if (p(i) == cplx(0.0)) continue;
                const Index j = i / ch;
                if (j < need || j > pts - 1 - need)
                    throw DomainError("probe support is within max|t|/h + margin of the grid boundary");
            }
        }
    }

    CommutationReport r;
    r.relation = Relation::WWR;
    r.times = times;
    r.probes = static_cast<Index>(probes.size());
    r.tol = tol;
    r.residuals.assign(probes.size(), std::vector<double>(times.size(), 0.0));
    for (double t : times)
        if (!ev.aligned(t)) r.alignment_warning = true;

    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const OperatorRep Ut = ev.at(t), Umt = ev.at(-t);
        for_each_index(static_cast<Index>(probes.size()), Exec::parallel, [&](Index p) {
            const Vec& psi = probes[static_cast<std::size_t>(p)];
            const Vec lhs = Umt.apply(cand.T.apply(Ut.apply(psi)));
            r.residuals[static_cast<std::size_t>(p)][k] = (lhs - cand.T.apply(psi) - t * psi).norm();
        });
        if (ev.kind() == Evolution::Kind::generator) {
            const Mat Td = cand.T.to_dense();
            const Mat D = Umt.to_dense() * Td * Ut.to_dense() - Td - t * Mat::Identity(n, n);
            r.frobenius.push_back(D.norm());
            r.lower_bound_witness.push_back(std::abs(D.trace()) / std::sqrt(static_cast<double>(n)));
        }
    }
    finish(r);
    return r;
}

// ---------------------------------------------------------------- GWWR

namespace {

struct Spectral {
    Mat V;  // empty when T is diagonal in the coordinate basis
    RVec lambda;
};

Spectral spectral_of(const OperatorRep& T) {
    if (const auto* ms = std::get_if<OperatorRep::MulSymbol>(&T.variant())) {
        bool scalar = true;
        for (const auto& s : ms->symbol) scalar = scalar && s.rows() == 1;
        if (scalar) {
            RVec l(static_cast<Index>(ms->symbol.size()));
            for (Index j = 0; j < l.size(); ++j) l(j) = ms->symbol[static_cast<std::size_t>(j)](0, 0).real();
            return {Mat(), l};
        }
    }
    const Mat m = T.to_dense();
    if (max_abs(m - m.adjoint()) > 1e-10 * std::max(1.0, max_abs(m)))
        throw SpectrumError("GWWR needs a Hermitian candidate");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
    return {es.eigenvectors(), es.eigenvalues()};
}

bool in_set(double x, const IntervalSet& B, double shift) {
    for (const auto& iv : B)
        if (x >= iv.lo - shift && x < iv.hi - shift) return true;
    return false;
}

Mat spectral_projection(const Spectral& sp, const IntervalSet& B, double shift) {
    const Index n = sp.lambda.size();
    Vec ind(n);
    for (Index i = 0; i < n; ++i) ind(i) = in_set(sp.lambda(i), B, shift) ? 1.0 : 0.0;
    if (sp.V.size() == 0) return ind.asDiagonal();
    return sp.V * ind.asDiagonal() * sp.V.adjoint();
}

}  // namespace

CommutationReport check_gwwr(const WeylPairCandidate& cand, const std::vector<IntervalSet>& sets,
                             const std::vector<double>& times, double tol) {
    const Evolution& ev = cand.evolution;
    const Index n = ev.dim();
    if (cand.T.dim() != n) throw DimensionError("T and evolution dimensions differ");
    const Spectral sp = spectral_of(cand.T);

    CommutationReport r;
    r.relation = Relation::GWWR;
    r.times = times;
    r.probes = static_cast<Index>(sets.size());
    r.tol = tol;
    r.residuals.assign(sets.size(), std::vector<double>(times.size(), 0.0));

    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        if (!ev.aligned(t)) r.alignment_warning = true;
        const Mat Ut = ev.at(t).to_dense(), Umt = ev.at(-t).to_dense();
        Index lo = 0, hi = n;
        if (ev.kind() == Evolution::Kind::translation) {
            const Index rad = std::abs(static_cast<Index>(std::ceil(std::abs(t) / ev.grid().spacing() - 1e-9))) +
                              cand.domain_margin;
            lo = std::min(n, rad * ev.channels());
            hi = std::max(lo, n - rad * ev.channels());
        }
        for (std::size_t b = 0; b < sets.size(); ++b) {
            const Mat lhs = Umt * spectral_projection(sp, sets[b], 0.0) * Ut;
            const Mat rhs = spectral_projection(sp, sets[b], t);
            const Mat diff = (lhs - rhs).block(lo, lo, hi - lo, hi - lo);
            r.residuals[b][k] = diff.size() == 0 ? 0.0 : op_norm(diff);
        }
    }
    finish(r);
    return r;
}

// ---------------------------------------------------------------- WR and CCR

CommutationReport check_weyl_relation(const Family& U, const Family& V,
                                      const std::vector<std::pair<double, double>>& ts, double tol) {
    CommutationReport r;
    r.relation = Relation::WR;
    r.parameters = ts;
    r.tol = tol;
    r.residuals.assign(1, std::vector<double>(ts.size(), 0.0));
    for (const auto& p : ts) r.times.push_back(p.first);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const auto [t, s] = ts[k];
        const OperatorRep Ut = U(t), Vs = V(s);
        if (Ut.dim() != Vs.dim()) throw DimensionError("families act on different spaces");
        const Mat lhs = apply_columns(Ut, Vs.to_dense());
        const Mat rhs = apply_columns(Vs, Ut.to_dense());
        r.residuals[0][k] = max_abs(lhs - std::polar(1.0, t * s) * rhs);
    }
    finish(r);
    return r;
}

CommutationReport check_ccr(const OperatorRep& X, const OperatorRep& Y, const std::vector<Vec>& probes,
                            Index interior_margin, double tol) {
    const Index n = X.dim();
    if (Y.dim() != n) throw DimensionError("CCR operands differ in dimension");
    if (2 * interior_margin >= n) throw MarginError("interior margin leaves nothing to test");
    CommutationReport r;
    r.relation = Relation::CCR;
    r.probes = static_cast<Index>(probes.size());
    r.times = {0.0};
    r.tol = tol;
    r.residuals.assign(probes.size(), std::vector<double>(1, 0.0));
    for_each_index(static_cast<Index>(probes.size()), Exec::parallel, [&](Index p) {
        const Vec& psi = probes[static_cast<std::size_t>(p)];
        const Vec res = X.apply(Y.apply(psi)) - Y.apply(X.apply(psi)) - kI * psi;
        r.residuals[static_cast<std::size_t>(p)][0] = res.segment(interior_margin, n - 2 * interior_margin).norm();
    });
    finish(r);
    return r;
}

Family clock_family(Index N) {
    return [N](double s) {
        Vec d(N);
        for (Index j = 0; j < N; ++j) d(j) = std::polar(1.0, s * static_cast<double>(j));
        return OperatorRep::diagonal(d);
    };
}

Family shift_family(Index N) {
    return [N](double t) {
        const double m = std::round(t);
        if (std::abs(t - m) > 1e-12) throw DomainError("shift powers must be integers");
        return OperatorRep::cyclic_shift(N, -static_cast<Index>(m));
    };
}

// ---------------------------------------------------------------- nested projections

NestedProjectionFamily NestedProjectionFamily::from_flag(const std::vector<double>& times, const Mat& flag,
                                                         const std::vector<Index>& first) {
    if (times.size() != first.size() || times.empty()) throw DimensionError("one flag position per time");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0 && !(times[k] > times[k - 1])) throw PreconditionError("times must increase");
        if (k > 0 && first[k] < first[k - 1]) throw PreconditionError("flag positions must not decrease");
    }
    if (first.front() != 0) throw PreconditionError("the first projection must be the identity");
    if (first.back() >= flag.cols()) throw PreconditionError("the last projection must be nonzero");
    if (flag.rows() != flag.cols()) throw DimensionError("flag must be a square basis");
    NestedProjectionFamily f;
    f.times = times;
    f.flag = flag;
    f.first = first;
    // a permutation flag gives diagonal operators
    bool perm = true;
    for (Index c = 0; c < flag.cols() && perm; ++c) {
        Index ones = 0;
        for (Index r = 0; r < flag.rows(); ++r) {
            if (flag(r, c) == cplx(1.0)) ++ones;
            else if (flag(r, c) != cplx(0.0)) perm = false;
        }
        perm = perm && ones == 1;
    }
    f.coordinate_flag = perm;
    return f;
}

NestedProjectionFamily NestedProjectionFamily::coordinate(const std::vector<double>& times) {
    const Index n = static_cast<Index>(times.size());
    std::vector<Index> first(times.size());
    for (Index k = 0; k < n; ++k) first[static_cast<std::size_t>(k)] = k;
    auto f = from_flag(times, Mat::Identity(n, n), first);
    f.coordinate_flag = true;
    return f;
}

NestedProjectionFamily NestedProjectionFamily::from_projections(const std::vector<double>& times,
                                                                const std::vector<Mat>& P, double tol) {
    if (P.empty() || P.size() != times.size()) throw DimensionError("one projection per time");
    const Index n = P.front().rows();
    for (const auto& p : P) {
        if (p.rows() != n || p.cols() != n) throw DimensionError("projections must share one square shape");
        if (max_abs(p - p.adjoint()) > tol || max_abs(p * p - p) > tol)
            throw PreconditionError("input is not a Hermitian idempotent");
    }
    if (max_abs(P.front() - Mat::Identity(n, n)) > tol) throw PreconditionError("P at the first time must be I");
    for (std::size_t k = 0; k + 1 < P.size(); ++k)
        if (op_norm(P[k + 1] - P[k] * P[k + 1]) > tol) throw PreconditionError("family is not decreasing");
    if (max_abs(P.back() - Mat::Identity(n, n)) <= tol)
        throw PreconditionError("family never decreases: not a decomposition of the identity");

    bool diagonal = true;
    for (const auto& p : P) diagonal = diagonal && max_abs(Mat(p.diagonal().asDiagonal()) - p) == 0.0;

    const std::size_t K = P.size();
    std::vector<Index> level(static_cast<std::size_t>(n), 0);
    Mat flag(n, 0);
    std::vector<Index> first(K);
    if (diagonal) {
        // coordinate i belongs to the last k with P_k(i,i) = 1
        for (Index i = 0; i < n; ++i)
            for (std::size_t k = 0; k < K; ++k)
                if (std::abs(P[k](i, i) - 1.0) <= tol) level[static_cast<std::size_t>(i)] = static_cast<Index>(k);
        std::vector<Index> order(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
            return level[static_cast<std::size_t>(a)] < level[static_cast<std::size_t>(b)];
        });
        flag = Mat::Zero(n, n);
        for (Index c = 0; c < n; ++c) flag(order[static_cast<std::size_t>(c)], c) = 1.0;
        for (std::size_t k = 0; k < K; ++k) {
            Index cnt = 0;
            for (Index i = 0; i < n; ++i) cnt += level[static_cast<std::size_t>(i)] < static_cast<Index>(k) ? 1 : 0;
            first[k] = cnt;
        }
    } else {
        // pieces P_k - P_{k+1}, stacked in increasing k
        for (std::size_t k = 0; k < K; ++k) {
            first[k] = flag.cols();
            const Mat piece = k + 1 < K ? Mat(P[k] - P[k + 1]) : P[k];
            Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (piece + piece.adjoint()));
            Mat cols(n, 0);
            for (Index i = 0; i < n; ++i) {
                if (es.eigenvalues()(i) > 0.5) {
                    cols.conservativeResize(n, cols.cols() + 1);
                    cols.col(cols.cols() - 1) = es.eigenvectors().col(i);
                }
            }
            Mat grown(n, flag.cols() + cols.cols());
            grown << flag, cols;
            flag = grown;
        }
        if (flag.cols() != n) throw PreconditionError("projections do not decompose the identity");
    }
    NestedProjectionFamily f;
    f.times = times;
    f.flag = flag;
    f.first = first;
    f.coordinate_flag = diagonal;
    f.tol = tol;
    for (std::size_t k = 1; k < K; ++k)
        if (!(times[k] > times[k - 1])) throw PreconditionError("times must increase");
    return f;
}

NestedProjectionFamily NestedProjectionFamily::shifted(double dt) const {
    NestedProjectionFamily f = *this;
    for (double& t : f.times) t += dt;
    return f;
}

Mat NestedProjectionFamily::projection(Index k) const {
    if (k < 0 || k >= static_cast<Index>(first.size())) throw DimensionError("projection index out of range");
    const Mat tail = flag.rightCols(flag.cols() - first[static_cast<std::size_t>(k)]);
    return tail * tail.adjoint();
}

double NestedProjectionFamily::monotonicity_defect() const {
    // nested spans of an orthonormal flag are monotone; the defect is the flag's non-orthonormality
    return max_abs(flag.adjoint() * flag - Mat::Identity(flag.cols(), flag.cols()));
}

namespace {

Vec level_values(const NestedProjectionFamily& fam, const std::function<cplx(double)>& g) {
    const Index n = fam.flag.cols();
    Vec v(n);
    for (std::size_t k = 0; k < fam.first.size(); ++k) {
        const Index end = k + 1 < fam.first.size() ? fam.first[k + 1] : n;
        for (Index c = fam.first[k]; c < end; ++c) v(c) = g(fam.times[k]);
    }
    return v;
}

OperatorRep from_levels(const NestedProjectionFamily& fam, const Vec& v) {
    if (fam.coordinate_flag) {
        Vec d(fam.dim());
        for (Index c = 0; c < v.size(); ++c) {
            Index row = 0;
            fam.flag.col(c).cwiseAbs().maxCoeff(&row);
            d(row) = v(c);
        }
        return OperatorRep::diagonal(d);
    }
    Mat m = fam.flag * v.asDiagonal() * fam.flag.adjoint();
    return OperatorRep::dense(m);
}

}  // namespace

TimeOperator time_operator_from_projections(const NestedProjectionFamily& fam) {
    if (fam.monotonicity_defect() > std::max(fam.tol, 1e-10)) throw PreconditionError("flag is not orthonormal");
    TimeOperator op;
    op.family = fam;
    const Vec v = level_values(fam, [](double t) { return cplx(t); });
    op.tau = v.real();
    op.T = from_levels(fam, v);
    if (!fam.coordinate_flag) {
        Mat m = op.T.to_dense();
        op.T = OperatorRep::dense(0.5 * (m + m.adjoint()));
    }
    return op;
}

OperatorRep TimeOperator::companion(double s) const {
    return from_levels(family, level_values(family, [s](double t) { return std::polar(1.0, s * t); }));
}

// ---------------------------------------------------------------- outgoing subspaces

json to_json(const OutgoingReport& r) {
    json j;
    j["invariance_defect"] = r.invariance_defect;
    j["invariant"] = r.invariant;
    j["intersection_dim"] = r.intersection_dim;
    j["union_codim"] = r.union_codim;
    j["depth"] = r.depth;
    j["band"] = r.band;
    j["stationary_removed"] = r.stationary_removed;
    j["tol"] = r.tol;
    j["verdict"] = r.pass() ? "pass" : "fail";
    return j;
}

namespace {

// U^n x; negative powers use the adjoint
Mat power_apply(const OperatorRep& U, const Mat& x, Index n) {
    if (n == 0) return x;
    if (const auto* cs = std::get_if<OperatorRep::CyclicShift>(&U.variant()))
        return apply_columns(OperatorRep::cyclic_shift(cs->n, cs->power * n, cs->channels), x);
    if (const auto* d = std::get_if<OperatorRep::Dense>(&U.variant())) {
        Mat base = n > 0 ? d->m : Mat(d->m.adjoint());
        Index e = std::abs(n);
        Mat acc = Mat::Identity(base.rows(), base.cols());
        while (e > 0) {
            if (e & 1) acc = acc * base;
            e >>= 1;
            if (e > 0) base = base * base;
        }
        return acc * x;
    }
    Mat y = x;
    for (Index i = 0; i < std::abs(n); ++i) y = n > 0 ? apply_columns(U, y) : apply_adjoint_columns(U, y);
    return y;
}

}  // namespace

OutgoingReport verify_outgoing(const SubspaceBasis& Mp_in, const OperatorRep& U_in, Index depth, Index band,
                               double tol) {
    if (Mp_in.dim() != U_in.dim()) throw DimensionError("subspace and operator dimensions differ");
    if (depth < 1 || depth > U_in.dim()) throw MarginError("depth exceeds the window");
    if (band < 0 || 2 * band >= U_in.dim()) throw MarginError("band exceeds the window");

    OutgoingReport r;
    r.depth = depth;
    r.band = band;
    r.tol = tol;

    SubspaceBasis Mp = Mp_in;
    OperatorRep U = U_in;
    if (const auto* d = std::get_if<OperatorRep::Dense>(&U_in.variant())) {
        const Index n = d->m.rows();
        Eigen::JacobiSVD<Mat> svd(d->m - Mat::Identity(n, n), Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        Index nul = 0;
        for (Index i = 0; i < s.size(); ++i) nul += s(i) <= 1e-8 ? 1 : 0;
        if (nul > 0) {
            r.stationary_removed = nul;
            const Mat C = svd.matrixV().leftCols(n - nul);  // orthocomplement of the fixed space
            U = OperatorRep::dense(C.adjoint() * d->m * C);
            Mp = orthonormalize(Mat(C.adjoint() * Mp_in.columns), Mp_in.tol);
        }
    }
    const Index n = U.dim();
    if (band >= n) throw MarginError("band exceeds the quotient window");

    // band counts grid points; a multichannel shift moves whole blocks of coordinates
    Index unit = 1;
    if (const auto* c = std::get_if<OperatorRep::CyclicShift>(&U.variant())) unit = c->channels;
    if (2 * band * unit >= n) throw MarginError("band exceeds the window");
    std::vector<Index> interior;
    for (Index i = band * unit; i < n - band * unit; ++i) interior.push_back(i);
    const SubspaceBasis inner = band == 0 ? Mp : restrict_to_coordinates(Mp, interior);
    const SubspaceBasis image = orthonormalize(Mat(apply_columns(U, inner.columns)), Mp.tol);
    r.invariance_defect = image.rank() == 0 ? 0.0 : containment_defect(Mp, image);
    r.invariant = r.invariance_defect <= tol;

    const SubspaceBasis fwd = orthonormalize(power_apply(U, Mp.columns, depth), Mp.tol);
    const SubspaceBasis bwd = orthonormalize(power_apply(U, Mp.columns, -depth), Mp.tol);
    r.intersection_dim = intersect(Mp, fwd).rank();
    // the union misses exactly the kernel of the summed projectors
    const Mat psum = bwd.projector() + Mp.projector() + fwd.projector();
    Eigen::SelfAdjointEigenSolver<Mat> es(psum, Eigen::EigenvaluesOnly);
    r.union_codim = (es.eigenvalues().array() <= 1e-10).count();
    return r;
}

// ---------------------------------------------------------------- Sinai representation

NestedProjectionFamily TranslationRep::projection_family() const {
    std::vector<double> times;
    std::vector<Index> first;
    for (Index m = n_lo; m < n_hi; ++m) {
        times.push_back(static_cast<double>(m));
        first.push_back((m - n_lo) * k);
    }
    return NestedProjectionFamily::from_flag(times, G, first);
}

TranslationRep sinai_translation_representation(const OperatorRep& U, const SubspaceBasis& Mp, Index depth,
                                                Index band, double tol) {
    TranslationRep tr;
    tr.outgoing = verify_outgoing(Mp, U, depth, band, tol);
    if (!tr.outgoing.pass()) throw PreconditionError("no outgoing subspace at this depth");
    if (tr.outgoing.stationary_removed > 0) throw PreconditionError("remove the stationary states first");

    const Index n = U.dim();
    const SubspaceBasis UMp = orthonormalize(Mat(apply_columns(U, Mp.columns)), Mp.tol);
    tr.fiber = orth_difference(Mp, UMp);
    tr.k = tr.fiber.rank();
    if (tr.k == 0) throw PreconditionError("empty innovation fiber");
    if (Mp.rank() % tr.k != 0 || (n - Mp.rank()) % tr.k != 0)
        throw PreconditionError("fiber dimension does not tile the window");
    tr.n_hi = Mp.rank() / tr.k;
    tr.n_lo = -(n - Mp.rank()) / tr.k;
    const Index L = tr.n_hi - tr.n_lo;

    tr.G = Mat(n, L * tr.k);
    Mat fwd = tr.fiber.columns, bwd = tr.fiber.columns;
    for (Index m = 0; m < tr.n_hi; ++m) {
        tr.G.middleCols((m - tr.n_lo) * tr.k, tr.k) = fwd;
        fwd = apply_columns(U, fwd);
    }
    for (Index m = -1; m >= tr.n_lo; --m) {
        bwd = apply_adjoint_columns(U, bwd);
        tr.G.middleCols((m - tr.n_lo) * tr.k, tr.k) = bwd;
    }
    tr.orthonormality_defect = max_abs(tr.G.adjoint() * tr.G - Mat::Identity(L * tr.k, L * tr.k));

    // G^H U G against the shift on all but the last level
    const Mat C = tr.G.adjoint() * apply_columns(U, tr.G);
    double conj = 0.0;
    for (Index c = 0; c < (L - 1) * tr.k; ++c) {
        Vec e = Vec::Zero(L * tr.k);
        e(c + tr.k) = 1.0;
        conj = std::max(conj, (C.col(c) - e).cwiseAbs().maxCoeff());
    }
    tr.conjugation_residual = conj;

    const Mat A = tr.G.adjoint() * Mp.columns;
    Mat target = Mat::Zero(L * tr.k, L * tr.k);
    for (Index c = -tr.n_lo * tr.k; c < L * tr.k; ++c) target(c, c) = 1.0;
    tr.mplus_residual = max_abs(A * A.adjoint() - target);
    return tr;
}

// ---------------------------------------------------------------- spectral representation

Index SpectralRep::signed_index(Index idx) const {
    const Index n_hi = n_lo + L;
    return idx < n_hi ? idx : idx - L;
}

Mat SpectralRep::to_samples(const Vec& psi) const {
    const Vec a = G.adjoint() * psi;
    Mat C(L, k);
    for (Index m = n_lo; m < n_lo + L; ++m) {
        const Index idx = ((m % L) + L) % L;
        for (Index i = 0; i < k; ++i) C(idx, i) = a((m - n_lo) * k + i);
    }
    return fourier(GridFunction(GridDomain::coefficients(L), C), FourierDirection::inverse).samples;
}

Vec SpectralRep::from_samples(const Mat& f) const {
    if (f.rows() != L || f.cols() != k) throw DimensionError("sample block has the wrong shape");
    const Mat C = fourier(GridFunction(GridDomain::circle(L), f), FourierDirection::forward).samples;
    Vec a(L * k);
    for (Index m = n_lo; m < n_lo + L; ++m) {
        const Index idx = ((m % L) + L) % L;
        for (Index i = 0; i < k; ++i) a((m - n_lo) * k + i) = C(idx, i);
    }
    return G * a;
}

Mat SpectralRep::derivative(const Mat& f) const {
    Mat C = fourier(GridFunction(GridDomain::circle(L), f), FourierDirection::forward).samples;
    for (Index idx = 0; idx < L; ++idx) C.row(idx) *= static_cast<double>(signed_index(idx));
    return fourier(GridFunction(GridDomain::coefficients(L), C), FourierDirection::inverse).samples;
}

SpectralRep spectral_representation(const TranslationRep& tr, const OperatorRep& U, const SubspaceBasis& Mp,
                                    std::uint64_t seed) {
    SpectralRep sr;
    sr.k = tr.k;
    sr.n_lo = tr.n_lo;
    sr.L = tr.n_hi - tr.n_lo;
    sr.G = tr.G;
    const Index L = sr.L, k = sr.k;
    if (L < 5) throw DimensionError("translation window too short for interior probes");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Vec ndiag(L * k);
    for (Index m = tr.n_lo; m < tr.n_hi; ++m)
        for (Index i = 0; i < k; ++i) ndiag((m - tr.n_lo) * k + i) = static_cast<double>(m);
    const GridDomain circ = GridDomain::circle(L);

    for (int p = 0; p < 4; ++p) {
        Vec a = Vec::Zero(L * k);
        for (Index c = 2 * k; c < (L - 2) * k; ++c) a(c) = cplx(gauss(rng), gauss(rng));
        a /= a.norm();
        const Vec psi = tr.G * a;
        const Mat f = sr.to_samples(psi);

        Mat fu = sr.to_samples(U.apply(psi));
        for (Index j = 0; j < L; ++j) fu.row(j) -= circ.circle_point(j) * f.row(j);
        sr.phase_residual = std::max(sr.phase_residual, max_abs(fu));

        const Vec Tpsi = tr.G * (ndiag.asDiagonal() * a);
        sr.derivative_residual = std::max(sr.derivative_residual, max_abs(sr.to_samples(Tpsi) - sr.derivative(f)));

        sr.roundtrip_residual = std::max(sr.roundtrip_residual, (sr.from_samples(f) - psi).cwiseAbs().maxCoeff());
    }

    for (Index c = 0; c < Mp.rank(); ++c) {
        const Mat f = sr.to_samples(Mp.columns.col(c));
        const Mat C = fourier(GridFunction(circ, f), FourierDirection::forward).samples;
        for (Index idx = 0; idx < L; ++idx)
            if (sr.signed_index(idx) < 0) sr.hardy_residual = std::max(sr.hardy_residual, C.row(idx).cwiseAbs().maxCoeff());
    }
    return sr;
}

}  // namespace tlab
