#include "tlab/cogen.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "tlab/kernels.hpp"

namespace tlab {

namespace {

constexpr double kCondLimit = 1e12;

Mat as_dense(const OperatorRep& op) { return op.to_dense(); }

// solves X * M = B for X, refusing ill-conditioned M
Mat right_divide(const Mat& B, const Mat& M, const char* what) {
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& s = svd.singularValues();
    const double smax = s(0), smin = s(s.size() - 1);
    if (!(smin > 0.0) || smax / smin > kCondLimit) throw SpectrumError(what);
    // X M = B  <=>  M^H X^H = B^H
    Mat xh = M.adjoint().partialPivLu().solve(B.adjoint());
    return xh.adjoint();
}

}  // namespace

const char* to_string(CClass c) {
    switch (c) {
        case CClass::C00: return "C00";
        case CClass::C01: return "C01";
        case CClass::C10: return "C10";
        case CClass::C11: return "C11";
        case CClass::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

bool is_dissipative(const Mat& A, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() <= tol;
}

OperatorRep cayley_cogenerator(const OperatorRep& A) {
    const Mat a = as_dense(A);
    const Mat id = Mat::Identity(a.rows(), a.cols());
    return OperatorRep::dense(right_divide(a + id, a - id, "A - I is singular: 1 lies in the spectrum of A"));
}

OperatorRep cayley_generator(const OperatorRep& W) {
    const Mat w = as_dense(W);
    const Mat id = Mat::Identity(w.rows(), w.cols());
    return OperatorRep::dense(right_divide(w + id, w - id, "1 is an eigenvalue of W"));
}

OperatorRep semigroup_element(const OperatorRep& W, double t) {
    if (t < 0.0) throw DomainError("semigroup parameter must be nonnegative");
    const Index n = W.dim();
    const Mat a = as_dense(cayley_generator(W));
    if (t == 0.0) return OperatorRep::dense(Mat::Identity(n, n));
    return OperatorRep::dense((t * a).exp());
}

SemigroupSampler semigroup_of(const OperatorRep& W) {
    const Mat a = as_dense(cayley_generator(W));
    SemigroupSampler s;
    s.dim = W.dim();
    s.eval = [a](double t) {
        if (t < 0.0) throw DomainError("semigroup parameter must be nonnegative");
        if (t == 0.0) return OperatorRep::dense(Mat::Identity(a.rows(), a.cols()));
        return OperatorRep::dense((t * a).exp());
    };
    return s;
}

CogeneratorEstimate cogenerator_from_semigroup(const SemigroupSampler& S, double t_small) {
    if (!(t_small > 0.0)) throw DomainError("t_small must be positive");
    const Mat wt = as_dense(S.eval(t_small));
    const Mat id = Mat::Identity(wt.rows(), wt.cols());
    const Mat num = wt - id + t_small * id;
    const Mat den = wt - id - t_small * id;
    CogeneratorEstimate out{OperatorRep::dense(right_divide(num, den, "W_t - (1+t)I is singular")), false};
    out.degenerate = max_abs(wt - id) <= 1e-12;
    return out;
}

CClass classify_sequences(const std::vector<std::vector<double>>& forward,
                          const std::vector<std::vector<double>>& adjoint, double decay_ratio,
                          double persist_ratio) {
    // 0: all decay, 1: all persist, -1: anything else
    auto index_of = [&](const std::vector<std::vector<double>>& seqs) {
        int decays = 0, persists = 0, used = 0;
        for (const auto& s : seqs) {
            if (s.empty() || s.front() == 0.0) continue;
            ++used;
            if (s.back() < decay_ratio * s.front()) ++decays;
            else if (s.back() > persist_ratio * s.front()) ++persists;
        }
        if (used == 0) return -1;
        if (decays == used) return 0;
        if (persists == used) return 1;
        return -1;
    };
    const int f = index_of(forward), a = index_of(adjoint);
    if (f < 0 || a < 0) return CClass::inconclusive;
    if (f == 0) return a == 0 ? CClass::C00 : CClass::C01;
    return a == 0 ? CClass::C10 : CClass::C11;
}

ClassReport classify_c_class(const OperatorRep& W, const std::vector<Vec>& probes, Index n_max) {
    if (n_max < 1) throw DomainError("n_max must be at least 1");
    const auto& v = W.variant();
    const bool truncated = std::holds_alternative<OperatorRep::TruncShiftFwd>(v) ||
                           std::holds_alternative<OperatorRep::TruncShiftBwd>(v);
    for (const Vec& p : probes) {
        if (p.size() != W.dim()) throw DimensionError("probe length does not match operator");
        if (!truncated) continue;
        // both truncated shifts push probe content toward the top edge in one direction
        Index top = -1;
        for (Index i = 0; i < p.size(); ++i)
            if (p(i) != cplx(0.0)) top = i;
        if (top >= 0 && p.size() - 1 - top < n_max)
            throw PreconditionError("probe support is closer than n_max to the truncation edge");
    }

    ClassReport rep;
    const OperatorRep Wa = W.adjoint();
    rep.forward_decay.resize(probes.size());
    rep.adjoint_decay.resize(probes.size());
    for_each_index(static_cast<Index>(probes.size()), Exec::parallel, [&](Index i) {
        const std::size_t k = static_cast<std::size_t>(i);
        Vec x = probes[k], y = probes[k];
        auto& f = rep.forward_decay[k];
        auto& a = rep.adjoint_decay[k];
        f.push_back(x.norm());
        a.push_back(y.norm());
        for (Index n = 1; n <= n_max; ++n) {
            x = W.apply(x);
            y = Wa.apply(y);
            f.push_back(x.norm());
            a.push_back(y.norm());
        }
    });
    rep.verdict = classify_sequences(rep.forward_decay, rep.adjoint_decay, rep.decay_ratio, rep.persist_ratio);

    if (truncated) {
        rep.one_not_eigenvalue = true;  // nilpotent
    } else if (const auto* c = std::get_if<OperatorRep::CyclicShift>(&v)) {
        (void)c;
        rep.one_not_eigenvalue = false;  // constant vectors are fixed by every cyclic power
    } else {
        const Mat w = W.to_dense();
        Eigen::ComplexEigenSolver<Mat> es(w, false);
        double closest = 1e300;
        for (Index i = 0; i < es.eigenvalues().size(); ++i)
            closest = std::min(closest, std::abs(es.eigenvalues()(i) - 1.0));
        rep.one_not_eigenvalue = closest > 1e-8;
    }
    return rep;
}

}  // namespace tlab
