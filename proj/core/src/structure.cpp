#include "hermitia/structure.hpp"

#include <algorithm>
#include <cmath>

namespace hermitia {

KahlerDefect kahler_defect(const MetricJet& mj) {
    if (mj.order < 1) throw OrderExhausted("kahler_defect: order >= 1 required");
    const int n = mj.n;
    KahlerDefect k;
    k.n = n;
    k.f.assign(static_cast<size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < n; ++c) {
                const cplx v = mj.h(i, j).linear(c) - mj.h(c, j).linear(i);
                k.f[(i * n + j) * n + c] = v;
                k.max = std::max(k.max, std::abs(v));
            }
    return k;
}

std::vector<cplx> balanced_torsion(const MetricJet& mj) {
    const int n = mj.n;
    const auto G = levi_civita(mj);
    std::vector<cplx> eta(n, 0.0);
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) eta[l] += G(l, n + j, n + j).value();
    return eta;
}

std::vector<cplx> balanced_torsion_swapped(const MetricJet& mj) {
    const int n = mj.n;
    const auto G = levi_civita(mj);
    std::vector<cplx> eta(n, 0.0);
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) eta[l] += G(n + j, l, n + j).value();
    return eta;
}

namespace {

// d_a d_{bbar} h_{p qbar}
cplx h2(const MetricJet& mj, int p, int q, int a, int b) { return mj.h(p, q).partial({a, mj.n + b}); }

}  // namespace

CMatrix skt_defect(const MetricJet& mj) {
    if (mj.order < 2) throw OrderExhausted("skt_defect: order >= 2 required");
    const int n = mj.n;
    CMatrix r = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                r(i, j) += h2(mj, i, j, k, k) + h2(mj, k, k, i, j) - h2(mj, i, k, k, j) - h2(mj, k, j, i, k);
    return r;
}

CMatrix skt_defect_traced(const MetricJet& mj) {
    if (mj.order < 2) throw OrderExhausted("skt_defect: order >= 2 required");
    const int n = mj.n;
    const CMatrix P = mj.up0();
    CMatrix r = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    r(i, j) += P(k, l) * (h2(mj, i, j, k, l) + h2(mj, k, l, i, j) - h2(mj, i, l, k, j) -
                                          h2(mj, k, j, i, l));
    return r;
}

LaplacianValues laplacian_compare(const MetricJet& mj, const Jet& f) {
    if (f.order() < 2) throw OrderExhausted("laplacian_compare: f needs order >= 2");
    if (f.n() != mj.n) throw StructuralError("laplacian_compare: dimension mismatch");
    const int n = mj.n;
    const CMatrix P = mj.up0();
    const auto G = levi_civita(mj);
    LaplacianValues v;
    v.canonical = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v.canonical -= P(i, j) * f.partial({i, n + j});
    v.dbar = v.canonical;
    v.d = v.canonical;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                v.dbar += 2.0 * P(i, j) * G(i, n + j, n + l).value() * f.linear(n + l);
                v.d += 2.0 * P(i, j) * G(i, n + j, l).value() * f.linear(l);
            }
    return v;
}

double torsion_norm(const MetricJet& mj) {
    const int n = mj.n;
    const auto f = kahler_defect(mj);
    const CMatrix P = mj.up0();
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c)
                            s += f(i, j, k) * std::conj(f(a, b, c)) * P(i, a) * std::conj(P(j, b)) * P(k, c);
    return 0.25 * s.real();
}

StructureReport classify(const MetricJet& mj, double tol) {
    StructureReport r;
    r.point = mj.point;
    r.kahler_defect = kahler_defect(mj).max;
    for (auto e : balanced_torsion(mj)) r.balanced_defect = std::max(r.balanced_defect, std::abs(e));
    r.skt_defect = skt_defect(mj).cwiseAbs().maxCoeff();
    r.skt_traced_defect = skt_defect_traced(mj).cwiseAbs().maxCoeff();
    r.kahler = r.kahler_defect <= tol;
    r.balanced = r.balanced_defect <= tol;
    r.skt = r.skt_traced_defect <= tol;
    return r;
}

Prop38Result prop38_check(const MetricJet& mj, double tol) {
    Prop38Result res;
    const auto s = classify(mj, tol);
    if (!s.balanced || !s.skt) {
        res.skipped = true;
        res.reason = std::string("precondition not met:") + (s.balanced ? "" : " not balanced") +
                     (s.skt ? "" : " not SKT");
        return res;
    }
    res.norm = torsion_norm(mj);
    res.holds = res.norm <= tol;
    return res;
}

}  // namespace hermitia
