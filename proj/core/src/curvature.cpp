#include "hermitia/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace hermitia {

namespace {

CurvatureTensor blank(CurvatureKind kind, const MetricJet& mj) {
    CurvatureTensor t;
    t.kind = kind;
    t.n = mj.n;
    t.point = mj.point;
    t.c.assign(static_cast<size_t>(mj.n) * mj.n * mj.n * mj.n, 0.0);
    return t;
}

void require_order2(const MetricJet& mj, const char* what) {
    if (mj.order < 2) throw OrderExhausted(std::string(what) + ": metric jet order must be >= 2");
}

}  // namespace

std::vector<cplx> lc_curvature_full(const MetricJet& mj) {
    require_order2(mj, "curvature_lc");
    const int n = mj.n, N = 2 * n;
    const ChristoffelTable G = levi_civita(mj);
    const size_t N2 = static_cast<size_t>(N) * N, N3 = N2 * N;
    std::vector<cplx> g0(N3), dg(N3 * N);  // dg[((A*N+B)*N+C)*N + X] = d_X Gamma_{AB}^C
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C) {
                const Jet& j = G(A, B, C);
                const size_t k = (A * N + B) * N + C;
                g0[k] = j.value();
                for (int X = 0; X < N; ++X) dg[k * N + X] = j.linear(X);
            }
    auto gam = [&](int a, int b, int c) { return g0[(a * N + b) * N + c]; };
    auto dgam = [&](int a, int b, int c, int x) { return dg[((a * N + b) * N + c) * N + x]; };
    // complexified metric at the point
    std::vector<cplx> hc(N2, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) hc[i * N + n + j] = hc[(n + j) * N + i] = mj.h(i, j).value();
    std::vector<cplx> up(N3 * N), low(N3 * N, 0.0);
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                for (int D = 0; D < N; ++D) {
                    cplx s = dgam(B, C, D, A) - dgam(A, C, D, B);
                    for (int F = 0; F < N; ++F) s += gam(B, C, F) * gam(A, F, D) - gam(A, C, F) * gam(B, F, D);
                    up[((A * N + B) * N + C) * N + D] = s;
                }
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                for (int D = 0; D < N; ++D) {
                    cplx s = 0.0;
                    for (int E = 0; E < N; ++E) {
                        const cplx h = hc[E * N + D];
                        if (h != cplx(0.0)) s += up[((A * N + B) * N + C) * N + E] * h;
                    }
                    low[((A * N + B) * N + C) * N + D] = s;
                }
    return low;
}

CurvatureTensor curvature_lc(const MetricJet& mj) {
    const auto low = lc_curvature_full(mj);
    const int n = mj.n, N = 2 * n;
    auto L = [&](int a, int b, int c, int d) { return low[((a * N + b) * N + c) * N + d]; };
    CurvatureTensor t = blank(CurvatureKind::LeviCivita, mj);
    t.mixed.assign(t.c.size(), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    t(i, j, k, l) = L(i, n + j, k, n + l);
                    t.mixed[((i * n + j) * n + k) * n + l] = L(i, j, n + k, n + l);
                }
    return t;
}

std::vector<cplx> lowered_curvature(const ConnectionJet& c) {
    const int n = c.n, r = c.rank;
    const auto up = connection_curvature(c);
    std::vector<cplx> out(up.size(), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b) {
                    cplx s = 0.0;
                    for (int g = 0; g < r; ++g)
                        s += up[((i * n + j) * r + g) * r + a] * c.metric(g, b).value();
                    out[((i * n + j) * r + a) * r + b] = s;
                }
    return out;
}

CurvatureTensor curvature_from_connection(const ConnectionJet& c, CurvatureKind kind, const Point& p) {
    if (c.rank != c.n) throw StructuralError("curvature_from_connection: bundle must be T^{1,0}M");
    CurvatureTensor t;
    t.kind = kind;
    t.n = c.n;
    t.point = p;
    t.c = lowered_curvature(c);
    return t;
}

CurvatureTensor curvature_induced(const MetricJet& mj) {
    require_order2(mj, "curvature_induced");
    const auto lc = levi_civita(mj);
    return curvature_from_connection(ConnectionJet::from_table(induced(lc), mj), CurvatureKind::Induced,
                                     mj.point);
}

CurvatureTensor curvature_chern(const MetricJet& mj) {
    require_order2(mj, "curvature_chern");
    const int n = mj.n;
    CurvatureTensor t = blank(CurvatureKind::Chern, mj);
    const CMatrix P = mj.up0();
    // dh[(k*n+l)*2n + A] = d_A h_{k lbar}
    std::vector<cplx> dh(static_cast<size_t>(n) * n * 2 * n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int A = 0; A < 2 * n; ++A) dh[(k * n + l) * 2 * n + A] = mj.h(k, l).linear(A);
    auto D1 = [&](int k, int l, int A) { return dh[(k * n + l) * 2 * n + A]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    cplx s = -mj.h(k, l).partial({i, n + j});
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q) s += P(p, q) * D1(p, l, n + j) * D1(k, q, i);
                    t(i, j, k, l) = s;
                }
    return t;
}

CurvatureTensor curvature_bismut(const MetricJet& mj) {
    require_order2(mj, "curvature_bismut");
    return curvature_from_connection(ConnectionJet::from_table(bismut(mj), mj), CurvatureKind::Bismut,
                                     mj.point);
}

CurvatureTensor curvature(const MetricJet& mj, CurvatureKind kind) {
    switch (kind) {
        case CurvatureKind::LeviCivita: return curvature_lc(mj);
        case CurvatureKind::Induced: return curvature_induced(mj);
        case CurvatureKind::Chern: return curvature_chern(mj);
        case CurvatureKind::Bismut: return curvature_bismut(mj);
    }
    throw StructuralError("unknown curvature kind");
}

std::string to_string(RicciFlavor f) {
    switch (f) {
        case RicciFlavor::HermitianRicci: return "hermitian-ricci";
        case RicciFlavor::ComplexifiedRicci: return "complexified-ricci";
        case RicciFlavor::First: return "first";
        case RicciFlavor::Second: return "second";
    }
    return "?";
}

RicciMatrix ricci(const CurvatureTensor& t, const MetricJet& mj, RicciFlavor flavor) {
    const int n = t.n;
    if ((flavor == RicciFlavor::HermitianRicci || flavor == RicciFlavor::ComplexifiedRicci) &&
        t.kind != CurvatureKind::LeviCivita)
        throw IncompatibleFlavor(to_string(flavor) + " requires the Levi-Civita tensor, got " +
                                 to_string(t.kind));
    const CMatrix P = mj.up0();
    RicciMatrix r;
    r.flavor = flavor;
    r.kind = t.kind;
    r.point = t.point;
    r.m = CMatrix::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cplx s = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    switch (flavor) {
                        case RicciFlavor::First: s += t(a, b, p, q) * P(p, q); break;
                        case RicciFlavor::Second:
                        case RicciFlavor::HermitianRicci: s += P(p, q) * t(p, q, a, b); break;
                        case RicciFlavor::ComplexifiedRicci:
                            // h^{i jbar}(R_{k jbar i lbar} + R_{k i jbar lbar})
                            s += P(p, q) * (t(a, q, p, b) + t.mixed_at(a, p, q, b));
                            break;
                    }
                }
            r.m(a, b) = s;
        }
    return r;
}

CMatrix complexified_ricci_bianchi(const CurvatureTensor& t, const MetricJet& mj) {
    if (t.kind != CurvatureKind::LeviCivita) throw IncompatibleFlavor("Bianchi route needs the Levi-Civita tensor");
    const int n = t.n;
    const CMatrix P = mj.up0();
    CMatrix m = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(k, l) += P(i, j) * (2.0 * t(k, j, i, l) - t(k, l, i, j));
    return m;
}

RicciMatrix ricci_first_chern_logdet(const MetricJet& mj) {
    require_order2(mj, "ricci_first_chern_logdet");
    const int n = mj.n;
    const Jet ld = log(determinant(mj.h));
    RicciMatrix r;
    r.flavor = RicciFlavor::First;
    r.kind = CurvatureKind::Chern;
    r.point = mj.point;
    r.m = CMatrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.m(i, j) = -ld.partial({i, n + j});
    return r;
}

double ScalarReport::max_imag() const {
    return std::max({std::abs(s_h.imag()), std::abs(S.imag()), std::abs(S_lc.imag()), std::abs(S_ch.imag()),
                     std::abs(S_bm.imag())});
}

namespace {

cplx full_trace(const CurvatureTensor& t, const CMatrix& P) {
    const int n = t.n;
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s += P(i, j) * P(k, l) * t(i, j, k, l);
    return s;
}

cplx trace_with(const CMatrix& m, const CMatrix& P) {
    cplx s = 0.0;
    for (int k = 0; k < m.rows(); ++k)
        for (int l = 0; l < m.cols(); ++l) s += P(k, l) * m(k, l);
    return s;
}

}  // namespace

ScalarReport scalars(const MetricJet& mj) {
    const CMatrix P = mj.up0();
    const auto R = curvature_lc(mj);
    ScalarReport s;
    s.point = mj.point;
    s.s_h = trace_with(ricci(R, mj, RicciFlavor::ComplexifiedRicci).m, P);
    s.S = trace_with(ricci(R, mj, RicciFlavor::HermitianRicci).m, P);
    s.S_lc = full_trace(curvature_induced(mj), P);
    s.S_ch = full_trace(curvature_chern(mj), P);
    s.S_bm = full_trace(curvature_bismut(mj), P);
    return s;
}

RicciFamily ricci_family(const MetricJet& mj) {
    RicciFamily f;
    const auto R = curvature_lc(mj);
    const auto Rh = curvature_induced(mj);
    const auto Th = curvature_chern(mj);
    const auto B = curvature_bismut(mj);
    f.theta1 = ricci(Th, mj, RicciFlavor::First).m;
    f.theta2 = ricci(Th, mj, RicciFlavor::Second).m;
    f.induced1 = ricci(Rh, mj, RicciFlavor::First).m;
    f.induced2 = ricci(Rh, mj, RicciFlavor::Second).m;
    f.bismut1 = ricci(B, mj, RicciFlavor::First).m;
    f.bismut2 = ricci(B, mj, RicciFlavor::Second).m;
    f.hermitian = ricci(R, mj, RicciFlavor::HermitianRicci).m;
    f.complexified = ricci(R, mj, RicciFlavor::ComplexifiedRicci).m;
    return f;
}

}  // namespace hermitia
