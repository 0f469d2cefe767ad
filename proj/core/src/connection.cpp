#include "hermitia/connection.hpp"

#include <algorithm>

namespace hermitia {

std::string to_string(ConnectionKind k) {
    switch (k) {
        case ConnectionKind::LeviCivita: return "levi-civita";
        case ConnectionKind::Induced: return "induced";
        case ConnectionKind::Chern: return "chern";
        case ConnectionKind::Bismut: return "bismut";
    }
    return "?";
}

double ChristoffelTable::max_abs() const {
    double m = 0.0;
    for (const auto& j : e) m = std::max(m, j.max_abs());
    return m;
}

namespace {

ChristoffelTable make_table(ConnectionKind kind, int n, int order, int d1, int d2, int d3) {
    ChristoffelTable t;
    t.kind = kind;
    t.n = n;
    t.order = order;
    t.d1 = d1;
    t.d2 = d2;
    t.d3 = d3;
    t.e.assign(static_cast<size_t>(d1) * d2 * d3, Jet(n, order));
    return t;
}

void require_order(const MetricJet& mj, int k, const char* what) {
    if (mj.order < k) throw OrderExhausted(std::string(what) + ": metric jet order too small");
}

}  // namespace

ChristoffelTable levi_civita(const MetricJet& mj) {
    require_order(mj, 1, "levi_civita");
    const int n = mj.n, N = 2 * n, K = mj.order - 1;
    // complexified metric: hc(i, n+j) = h_{i jbar}, hc(n+j, i) = h_{i jbar}
    auto hc = [&](int a, int b) -> const Jet* {
        if (a < n && b >= n) return &mj.h(a, b - n);
        if (a >= n && b < n) return &mj.h(b, a - n);
        return nullptr;
    };
    // inverse: hcinv(i, n+j) = hinv(j, i), hcinv(n+i, j) = hinv(i, j)
    std::vector<Jet> hci(static_cast<size_t>(N) * N);
    std::vector<char> hci_nz(static_cast<size_t>(N) * N, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            hci[i * N + n + j] = truncate(mj.hinv(j, i), K);
            hci[(n + i) * N + j] = truncate(mj.hinv(i, j), K);
            hci_nz[i * N + n + j] = hci_nz[(n + i) * N + j] = 1;
        }
    // dhc[(a*N + b)*N + c] = d_c hc(a, b)
    std::vector<Jet> dhc(static_cast<size_t>(N) * N * N);
    std::vector<char> dnz(static_cast<size_t>(N) * N * N, 0);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const Jet* h = hc(a, b);
            if (!h) continue;
            for (int c = 0; c < N; ++c) {
                Jet v = d(*h, c);
                if (v.is_zero()) continue;
                dhc[(a * N + b) * N + c] = std::move(v);
                dnz[(a * N + b) * N + c] = 1;
            }
        }
    auto dh = [&](int a, int b, int c) -> const Jet* {
        size_t k = (static_cast<size_t>(a) * N + b) * N + c;
        return dnz[k] ? &dhc[k] : nullptr;
    };
    ChristoffelTable t = make_table(ConnectionKind::LeviCivita, n, K, N, N, N);
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B) {
            // lowered symbol T_E = d_B h_{AE} + d_A h_{BE} - d_E h_{AB}
            std::vector<Jet> low(N, Jet(n, K));
            std::vector<char> lnz(N, 0);
            for (int E = 0; E < N; ++E) {
                Jet s(n, K);
                bool any = false;
                if (auto p = dh(A, E, B)) { s += *p; any = true; }
                if (auto p = dh(B, E, A)) { s += *p; any = true; }
                if (auto p = dh(A, B, E)) { s -= *p; any = true; }
                if (any) {
                    low[E] = std::move(s);
                    lnz[E] = 1;
                }
            }
            for (int C = 0; C < N; ++C) {
                Jet s(n, K);
                for (int E = 0; E < N; ++E)
                    if (lnz[E] && hci_nz[C * N + E]) s += hci[C * N + E] * low[E];
                t(A, B, C) = s * 0.5;
            }
        }
    return t;
}

ChristoffelTable chern(const MetricJet& mj) {
    require_order(mj, 1, "chern");
    const int n = mj.n, K = mj.order - 1;
    ChristoffelTable t = make_table(ConnectionKind::Chern, n, K, 2 * n, n, n);
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < n; ++a) {
            std::vector<Jet> dha;
            for (int q = 0; q < n; ++q) dha.push_back(d(mj.h(a, q), j));
            for (int b = 0; b < n; ++b) {
                Jet s(n, K);
                for (int q = 0; q < n; ++q) s += mult(mj.up(b, q), dha[q]);
                t(j, a, b) = s;
            }
        }
    return t;
}

ChristoffelTable bismut(const MetricJet& mj) {
    require_order(mj, 1, "bismut");
    const int n = mj.n, K = mj.order - 1;
    ChristoffelTable t = make_table(ConnectionKind::Bismut, n, K, 2 * n, n, n);
    // theta_{i alpha}^beta = h^{beta cbar} d_alpha h_{i cbar}
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                Jet s(n, K);
                for (int c = 0; c < n; ++c) s += mult(mj.up(b, c), d(mj.h(i, c), a));
                t(i, a, b) = s;
            }
    // theta_{jbar alpha}^beta = h^{beta lbar} (d_{jbar} h_{alpha lbar} - d_{lbar} h_{alpha jbar})
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                Jet s(n, K);
                for (int l = 0; l < n; ++l)
                    s += mult(mj.up(b, l), d(mj.h(a, l), n + j) - d(mj.h(a, j), n + l));
                t(n + j, a, b) = s;
            }
    return t;
}

ChristoffelTable induced(const ChristoffelTable& lc) {
    if (lc.kind != ConnectionKind::LeviCivita) throw StructuralError("induced: expects a Levi-Civita table");
    const int n = lc.n;
    ChristoffelTable t = make_table(ConnectionKind::Induced, n, lc.order, 2 * n, n, n);
    for (int A = 0; A < 2 * n; ++A)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) t(A, k, l) = lc(A, k, l);
    return t;
}

cplx lowered(const ChristoffelTable& t, const MetricJet& mj, int a, int alpha, int gamma) {
    cplx s = 0.0;
    for (int b = 0; b < mj.n; ++b) s += t(a, alpha, b).value() * mj.h(b, gamma).value();
    return s;
}

ConnectionJet ConnectionJet::trivial(int n, int rank, int order) {
    ConnectionJet c;
    c.n = n;
    c.rank = rank;
    c.theta.assign(2 * n, JetMat(rank, rank, n, order));
    c.metric = JetMat::identity(rank, n, order);
    return c;
}

ConnectionJet ConnectionJet::from_table(const ChristoffelTable& t, const MetricJet& mj) {
    if (t.kind == ConnectionKind::LeviCivita)
        throw StructuralError("from_table: use the induced table for the Levi-Civita connection");
    ConnectionJet c;
    c.n = t.n;
    c.rank = t.n;
    for (int A = 0; A < 2 * t.n; ++A) {
        JetMat m(t.n, t.n, t.n, t.order);
        for (int a = 0; a < t.n; ++a)
            for (int b = 0; b < t.n; ++b) m(b, a) = t(A, a, b);
        c.theta.push_back(std::move(m));
    }
    c.metric = mj.h;
    return c;
}

int ConnectionJet::order() const { return theta.empty() ? 0 : theta[0].order(); }

CompatibilityReport metric_compatibility(const ConnectionJet& c) {
    CompatibilityReport rep;
    const int n = c.n, r = c.rank;
    const int K = std::min(c.order(), c.metric.order() - 1);
    for (int A = 0; A < 2 * n; ++A) {
        const int Abar = A < n ? A + n : A - n;
        JetMat dH = truncate(d(c.metric, A), K);
        JetMat th = truncate(c.theta[A], K);
        JetMat tb = truncate(c.theta[Abar], K);
        JetMat H = truncate(c.metric, K);
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) {
                Jet rhs(n, K);
                for (int g = 0; g < r; ++g) {
                    rhs += th(g, a) * H(g, b);
                    rhs += conj(tb(g, b)) * H(a, g);
                }
                double v = (dH(a, b) - rhs).max_abs();
                if (v > rep.max_violation) {
                    rep.max_violation = v;
                    rep.direction = A;
                    rep.alpha = a;
                    rep.beta = b;
                }
            }
    }
    return rep;
}

std::vector<cplx> connection_curvature(const ConnectionJet& c) {
    const int n = c.n, r = c.rank;
    if (c.order() < 1) throw OrderExhausted("connection curvature needs theta of order >= 1");
    std::vector<cplx> R(static_cast<size_t>(n) * n * r * r, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const JetMat& ti = c.theta[i];
            const JetMat& tj = c.theta[n + j];
            for (int b = 0; b < r; ++b)
                for (int a = 0; a < r; ++a) {
                    cplx s = d(tj(b, a), i).value() - d(ti(b, a), n + j).value();
                    for (int g = 0; g < r; ++g)
                        s += ti(b, g).value() * tj(g, a).value() - tj(b, g).value() * ti(g, a).value();
                    R[((i * n + j) * r + b) * r + a] = s;
                }
        }
    return R;
}

}  // namespace hermitia
