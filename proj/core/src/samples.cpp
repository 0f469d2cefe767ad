#include "hermitia/samples.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "hermitia/connection.hpp"
#include "hermitia/structure.hpp"

namespace hermitia {

cplx random_complex(Rng& rng, double scale) {
    std::normal_distribution<double> g(0.0, 1.0);
    const double re = g(rng);
    const double im = g(rng);
    return scale * cplx(re, im);
}

std::vector<cplx> random_vector(Rng& rng, int n, double scale) {
    std::vector<cplx> v(n);
    for (auto& x : v) x = random_complex(rng, scale);
    return v;
}

CMatrix random_unitary(Rng& rng, int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = random_complex(rng);
    Eigen::HouseholderQR<CMatrix> qr(m);
    return qr.householderQ() * CMatrix::Identity(n, n);
}

NormalFormCoeffs random_normal_form(int n, Rng& rng, double ts, double ss) {
    auto c = NormalFormCoeffs::zero(n);
    for (auto& v : c.a) v = random_complex(rng, ts);
    for (auto& v : c.b) v = random_complex(rng, ss);
    for (auto& v : c.c) v = random_complex(rng, ss);
    c.symmetrize();
    return c;
}

namespace {

// Minimum-norm change dp with J (p0 + dp) + f0 = 0 for the affine map F(p) = J p + f0.
std::vector<double> solve_affine(const std::function<std::vector<double>(const std::vector<double>&)>& F,
                                 const std::vector<double>& p0) {
    const int np = static_cast<int>(p0.size());
    std::vector<double> zero(np, 0.0);
    const auto f0 = F(zero);
    const int nf = static_cast<int>(f0.size());
    Eigen::MatrixXd J(nf, np);
    for (int k = 0; k < np; ++k) {
        std::vector<double> e(np, 0.0);
        e[k] = 1.0;
        const auto fk = F(e);
        for (int r = 0; r < nf; ++r) J(r, k) = fk[r] - f0[r];
    }
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(p0.data(), np);
    Eigen::VectorXd rhs = J * p + Eigen::Map<const Eigen::VectorXd>(f0.data(), nf);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(J);
    Eigen::VectorXd dp = cod.solve(rhs);
    Eigen::VectorXd out = p - dp;
    return std::vector<double>(out.data(), out.data() + np);
}

std::vector<double> pack(const std::vector<cplx>& v) {
    std::vector<double> p;
    for (auto x : v) p.push_back(x.real());
    for (auto x : v) p.push_back(x.imag());
    return p;
}

std::vector<cplx> unpack(const std::vector<double>& p, size_t offset, size_t count) {
    std::vector<cplx> v(count);
    for (size_t k = 0; k < count; ++k) v[k] = cplx(p[offset + k], p[offset + count + k]);
    return v;
}

void append_complex(std::vector<double>& out, const std::vector<cplx>& v) {
    for (auto x : v) out.push_back(x.real());
    for (auto x : v) out.push_back(x.imag());
}

NormalFormCoeffs with_second_order(const NormalFormCoeffs& base, const std::vector<double>& p) {
    NormalFormCoeffs c = base;
    const size_t m = c.b.size();
    c.b = unpack(p, 0, m);
    c.c = unpack(p, 2 * m, m);
    c.symmetrize();
    return c;
}

std::vector<double> second_order_params(const NormalFormCoeffs& c) {
    auto p = pack(c.b);
    auto q = pack(c.c);
    p.insert(p.end(), q.begin(), q.end());
    return p;
}

}  // namespace

std::vector<double> balanced_constraint(const NormalFormCoeffs& c, bool with_derivatives) {
    const int n = c.n;
    const auto mj = metric_jet(MetricField::normal_form(c), Point(n, 0.0), with_derivatives ? 2 : 1);
    const auto G = levi_civita(mj);
    std::vector<double> out;
    std::vector<Jet> eta;
    for (int l = 0; l < n; ++l) {
        Jet s(n, G.order);
        for (int j = 0; j < n; ++j) s += G(l, n + j, n + j);
        eta.push_back(s);
    }
    std::vector<cplx> vals;
    for (const auto& e : eta) vals.push_back(e.value());
    if (with_derivatives)
        for (const auto& e : eta)
            for (int X = 0; X < 2 * n; ++X) vals.push_back(e.linear(X));
    append_complex(out, vals);
    return out;
}

NormalFormCoeffs balanced_normal_form(int n, Rng& rng, double ts, double ss) {
    NormalFormCoeffs c = random_normal_form(n, rng, ts, ss);
    // eta(0) is linear in the torsion coefficients
    {
        const size_t m = c.a.size();
        auto F = [&](const std::vector<double>& p) {
            NormalFormCoeffs t = NormalFormCoeffs::zero(n);
            t.a = unpack(p, 0, m);
            t.symmetrize();
            return balanced_constraint(t, false);
        };
        auto p = solve_affine(F, pack(c.a));
        c.a = unpack(p, 0, m);
        c.symmetrize();
    }
    auto F = [&](const std::vector<double>& p) { return balanced_constraint(with_second_order(c, p), true); };
    c = with_second_order(c, solve_affine(F, second_order_params(c)));
    return c;
}

NormalFormCoeffs skt_normal_form(int n, Rng& rng, double ts, double ss) {
    NormalFormCoeffs c = random_normal_form(n, rng, ts, ss);
    auto F = [&](const std::vector<double>& p) {
        const auto t = with_second_order(c, p);
        const auto mj = metric_jet(MetricField::normal_form(t), Point(n, 0.0), 2);
        const CMatrix r = skt_defect(mj);
        std::vector<cplx> v(r.data(), r.data() + r.size());
        std::vector<double> out;
        append_complex(out, v);
        return out;
    };
    c = with_second_order(c, solve_affine(F, second_order_params(c)));
    return c;
}

namespace {

std::vector<std::vector<int>> random_frequencies(int n, Rng& rng, int count) {
    std::uniform_int_distribution<int> u(-1, 1);
    std::set<std::vector<int>> used;
    std::vector<std::vector<int>> out;
    int guard = 0;
    while (static_cast<int>(out.size()) < count && guard++ < 1000) {
        std::vector<int> m(2 * n);
        bool nonzero = false;
        for (auto& v : m) {
            v = u(rng);
            nonzero |= v != 0;
        }
        if (!nonzero) continue;
        std::vector<int> neg(m);
        for (auto& v : neg) v = -v;
        if (used.count(m) || used.count(neg)) continue;
        used.insert(m);
        out.push_back(m);
    }
    return out;
}

std::vector<int> negate(std::vector<int> m) {
    for (auto& v : m) v = -v;
    return m;
}

}  // namespace

std::vector<FourierTerm> kahler_torus_terms(int n, Rng& rng, int frequencies, double amplitude) {
    std::vector<FourierTerm> terms;
    terms.push_back({std::vector<int>(2 * n, 0), CMatrix::Identity(n, n)});
    const auto freqs = random_frequencies(n, rng, frequencies);
    for (const auto& m : freqs) {
        // d_{z^j} e = i pi u_j e with u_j = m_j - i m_{n+j}; d_{zbar^j} e = i pi conj(u_j) e
        Eigen::VectorXcd u(n);
        for (int j = 0; j < n; ++j) u(j) = cplx(m[j], -m[n + j]);
        const double scale = amplitude / (std::numbers::pi * std::numbers::pi * u.squaredNorm() * frequencies);
        std::uniform_real_distribution<double> mag(0.5, 1.0), ang(0.0, 2.0 * std::numbers::pi);
        const cplx phi = std::polar(scale * mag(rng), ang(rng));
        CMatrix A = -std::numbers::pi * std::numbers::pi * phi * (u * u.adjoint());
        terms.push_back({m, A});
        terms.push_back({negate(m), A.adjoint()});
    }
    return terms;
}

MetricField kahler_torus(int n, Rng& rng, int frequencies, double amplitude) {
    return MetricField::torus(n, kahler_torus_terms(n, rng, frequencies, amplitude));
}

std::vector<FourierTerm> random_torus_terms(int n, Rng& rng, int frequencies, double amplitude) {
    std::vector<FourierTerm> terms;
    terms.push_back({std::vector<int>(2 * n, 0), CMatrix::Identity(n, n)});
    const auto freqs = random_frequencies(n, rng, frequencies);
    for (const auto& m : freqs) {
        CMatrix A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = random_complex(rng, 1.0);
        A *= amplitude / (A.norm() * frequencies);
        terms.push_back({m, A});
        terms.push_back({negate(m), A.adjoint()});
    }
    return terms;
}

MetricField random_torus(int n, Rng& rng, int frequencies, double amplitude) {
    return MetricField::torus(n, random_torus_terms(n, rng, frequencies, amplitude));
}

Point hopf_point(Rng& rng, int n, double rmin, double rmax) {
    Point z = random_vector(rng, n);
    double norm = 0.0;
    for (auto v : z) norm += std::norm(v);
    norm = std::sqrt(norm);
    std::uniform_real_distribution<double> ur(rmin, rmax);
    const double r = ur(rng);
    for (auto& v : z) v *= r / norm;
    return z;
}

namespace {

const MetricField& innermost(const MetricField& f) {
    return f.kind() == MetricKind::Scaled ? innermost(f.base()) : f;
}

Point map_unit_cube(const MetricField& f, const std::vector<double>& x) {
    const int n = f.n();
    const auto& g = innermost(f);
    switch (g.kind()) {
        case MetricKind::TorusFourier: return torus_point(x);
        case MetricKind::Hopf: {
            Point z(n);
            double norm = 0.0;
            for (int j = 0; j < n; ++j) {
                z[j] = cplx(2 * x[j] - 1, 2 * x[n + j] - 1);
                norm += std::norm(z[j]);
            }
            norm = std::sqrt(norm);
            if (norm < 1e-3) {
                z.assign(n, 0.0);
                z[0] = 1.0;
                norm = 1.0;
            }
            const double r = 1.0 + x[0];
            for (auto& v : z) v *= r / norm;
            return z;
        }
        default: {
            Point z(n);
            for (int j = 0; j < n; ++j) z[j] = 0.2 * cplx(2 * x[j] - 1, 2 * x[n + j] - 1);
            return z;
        }
    }
}

double radical_inverse(int base, int index) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

}  // namespace

std::vector<Point> sample_points(const MetricField& f, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto& g = innermost(f);
    std::vector<Point> pts;
    for (int k = 0; k < count; ++k) {
        if (g.kind() == MetricKind::Hopf) {
            pts.push_back(hopf_point(rng, f.n()));
            continue;
        }
        std::vector<double> x(2 * f.n());
        for (auto& v : x) v = u(rng);
        pts.push_back(map_unit_cube(f, x));
    }
    return pts;
}

std::vector<Point> halton_points(const MetricField& f, int count) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    std::vector<Point> pts;
    for (int k = 1; k <= count; ++k) {
        std::vector<double> x(2 * f.n());
        for (size_t d = 0; d < x.size(); ++d) x[d] = radical_inverse(primes[d], k);
        pts.push_back(map_unit_cube(f, x));
    }
    return pts;
}

}  // namespace hermitia
