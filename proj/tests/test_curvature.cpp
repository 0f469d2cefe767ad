#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "hermitia/connection.hpp"
#include "hermitia/curvature.hpp"
#include "hermitia/samples.hpp"

using namespace hermitia;

namespace {

std::vector<MetricJet> random_metric_jets(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<MetricJet> out;
    for (int k = 0; k < count; ++k) {
        const int n = 2 + k % 3;
        if (k % 2 == 0) {
            out.push_back(metric_jet(MetricField::normal_form(random_normal_form(n, rng)), random_vector(rng, n, 0.1)));
        } else {
            out.push_back(metric_jet(random_torus(n, rng), random_vector(rng, n)));
        }
    }
    return out;
}

double max_diff(const CurvatureTensor& a, const CurvatureTensor& b) {
    double m = 0;
    for (size_t k = 0; k < a.c.size(); ++k) m = std::max(m, std::abs(a.c[k] - b.c[k]));
    return m;
}

}  // namespace

TEST_CASE("connection: flat metric has zero Christoffels") {
    const auto mj = metric_jet(MetricField::flat(3), Point(3, 0.2));
    CHECK(levi_civita(mj).max_abs() == 0.0);
    CHECK(chern(mj).max_abs() == 0.0);
    CHECK(bismut(mj).max_abs() == 0.0);
}

TEST_CASE("connection: Hopf Chern connection is d log of the conformal factor") {
    // h = (4/|z|^2) delta  =>  theta_{i alpha}^beta = -zbar^i / |z|^2 delta_{alpha beta}
    Rng rng(3);
    for (int n = 2; n <= 4; ++n) {
        const auto z = hopf_point(rng, n);
        double r2 = 0;
        for (auto v : z) r2 += std::norm(v);
        const auto t = chern(metric_jet(MetricField::hopf(n), z, 2));
        for (int a = 0; a < 2 * n; ++a)
            for (int al = 0; al < n; ++al)
                for (int be = 0; be < n; ++be) {
                    const cplx expect = (a < n && al == be) ? -std::conj(z[a]) / r2 : cplx(0.0);
                    CHECK(std::abs(t(a, al, be).value() - expect) < 1e-14);
                }
    }
}

TEST_CASE("connection: Levi-Civita symmetries (property)") {
    for (const auto& mj : random_metric_jets(6, 5)) {
        const int n = mj.n;
        const auto lc = levi_civita(mj);
        for (int a = 0; a < 2 * n; ++a)
            for (int b = 0; b < 2 * n; ++b)
                for (int c = 0; c < 2 * n; ++c) {
                    // torsion free
                    CHECK(std::abs(lc(a, b, c).value() - lc(b, a, c).value()) < 1e-12);
                    // real connection: conj swaps all barred and unbarred slots
                    const int ab = (a + n) % (2 * n), bb = (b + n) % (2 * n), cb = (c + n) % (2 * n);
                    CHECK(std::abs(std::conj(lc(a, b, c).value()) - lc(ab, bb, cb).value()) < 1e-12);
                }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) CHECK(std::abs(lc(i, j, n + k).value()) < 1e-14);
    }
}

TEST_CASE("connection: Chern, Bismut and induced connections are metric (property)") {
    for (const auto& mj : random_metric_jets(4, 7)) {
        for (const auto& t : {chern(mj), bismut(mj), induced(levi_civita(mj))}) {
            const auto rep = metric_compatibility(ConnectionJet::from_table(t, mj));
            CHECK(rep.max_violation < 1e-11);
        }
    }
}

TEST_CASE("curvature: flat metric is flat") {
    const auto mj = metric_jet(MetricField::flat(2), Point(2, 0.0));
    for (auto k : {CurvatureKind::LeviCivita, CurvatureKind::Induced, CurvatureKind::Chern, CurvatureKind::Bismut}) {
        const auto t = curvature(mj, k);
        for (auto v : t.c) CHECK(std::abs(v) == 0.0);
    }
}

TEST_CASE("curvature: Hopf Chern tensor at (1,0)") {
    const auto t = curvature_chern(metric_jet(MetricField::hopf(2), {1.0, 0.0}, 2));
    CHECK(std::abs(t(1, 1, 0, 0) - 4.0) < 1e-13);
    CHECK(std::abs(t(0, 0, 0, 0)) < 1e-13);
}

TEST_CASE("curvature: Hopf Chern tensor against the conformal closed form") {
    // Theta_{i jbar k lbar} = (4/|z|^2) delta_{kl} (delta_{ij}|z|^2 - zbar^i z^j) / |z|^4
    Rng rng(13);
    for (int n = 2; n <= 4; ++n) {
        const auto z = hopf_point(rng, n);
        double r2 = 0;
        for (auto v : z) r2 += std::norm(v);
        const auto mj = metric_jet(MetricField::hopf(n), z, 2);
        const auto t = curvature_chern(mj);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        const cplx g = (i == j ? r2 : 0.0) - std::conj(z[i]) * z[j];
                        const cplx expect = (k == l) ? 4.0 / r2 * g / (r2 * r2) : cplx(0.0);
                        CHECK(std::abs(t(i, j, k, l) - expect) < 1e-12);
                    }
        // first Chern Ricci has spectrum {0, n/|z|^2 (n-1 times)}
        const auto r1 = ricci(t, mj, RicciFlavor::First).m;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(r1);
        CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
        for (int k = 1; k < n; ++k) CHECK(std::abs(es.eigenvalues()(k) - n / r2) < 1e-12);
    }
}

TEST_CASE("curvature: Hermitian symmetry of the (1,1) tensors (property)") {
    for (const auto& mj : random_metric_jets(4, 17)) {
        const int n = mj.n;
        for (auto kind : {CurvatureKind::LeviCivita, CurvatureKind::Chern}) {
            const auto t = curvature(mj, kind);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) CHECK(std::abs(std::conj(t(i, j, k, l)) - t(j, i, l, k)) < 1e-11);
        }
    }
}

TEST_CASE("curvature: first Chern Ricci equals -dd-bar log det h (property)") {
    for (const auto& mj : random_metric_jets(6, 19)) {
        const auto a = ricci(curvature_chern(mj), mj, RicciFlavor::First).m;
        const auto b = ricci_first_chern_logdet(mj).m;
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("curvature: two routes to the complexified Ricci agree (property)") {
    for (const auto& mj : random_metric_jets(8, 23)) {
        const auto t = curvature_lc(mj);
        const auto a = ricci(t, mj, RicciFlavor::ComplexifiedRicci).m;
        const auto b = complexified_ricci_bianchi(t, mj);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("curvature: Kahler metrics have one curvature tensor and one Ricci form") {
    Rng rng(29);
    for (int k = 0; k < 3; ++k) {
        const auto f = kahler_torus(2 + k % 2, rng);
        const auto mj = metric_jet(f, random_vector(rng, f.n()));
        const auto r = curvature_lc(mj);
        CHECK(max_diff(curvature_chern(mj), r) < 1e-9);
        CHECK(max_diff(curvature_induced(mj), r) < 1e-9);
        CHECK(max_diff(curvature_bismut(mj), r) < 1e-9);
        const auto F = ricci_family(mj);
        for (const auto* m : {&F.theta1, &F.theta2, &F.induced1, &F.induced2, &F.bismut1, &F.bismut2, &F.complexified})
            CHECK((*m - F.hermitian).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("curvature: induced curvature dominates along u (x) v (property)") {
    // (R - Rhat)(u, ubar, v, vbar) <= 0
    Rng rng(31);
    for (const auto& mj : random_metric_jets(6, 37)) {
        const int n = mj.n;
        const auto R = curvature_lc(mj);
        const auto Rh = curvature_induced(mj);
        for (int trial = 0; trial < 50; ++trial) {
            const auto u = random_vector(rng, n), v = random_vector(rng, n);
            cplx s = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            s += (R(i, j, k, l) - Rh(i, j, k, l)) * u[i] * std::conj(u[j]) * v[k] * std::conj(v[l]);
            CHECK(s.real() <= 1e-12);
        }
        const auto F = ricci_family(mj);
        for (const auto* m : {&F.induced1, &F.induced2}) {
            const CMatrix d = *m - F.hermitian;
            CHECK(min_eigenvalue(0.5 * (d + d.adjoint())) >= -1e-10);
        }
    }
}

TEST_CASE("curvature: Hopf scalar curvatures") {
    Rng rng(41);
    for (int k = 0; k < 5; ++k) {
        const auto s = scalars(metric_jet(MetricField::hopf(2), hopf_point(rng, 2), 2));
        // n(n-1)/4
        CHECK(std::abs(s.S_ch - 0.5) < 1e-12);
        CHECK(s.max_imag() < 1e-12);
    }
}
