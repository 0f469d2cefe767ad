#include <doctest.h>

#include <cmath>

#include "hermitia/forms.hpp"

using namespace hermitia;

namespace {

const cplx I(0.0, 1.0);

}  // namespace

TEST_CASE("forms: mask bookkeeping") {
    const unsigned m = form_mask({0, 2}, {1}, 3);
    CHECK(form_p(m, 3) == 2);
    CHECK(form_q(m, 3) == 1);
    CHECK(m == (1u | 4u | (1u << 4)));
}

TEST_CASE("forms: wedge is graded commutative (property)") {
    Rng rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = random_form(2, 1, 2, rng, 1, 0);
        const auto b = random_form(2, 1, 2, rng, 0, 1);
        const auto c = random_form(2, 1, 2, rng, 1, 1);
        // odd ^ odd anticommutes, even ^ anything commutes
        CHECK(residual(wedge(a, b), -1.0 * wedge(b, a)) < 1e-13);
        CHECK(residual(wedge(a, c), wedge(c, a)) < 1e-13);
        CHECK(wedge(a, a).max_abs() < 1e-13);
    }
}

TEST_CASE("forms: d squared vanishes (property)") {
    Rng rng(2);
    const auto mj = metric_jet(MetricField::flat(2), {0.0, 0.0}, 4);
    FormCalculus fc(mj);
    for (int trial = 0; trial < 5; ++trial) {
        const auto phi = random_form(2, 1, 4, rng);
        CHECK(apply(fc.del(), apply(fc.del(), phi)).max_abs() < 1e-12);
        CHECK(apply(fc.delbar(), apply(fc.delbar(), phi)).max_abs() < 1e-12);
        const auto dd = apply(fc.del(), apply(fc.delbar(), phi)) + apply(fc.delbar(), apply(fc.del(), phi));
        CHECK(dd.max_abs() < 1e-12);
    }
}

TEST_CASE("forms: Kahler form of the flat metric") {
    const auto mj = metric_jet(MetricField::flat(2), {0.0, 0.0}, 2);
    FormCalculus fc(mj);
    const auto w = fc.kahler_form();
    CHECK(std::abs(w.at(form_mask({0}, {0}, 2)).value() - 0.5 * I) < 1e-15);
    CHECK(std::abs(w.at(form_mask({0}, {1}, 2)).value()) < 1e-15);
    // Lambda L on functions multiplies by n
    const auto one = FormJet::function(Jet::constant(2, 2, 1.0));
    const auto ll = apply(fc.Lambda(), apply(fc.L(), one));
    CHECK(std::abs(ll.at(0).value() - 2.0) < 1e-14);
}

TEST_CASE("forms: torsion operator of the Hopf surface on functions") {
    // 2 d omega = -4i dz^1 ^ dz^2 ^ dzbar^2 at (1,0); Lambda of it is -dz^1
    const auto mj = metric_jet(MetricField::hopf(2), {1.0, 0.0}, 3);
    FormCalculus fc(mj);
    const auto one = FormJet::function(Jet::constant(2, 3, 1.0));
    const auto t = apply(fc.tau(), one);
    for (unsigned m = 0; m < 16; ++m) {
        const cplx expect = (m == form_mask({0}, {}, 2)) ? cplx(-1.0) : cplx(0.0);
        CHECK(std::abs(t.at(m).value() - expect) < 1e-13);
    }
}

TEST_CASE("forms: identity suite on the Hopf surface") {
    const auto mj = metric_jet(MetricField::hopf(2), {cplx(1.0, 0.2), cplx(0.3, -0.4)}, 4);
    const auto rep = identity_suite(mj, 3, 5);
    CHECK(rep.rows.size() >= 15);
    for (const auto& r : rep.rows) {
        INFO(r.name);
        CHECK(r.residual <= 1e-9);
    }
    CHECK(rep.find("tau=A+B+C") != nullptr);
    CHECK(rep.find("no-such-identity") == nullptr);
}

TEST_CASE("forms: bundle identity suite with a random metric connection") {
    Rng rng(7);
    const auto mj = metric_jet(MetricField::normal_form(random_normal_form(2, rng)), {0.0, 0.0}, 4);
    const auto conn = random_metric_connection(2, 2, 3, rng);
    CHECK(metric_compatibility(conn).max_violation < 1e-12);
    const auto rep = bundle_identity_suite(mj, conn, 2, 9);
    for (const auto& r : rep.rows) {
        INFO(r.name);
        CHECK(r.residual <= 1e-9);
    }
}

TEST_CASE("forms: bundle suite rejects a non-metric connection") {
    Rng rng(8);
    const auto mj = metric_jet(MetricField::flat(2), {0.0, 0.0}, 3);
    auto conn = ConnectionJet::trivial(2, 2, 3);
    conn.theta[0](0, 1) = Jet::constant(2, 3, 1.0);
    CHECK_THROWS_AS(bundle_identity_suite(mj, conn, 1, 1), PreconditionError);
}

TEST_CASE("forms: trace of the bundle curvature from the Dolbeault operators") {
    // (del_E delbar_E + delbar_E del_E) s = R^E s; i Lambda of it is the trace of R^E acting on s
    Rng rng(9);
    const auto mj = metric_jet(MetricField::normal_form(random_normal_form(2, rng)), {0.0, 0.0}, 4);
    const auto conn = random_metric_connection(2, 2, 3, rng);
    FormCalculus fc(mj);
    const auto tr = second_hermitian_ricci(conn, mj);
    const auto lam = extend(fc.Lambda(), 2);
    for (int alpha = 0; alpha < 2; ++alpha) {
        std::vector<Jet> s(2, Jet(2, 3));
        s[alpha] = Jet::constant(2, 3, 1.0);
        const auto sec = FormJet::section(s);
        const auto de = fc.del_E(conn), dbe = fc.delbar_E(conn);
        const auto curv = apply(de, apply(dbe, sec)) + apply(dbe, apply(de, sec));
        const auto v = I * apply(lam, curv);
        // lower the fiber index with H: Tr R_{alpha betabar} = sum_gamma (R e_alpha)^gamma H_{gamma betabar}
        for (int beta = 0; beta < 2; ++beta) {
            cplx lowered = 0;
            for (int g = 0; g < 2; ++g) lowered += v.at(0, g).value() * conn.metric(g, beta).value();
            CHECK(std::abs(lowered - tr(alpha, beta)) < 1e-12);
        }
    }
}

TEST_CASE("forms: identities on every monomial basis form") {
    // spanning set: each basis mask with each coefficient monomial of degree <= 2
    Rng rng(10);
    const auto mj = metric_jet(MetricField::normal_form(random_normal_form(2, rng)), {0.0, 0.0}, 4);
    FormCalculus fc(mj);
    const auto L = fc.L(), Lam = fc.Lambda(), tau = fc.tau(), A = fc.A(), B = fc.B(), C = fc.C(), del = fc.del();
    const int n = 2;
    const int monomials = JetLayout::get(n, 4).size_up_to(2);
    double worst_lefschetz = 0, worst_tau = 0, worst_dd = 0;
    for (unsigned mask = 0; mask < 16; ++mask)
        for (int m = 0; m < monomials; ++m) {
            auto phi = FormJet::zero(n, 1, 4);
            phi.at(mask)[m] = 1.0;
            const int k = form_p(mask, n) + form_q(mask, n);
            // [L, Lambda] = (k - n) on k-forms
            const auto lhs = apply(L, apply(Lam, phi)) - apply(Lam, apply(L, phi));
            worst_lefschetz = std::max(worst_lefschetz, residual(lhs, cplx(k - n) * phi));
            worst_tau = std::max(worst_tau, residual(apply(tau, phi), apply(A, phi) + apply(B, phi) + apply(C, phi)));
            worst_dd = std::max(worst_dd, apply(del, apply(del, phi)).max_abs());
        }
    CHECK(worst_lefschetz < 1e-12);
    CHECK(worst_tau < 1e-12);
    CHECK(worst_dd < 1e-12);
}
