#include <doctest.h>

#include <cmath>

#include "hermitia/jet.hpp"
#include "hermitia/samples.hpp"

using namespace hermitia;

namespace {

Jet rand_jet(int n, int order, Rng& rng) {
    Jet j(n, order);
    for (int k = 0; k < j.size(); ++k) j[k] = random_complex(rng);
    return j;
}

}  // namespace

TEST_CASE("jet: constants and variables") {
    const auto c = Jet::constant(2, 3, cplx(2.0, -1.0));
    CHECK(c.value() == cplx(2.0, -1.0));
    CHECK(c.linear(0) == cplx(0.0));
    const auto z1 = Jet::variable(2, 3, 1, cplx(0.5));
    CHECK(z1.value() == cplx(0.5));
    CHECK(z1.linear(1) == cplx(1.0));
    CHECK(z1.linear(0) == cplx(0.0));
    CHECK(Jet(2, 3).is_zero());
}

TEST_CASE("jet: product of z and zbar has one mixed coefficient") {
    const auto z = Jet::variable(1, 2, 0);
    const auto zb = Jet::variable(1, 2, 1);
    const auto p = z * zb;
    CHECK(p.coeff({1}, {1}) == cplx(1.0));
    CHECK(p.coeff({2}, {0}) == cplx(0.0));
    CHECK(p.partial({0, 1}) == cplx(1.0));
}

TEST_CASE("jet: strict product rejects mismatched orders") {
    CHECK_THROWS_AS(mul(Jet(2, 2), Jet(2, 3)), StructuralError);
    CHECK_THROWS_AS(mul(Jet(2, 2), Jet(3, 2)), StructuralError);
    CHECK(mult(Jet::constant(2, 2, 2.0), Jet::constant(2, 4, 3.0)).order() == 2);
}

TEST_CASE("jet: geometric series inverse") {
    // 1/(1+z) = sum (-z)^k
    const auto f = Jet::variable(1, 5, 0, 1.0);
    const auto g = inverse(f);
    for (int k = 0; k <= 5; ++k) CHECK(std::abs(g.coeff({k}, {0}) - std::pow(-1.0, k)) < 1e-14);
    CHECK_THROWS_AS(inverse(Jet::variable(1, 3, 0)), SingularSeries);
}

TEST_CASE("jet: exp and log of 1 + f are inverse") {
    Rng rng(2);
    auto f = rand_jet(2, 4, rng);
    f[0] = 0.3;
    const auto back = exp(log(f + 1.0));
    CHECK((back - (f + 1.0)).max_abs() < 1e-12);
}

TEST_CASE("jet: Leibniz rule for derivatives (property)") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 3;
        const auto a = rand_jet(n, 4, rng);
        const auto b = rand_jet(n, 4, rng);
        for (int v = 0; v < 2 * n; ++v) {
            const auto lhs = d(a * b, v);
            const auto rhs = mult(d(a, v), b) + mult(a, d(b, v));
            CHECK((lhs - rhs).max_abs() < 1e-12);
        }
    }
}

TEST_CASE("jet: evaluation matches the polynomial product near the base point (property)") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = rand_jet(2, 3, rng);
        const auto b = rand_jet(2, 3, rng);
        const auto w0 = random_vector(rng, 2, 1e-3);
        std::vector<cplx> w = w0;
        for (auto v : w0) w.push_back(std::conj(v));
        const cplx direct = evaluate(a, w) * evaluate(b, w);
        // truncation drops degree >= 4 terms, each O(|w|^4)
        CHECK(std::abs(evaluate(a * b, w) - direct) < 1e-9);
    }
}

TEST_CASE("jet: conjugation swaps z and zbar") {
    const auto z = Jet::variable(2, 2, 0, cplx(1.0, 2.0));
    const auto c = conj(z);
    CHECK(c.value() == cplx(1.0, -2.0));
    CHECK(c.linear(2) == cplx(1.0));
    CHECK(c.linear(0) == cplx(0.0));
}

TEST_CASE("jetmat: inverse and determinant (property)") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int m = 2 + trial % 3;
        JetMat a(m, m, 2, 3);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                a(i, j) = rand_jet(2, 3, rng) * cplx(0.2);
                if (i == j) a(i, j) += 2.0;
            }
        const auto prod = a * inverse(a);
        CHECK(max_abs(prod - JetMat::identity(m, 2, 3)) < 1e-12);
        // det(A B) = det A det B
        const auto b = inverse(a);
        CHECK((determinant(a) * determinant(b) - Jet::constant(2, 3, 1.0)).max_abs() < 1e-12);
    }
}

TEST_CASE("jetmat: diagonal determinant") {
    auto a = JetMat::identity(3, 1, 2);
    a(0, 0) = Jet::constant(1, 2, 2.0);
    a(2, 2) = Jet::variable(1, 2, 0, 3.0);
    const auto det = determinant(a);
    CHECK(std::abs(det.value() - 6.0) < 1e-15);
    CHECK(std::abs(det.linear(0) - 2.0) < 1e-15);
}
