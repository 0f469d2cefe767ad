#include <doctest.h>

#include <cmath>

#include "hermitia/hopf.hpp"
#include "hermitia/positivity.hpp"
#include "hermitia/samples.hpp"
#include "hermitia/structure.hpp"

using namespace hermitia;

TEST_CASE("hopf: closed forms match the pipeline") {
    Rng rng(1);
    for (int n = 2; n <= 4; ++n)
        for (int k = 0; k < 10; ++k) {
            const auto r = oracle_vs_pipeline(HopfPoint(n, hopf_point(rng, n)));
            CHECK(r.max_residual() <= 1e-10);
            CHECK(r.bismut_form == BismutRicciForm::Quartic);
        }
}

TEST_CASE("hopf: the quarter-quadratic Bismut Ricci candidate is rejected for n >= 3") {
    Rng rng(2);
    for (int n = 3; n <= 4; ++n) {
        const auto r = oracle_vs_pipeline(HopfPoint(n, hopf_point(rng, n)));
        CHECK(r.bismut_residual_quartic < 1e-12);
        CHECK(r.bismut_residual_quarter > 1e-3);
    }
}

TEST_CASE("hopf: n=2 Bismut Ricci vanishes") {
    Rng rng(3);
    const HopfPoint p(2, hopf_point(rng, 2));
    for (auto q : {HopfQuantity::BismutFirst, HopfQuantity::BismutSecond})
        for (auto v : pipeline(p, q)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("hopf: n=3 first Bismut Ricci at (1,0,0)") {
    // (2-n)(delta |z|^2 - zbar^i z^j)/|z|^4 = -diag(0,1,1)
    const HopfPoint p(3, {1.0, 0.0, 0.0});
    const auto b = pipeline(p, HopfQuantity::BismutFirst);
    const double expect[9] = {0, 0, 0, 0, -1, 0, 0, 0, -1};
    for (int k = 0; k < 9; ++k) CHECK(std::abs(b[k] - expect[k]) < 1e-12);
}

TEST_CASE("hopf: invalid points") {
    CHECK_THROWS_AS(HopfPoint(2, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(HopfPoint(1, {1.0}), DomainError);
}

TEST_CASE("hopf: positivity checklist") {
    for (int n = 2; n <= 3; ++n) {
        const auto f = MetricField::hopf(n);
        for (const auto& z : sample_points(f, 20, 5)) {
            const auto mj = metric_jet(f, z, 2);
            const auto F = ricci_family(mj);
            CHECK(p_positivity(F.theta2).p_positive(1));
            CHECK(p_positivity(F.theta1).p_nonnegative(1));
            CHECK(p_positivity(F.hermitian).p_nonnegative(1));
            CHECK(p_positivity(F.hermitian).p_positive(2));
            if (n == 3) {
                CHECK(p_positivity(F.bismut1).p_nonpositive(1));
                CHECK(p_positivity(F.bismut1).p_negative(2));
            } else {
                CHECK(F.bismut1.cwiseAbs().maxCoeff() < 1e-12);
            }
            CHECK(classify(mj).skt == (n == 2));
        }
    }
}
