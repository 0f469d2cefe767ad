#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hermitia/positivity.hpp"
#include "hermitia/samples.hpp"

using namespace hermitia;

TEST_CASE("positivity: verdicts from eigenvalue sums") {
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = -1.0;
    m(1, 1) = 2.0;
    m(2, 2) = 3.0;
    const auto r = p_positivity(m);
    CHECK(r.p_verdicts[0] == Verdict::Indefinite);
    CHECK(r.p_positive(2));
    CHECK(r.p_positive(3));
    CHECK_FALSE(r.p_nonnegative(1));

    CMatrix z = CMatrix::Zero(2, 2);
    z(1, 1) = 1.0;
    const auto rz = p_positivity(z);
    CHECK(rz.p_verdicts[0] == Verdict::Nonnegative);
    CHECK(rz.p_verdicts[1] == Verdict::Positive);
    CHECK(p_positivity(-CMatrix::Identity(2, 2)).p_negative(1));
}

TEST_CASE("positivity: non-Hermitian input is rejected") {
    CMatrix m = CMatrix::Identity(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(p_positivity(m), StructuralError);
}

TEST_CASE("positivity: sorted eigenvalue sums equal the exhaustive subset extremes (property)") {
    Rng rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 4;
        std::vector<double> e(n);
        for (auto& x : e) x = u(rng);
        std::sort(e.begin(), e.end());
        for (int p = 1; p <= n; ++p) {
            double lo = 0, hi = 0;
            for (int k = 0; k < p; ++k) {
                lo += e[k];
                hi += e[n - 1 - k];
            }
            CHECK(std::abs(subset_min_sum(e, p) - lo) < 1e-14);
            CHECK(std::abs(subset_max_sum(e, p) - hi) < 1e-14);
        }
    }
}

TEST_CASE("positivity: Griffiths form") {
    const auto flat = curvature_chern(metric_jet(MetricField::flat(2), {0.0, 0.0}));
    const auto g0 = griffiths_sample(flat, 20, 1);
    CHECK(std::abs(g0.minimum) < 1e-15);
    Rng rng(5);
    for (int n = 2; n <= 3; ++n) {
        const auto t = curvature_chern(metric_jet(MetricField::hopf(n), hopf_point(rng, n)));
        const auto g = griffiths_sample(t, 100, 7);
        CHECK(g.minimum >= -1e-12);
        CHECK(std::abs(griffiths_form(t, g.u, g.v).real() - g.minimum) < 1e-12);
    }
}

TEST_CASE("positivity: sign hypotheses on Hopf samples") {
    const auto f = MetricField::hopf(2);
    const auto pts = sample_points(f, 20, 3);
    const auto pos = vanishing_hypothesis_report(f, pts, HypothesisTensor::ChernSecond, HypothesisSign::Positive);
    CHECK(pos.holds);
    CHECK(pos.samples == 20);
    CHECK_FALSE(pos.statement.empty());
    const auto neg = vanishing_hypothesis_report(f, pts, HypothesisTensor::ChernSecond, HypothesisSign::Negative);
    CHECK_FALSE(neg.holds);
    CHECK(neg.failures.size() == 20);
}
