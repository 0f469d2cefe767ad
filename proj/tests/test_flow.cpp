#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "hermitia/flow.hpp"
#include "hermitia/samples.hpp"

using namespace hermitia;

TEST_CASE("flow: grid bookkeeping") {
    const auto s = FlowState::sample(MetricField::flat(2), 8, 0.0);
    CHECK(s.sites() == 8 * 8 * 8 * 8);
    const auto c = s.coords(123);
    CHECK(s.site(c) == 123);
    auto w = c;
    w[0] += 8;
    w[3] -= 16;
    CHECK(s.site(w) == 123);
    CHECK_THROWS_AS(FlowState::sample(MetricField::flat(2), 4, 0.0), DomainError);
}

TEST_CASE("flow: flat torus grows exponentially") {
    const double mu = 0.1, T = 0.05;
    const auto r = run(MetricField::flat(1), 8, mu, T);
    CHECK_FALSE(r.halted);
    CHECK(std::abs(r.final_state.t - T) < 1e-15);
    const double expect = std::exp(mu * T);
    for (int k = 0; k < r.final_state.sites(); ++k)
        CHECK(std::abs(r.final_state.at(k)(0, 0) - expect) / expect < 1e-10);
}

TEST_CASE("flow: discrete Theta2 is homogeneous of degree zero in the metric scale (property)") {
    // Theta2(c h) = Theta2(h)
    Rng rng(3);
    const auto f = random_torus(2, rng);
    auto s = FlowState::sample(f, 8, 0.0);
    auto s2 = s;
    for (auto& v : s2.h) v *= 2.5;
    for (int site : {0, 17, 400, 2000}) CHECK((theta2_discrete(s, site) - theta2_discrete(s2, site)).norm() < 1e-10);
}

TEST_CASE("flow: discrete Theta2 is Hermitian and vanishes on constant metrics") {
    Rng rng(4);
    const auto s = FlowState::sample(random_torus(2, rng), 8, 0.0);
    const auto t = theta2_discrete(s, 5);
    CHECK((t - t.adjoint()).norm() < 1e-14);
    const auto flat = FlowState::sample(MetricField::scaled(MetricField::flat(2), 3.0), 8, 0.0);
    CHECK(theta2_discrete(flat, 7).norm() < 1e-14);
}

TEST_CASE("flow: Hopf self-similar scale factor") {
    // dc/dt = mu c - (n-1)/4
    CHECK(hopf_self_similar(3, 1.0, 0.5, 3.7) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hopf_self_similar(2, 1.0, 0.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(hopf_self_similar(1, 2.0, 0.0, 5.0) == doctest::Approx(2.0));
    CHECK(hopf_extinction_time(2, 1.0, 0.0) == doctest::Approx(4.0));
    CHECK(std::isinf(hopf_extinction_time(3, 1.0, 0.5)));
    CHECK_THROWS_AS(hopf_self_similar(2, -1.0, 0.0, 1.0), DomainError);
    // closed form against an independent finite-difference derivative
    const double mu = 0.3, h = 1e-5;
    for (double t : {0.1, 0.5, 1.2}) {
        const double c = hopf_self_similar(3, 1.4, mu, t);
        const double dc = (hopf_self_similar(3, 1.4, mu, t + h) - hopf_self_similar(3, 1.4, mu, t - h)) / (2 * h);
        CHECK(std::abs(dc - (mu * c - 0.5)) < 1e-8);
    }
}

TEST_CASE("flow: discrete Theta2 on Hopf data converges at fourth order") {
    const auto study = hopf_theta2_convergence(2, {16, 24, 32}, 5, 1);
    REQUIRE(study.orders.size() == 2);
    for (double p : study.orders) CHECK(p > 3.5);
}

TEST_CASE("flow: Kahler single-mode data stays Kahler") {
    // one potential mode keeps discrete derivatives proportional, so the defect stays at rounding level
    Rng rng(5);
    const auto f = kahler_torus(2, rng, 1, 0.1);
    const auto r = run(f, 8, 0.0, 0.002);
    for (const auto& d : r.series) CHECK(d.kahler_defect < 1e-12);
}

TEST_CASE("flow: grid dump round trip") {
    Rng rng(6);
    auto s = FlowState::sample(random_torus(1, rng), 8, 0.25);
    s.t = 0.125;
    const auto back = read_grid_dump_csv(grid_dump_csv(s));
    CHECK(back.n == s.n);
    CHECK(back.N == s.N);
    CHECK(back.t == s.t);
    CHECK(back.mu == s.mu);
    for (size_t k = 0; k < s.h.size(); ++k) CHECK(back.h[k] == s.h[k]);
    CHECK_THROWS_AS(read_grid_dump_csv("garbage"), ParseError);
}

TEST_CASE("flow: Fourier fit reproduces a trigonometric metric") {
    Rng rng(7);
    const auto f = random_torus(1, rng, 2, 0.2);
    const auto s = FlowState::sample(f, 8, 0.0);
    const auto g = MetricField::torus(1, fit_torus_terms(s, 2));
    for (int k = 0; k < 5; ++k) {
        const auto z = random_vector(rng, 1);
        CHECK((f.evaluate(z) - g.evaluate(z)).norm() < 1e-12);
    }
}

TEST_CASE("flow: diagnostics CSV header") {
    const auto r = run(MetricField::flat(1), 8, 0.0, 0.001);
    const auto csv = diagnostics_csv(r.series);
    CHECK(csv.rfind("step,t,kahler_defect,min_eig,max_eig,einstein_residual,wall_seconds\n", 0) == 0);
}

TEST_CASE("flow: thread cap") {
    setenv("HERMITIA_THREADS", "1", 1);
    CHECK(worker_threads(8) == 1);
    setenv("HERMITIA_THREADS", "3", 1);
    CHECK(worker_threads(2) == 2);
    unsetenv("HERMITIA_THREADS");
    CHECK(worker_threads(4) == 4);
}

TEST_CASE("flow: loss of positivity halts the run") {
    // strong negative mu drives h to zero within T
    const auto r = run(MetricField::flat(1), 8, -2000.0, 1.0);
    CHECK(r.halted);
    CHECK_FALSE(r.halt_reason.empty());
}

TEST_CASE("flow: time integrator is fourth order on the flat linear ODE") {
    // h' = mu h from h = I with fixed steps; error ratio between dt and dt/2 close to 16
    auto err = [](double dt) {
        FlowConfig cfg;
        cfg.dt = dt;
        cfg.cadence = 1000;
        const auto r = run(MetricField::flat(1), 8, 1.0, 1.0, cfg);
        return std::abs(r.final_state.at(0)(0, 0) - std::exp(1.0));
    };
    const double e1 = err(0.1), e2 = err(0.05);
    CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("flow: non-Kahler start runs to the horizon") {
    Rng rng(8);
    const auto f = random_torus(2, rng);
    FlowConfig cfg;
    cfg.cadence = 2;
    const auto r = run(f, 8, 0.0, 0.002, cfg);
    CHECK_FALSE(r.halted);
    CHECK(r.final_state.t == doctest::Approx(0.002));
    CHECK(r.series.front().kahler_defect > 1e-3);
    for (const auto& d : r.series) CHECK(d.min_eig > 0.0);
    for (int k = 0; k < r.final_state.sites(); k += 97) {
        const CMatrix m = r.final_state.at(k);
        CHECK((m - m.adjoint()).norm() == 0.0);
    }
}
