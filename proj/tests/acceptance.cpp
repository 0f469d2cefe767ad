// Acceptance run: one PASS/FAIL line per criterion, details indented below it.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hermitia/curvature.hpp"
#include "hermitia/flow.hpp"
#include "hermitia/forms.hpp"
#include "hermitia/hopf.hpp"
#include "hermitia/normal_point.hpp"
#include "hermitia/positivity.hpp"
#include "hermitia/samples.hpp"
#include "hermitia/structure.hpp"

using namespace hermitia;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;
    void note(const char* fmt, ...) __attribute__((format(printf, 2, 3)));
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            details.push_back("failed: " + what);
        }
    }
};

void Outcome::note(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    details.emplace_back(buf);
}

double tensor_diff(const CurvatureTensor& a, const CurvatureTensor& b) {
    double m = 0;
    for (size_t k = 0; k < a.c.size(); ++k) m = std::max(m, std::abs(a.c[k] - b.c[k]));
    return m;
}

double mat_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

CMatrix herm(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// ---- 1 ----
Outcome hopf_closed_forms() {
    Outcome o;
    std::map<std::string, double> worst;
    double quartic = 0, quarter = 0;
    int points = 0;
    for (int n = 2; n <= 4; ++n) {
        Rng rng(1000 + n);
        double q4 = 0, q1 = 0;
        for (int k = 0; k < 50; ++k) {
            const auto r = oracle_vs_pipeline(HopfPoint(n, hopf_point(rng, n, 1.0, 2.0)));
            for (const auto& q : r.residuals) worst[to_string(q.quantity)] = std::max(worst[to_string(q.quantity)], q.residual);
            q4 = std::max(q4, r.bismut_residual_quartic);
            q1 = std::max(q1, r.bismut_residual_quarter);
            ++points;
        }
        o.note("n=%d bismut ricci: quartic form residual %.2e, quarter-quadratic form residual %.2e", n, q4, q1);
        quartic = std::max(quartic, q4);
        quarter = std::max(quarter, q1);
    }
    double m = 0;
    for (const auto& [k, v] : worst) m = std::max(m, v);
    const bool quartic_matches = quartic <= quarter;
    const double chosen = std::min(quartic, quarter);
    o.note("%d points, max closed-form residual %.2e; matching bismut ricci form: %s (%.2e)", points, m,
           quartic_matches ? "quartic" : "quarter-quadratic", chosen);
    o.require(m <= 1e-10, "closed-form residual <= 1e-10");
    o.require(chosen <= 1e-10, "matching bismut ricci form residual <= 1e-10");
    return o;
}

// ---- 2 ----
Outcome kahler_coincidence() {
    Outcome o;
    double tens = 0, ric = 0;
    int pts = 0;
    for (int m = 0; m < 5; ++m) {
        Rng rng(2000 + m);
        const auto f = kahler_torus(2, rng);
        for (const auto& z : sample_points(f, 20, 2100 + m)) {
            const auto mj = metric_jet(f, z);
            const auto R = curvature_lc(mj);
            tens = std::max({tens, tensor_diff(curvature_chern(mj), R), tensor_diff(curvature_induced(mj), R),
                             tensor_diff(curvature_bismut(mj), R)});
            const auto F = ricci_family(mj);
            const CMatrix* all[] = {&F.theta1, &F.theta2, &F.induced1, &F.induced2,
                                    &F.bismut1, &F.bismut2, &F.hermitian, &F.complexified};
            for (const auto* a : all)
                for (const auto* b : all) ric = std::max(ric, mat_diff(*a, *b));
            ++pts;
        }
    }
    o.note("%d points on 5 Kahler torus metrics: max tensor difference %.2e, max Ricci variant spread %.2e", pts, tens,
           ric);
    o.require(tens <= 1e-9, "Chern / induced / Bismut tensors equal the Levi-Civita tensor");
    o.require(ric <= 1e-9, "eight Ricci variants agree");
    return o;
}

std::vector<MetricField> non_kahler_metrics(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<MetricField> out;
    for (int k = 0; k < count; ++k) {
        const int n = 2 + k % 3;
        if (k % 2 == 0) out.push_back(random_torus(n, rng));
        else out.push_back(MetricField::normal_form(random_normal_form(n, rng)));
    }
    return out;
}

Point metric_point(const MetricField& f, Rng& rng) {
    if (f.kind() == MetricKind::NormalForm) return random_vector(rng, f.n(), 0.05);
    if (f.kind() == MetricKind::Hopf) return hopf_point(rng, f.n());
    return random_vector(rng, f.n());
}

// ---- 3 ----
Outcome induced_dominance() {
    Outcome o;
    Rng rng(3000);
    double contraction = -INFINITY, eig1 = INFINITY, eig2 = INFINITY;
    int non_kahler = 0;
    for (const auto& f : non_kahler_metrics(20, 3100)) {
        const auto mj = metric_jet(f, metric_point(f, rng));
        if (!classify(mj).kahler) ++non_kahler;
        const int n = mj.n;
        const auto R = curvature_lc(mj), Rh = curvature_induced(mj);
        for (int t = 0; t < 100; ++t) {
            const auto u = random_vector(rng, n), v = random_vector(rng, n);
            cplx s = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            s += (R(i, j, k, l) - Rh(i, j, k, l)) * u[i] * std::conj(u[j]) * v[k] * std::conj(v[l]);
            contraction = std::max(contraction, s.real());
        }
        const auto F = ricci_family(mj);
        eig1 = std::min(eig1, min_eigenvalue(herm(F.induced1 - F.hermitian)));
        eig2 = std::min(eig2, min_eigenvalue(herm(F.induced2 - F.hermitian)));
    }
    o.note("%d/20 metrics non-Kahler at the sample; max (R - Rhat)(u,u,v,v) = %.2e", non_kahler, contraction);
    o.note("min eig(Rhat1 - R) = %.3e, min eig(Rhat2 - R) = %.3e", eig1, eig2);
    o.require(non_kahler == 20, "all metrics non-Kahler");
    o.require(contraction <= 1e-12, "contraction <= 1e-12");
    o.require(eig1 >= -1e-10 && eig2 >= -1e-10, "induced Ricci forms dominate the Hermitian Ricci");
    return o;
}

// ---- 4 ----
Outcome bianchi_routes() {
    Outcome o;
    Rng rng(4000);
    std::vector<MetricField> fields = non_kahler_metrics(10, 4100);
    for (int n = 2; n <= 4; ++n) fields.push_back(MetricField::hopf(n));
    for (int k = 0; k < 3; ++k) fields.push_back(kahler_torus(2 + k % 2, rng));
    for (int n = 2; n <= 4; ++n) {
        fields.push_back(MetricField::normal_form(balanced_normal_form(n, rng)));
        fields.push_back(MetricField::normal_form(skt_normal_form(n, rng)));
    }
    fields.push_back(MetricField::flat(3));
    double worst = 0;
    int evaluations = 0;
    for (const auto& f : fields)
        for (int k = 0; k < 5; ++k) {
            const auto mj = metric_jet(f, metric_point(f, rng));
            const auto t = curvature_lc(mj);
            worst = std::max(worst, mat_diff(ricci(t, mj, RicciFlavor::ComplexifiedRicci).m,
                                             complexified_ricci_bianchi(t, mj)));
            ++evaluations;
        }
    o.note("%zu metrics, %d points: max route difference %.2e", fields.size(), evaluations, worst);
    o.require(worst <= 1e-10, "routes agree to 1e-10");
    return o;
}

// ---- 5 ----
Outcome operator_identities() {
    Outcome o;
    Rng rng(5000);
    struct Case {
        std::string name;
        MetricField f;
        Point z;
    };
    std::vector<Case> cases = {{"flat n=2", MetricField::flat(2), {cplx(0.1, 0.2), cplx(-0.3, 0.1)}},
                               {"Hopf n=2", MetricField::hopf(2), hopf_point(rng, 2)},
                               {"Hopf n=3", MetricField::hopf(3), hopf_point(rng, 3)},
                               {"normal form n=2", MetricField::normal_form(random_normal_form(2, rng)), {0.0, 0.0}}};
    const std::vector<std::pair<std::string, std::vector<std::string>>> groups = {
        {"commutators with Lambda", {"[Lambda,A]+iBbar*", "[Lambda,B]+i(2Abar*+Bbar*+Cbar*)", "[Lambda,C]+iCbar*"}},
        {"torsion decomposition", {"tau=A+B+C"}},
        {"exterior derivative vs covariant", {"del-D1+B/2", "delbar-D2+Bbar/2"}},
        {"adjoint of D2", {"delta2-delta2_0+Cbar*/2", "delbar*-delta2_0+(Bbar*+Cbar*)/2"}},
        {"Kahler-type identities with torsion",
         {"[Lambda,D1]-i(delta2+Cbar*/2)", "[Lambda,del]-i(delbar*+taubar*)", "[delbar*,L]-i(del+tau)"}},
        {"torsion trace", {"delbar*w-iLambda(dw)", "iLambda(dw)-i eta dz", "C(1)-Lambda(2dw)"}},
        {"bundle identities (rank 2)",
         {"[delbarE*,L]-i(delE+tau)", "[delE*,L]+i(delbarE+taubar)", "[Lambda,delE]-i(delbarE*+taubar*)",
          "[Lambda,delbarE]+i(delE*+tau*)"}},
    };
    std::map<std::string, double> worst;
    double overall = 0;
    for (size_t c = 0; c < cases.size(); ++c) {
        const auto mj = metric_jet(cases[c].f, cases[c].z, 4);
        const auto scalar = identity_suite(mj, 20, 5100 + c);
        Rng crng(5200 + c);
        const auto conn = random_metric_connection(mj.n, 2, 3, crng);
        const auto bundle = bundle_identity_suite(mj, conn, 20, 5300 + c);
        double m = 0;
        for (const auto* rep : {&scalar, &bundle})
            for (const auto& r : rep->rows) {
                worst[r.name] = std::max(worst[r.name], r.residual);
                m = std::max(m, r.residual);
            }
        o.note("%s: max residual %.2e over %zu identities", cases[c].name.c_str(), m,
               scalar.rows.size() + bundle.rows.size());
        overall = std::max(overall, m);
    }
    for (const auto& [g, names] : groups) {
        double m = 0;
        for (const auto& nm : names) {
            if (!worst.count(nm)) {
                o.require(false, "identity '" + nm + "' was not evaluated");
                continue;
            }
            m = std::max(m, worst[nm]);
        }
        o.note("%-36s %.2e", g.c_str(), m);
        o.require(m <= 1e-9, g + " <= 1e-9");
    }
    o.require(overall <= 1e-9, "every identity <= 1e-9");
    return o;
}

// ---- 6 ----
Outcome normal_point_formulas() {
    Outcome o;
    for (int n = 2; n <= 4; ++n) {
        const auto rep = normal_point_suite(n, 10, 6000 + n);
        const auto bad = rep.failing(1e-9);
        o.note("n=%d: %zu formulas, max reference residual %.2e, max alternative residual %.2e", n, rep.rows.size(),
               rep.max_reference(), rep.max_alternative());
        for (const auto& b : bad) {
            double res = 0;
            for (const auto& r : rep.rows)
                if (!r.alternative && to_string(r.family) + "." + r.name == b) res = r.residual;
            o.note("  n=%d reference row %s residual %.3e", n, b.c_str(), res);
        }
        for (const auto& r : rep.rows)
            if (r.alternative)
                o.note("  n=%d alternative %s.%s residual %.3e", n, to_string(r.family).c_str(), r.name.c_str(),
                       r.residual);
        o.require(bad.empty(), "n=" + std::to_string(n) + " every reference formula <= 1e-9");
    }
    return o;
}

// ---- 7 ----
Outcome hopf_checklist() {
    Outcome o;
    for (int n = 2; n <= 3; ++n) {
        const auto f = MetricField::hopf(n);
        const auto pts = sample_points(f, 100, 7000 + n);
        int theta2_pos = 0, theta1_ok = 0, griff_ok = 0, herm_ok = 0, bismut_ok = 0, skt_ok = 0;
        double gmin = INFINITY, spec_err = 0;
        for (size_t p = 0; p < pts.size(); ++p) {
            const auto mj = metric_jet(f, pts[p], 2);
            double r2 = 0;
            for (auto v : pts[p]) r2 += std::norm(v);
            const auto F = ricci_family(mj);
            theta2_pos += p_positivity(herm(F.theta2)).p_positive(1);
            Eigen::SelfAdjointEigenSolver<CMatrix> es(herm(F.theta1));
            double err = std::abs(es.eigenvalues()(0));
            for (int k = 1; k < n; ++k) err = std::max(err, std::abs(es.eigenvalues()(k) - n / r2));
            spec_err = std::max(spec_err, err);
            theta1_ok += p_positivity(herm(F.theta1)).p_nonnegative(1) && err < 1e-10;
            const auto g = griffiths_sample(curvature_chern(mj), 100, 7100 + p);
            gmin = std::min(gmin, g.minimum);
            griff_ok += g.minimum >= -1e-12;
            const auto ph = p_positivity(herm(F.hermitian));
            herm_ok += ph.p_nonnegative(1) && ph.p_positive(2);
            if (n == 3) {
                const auto pb = p_positivity(herm(F.bismut1));
                bismut_ok += pb.p_nonpositive(1) && pb.p_negative(2);
            } else {
                bismut_ok += F.bismut1.cwiseAbs().maxCoeff() < 1e-12;
            }
            skt_ok += classify(mj).skt == (n == 2);
        }
        const int N = static_cast<int>(pts.size());
        o.note("n=%d: second Chern Ricci 1-positive %d/%d", n, theta2_pos, N);
        o.note("n=%d: first Chern Ricci nonnegative with spectrum {0, n/|z|^2} %d/%d (max spectrum error %.1e)", n,
               theta1_ok, N, spec_err);
        o.note("n=%d: Griffiths minimum >= -1e-12 %d/%d (min %.2e)", n, griff_ok, N, gmin);
        o.note("n=%d: Hermitian Ricci nonnegative and 2-positive %d/%d", n, herm_ok, N);
        o.note("n=%d: first Bismut Ricci %s %d/%d", n, n == 3 ? "nonpositive and 2-negative" : "identically zero",
               bismut_ok, N);
        o.note("n=%d: SKT verdict %s %d/%d", n, n == 2 ? "true" : "false", skt_ok, N);
        for (int c : {theta2_pos, theta1_ok, griff_ok, herm_ok, bismut_ok, skt_ok})
            o.require(c == N, "n=" + std::to_string(n) + " clause holds at every sample");
    }
    return o;
}

// ---- 8 ----
Outcome flow_checks() {
    Outcome o;
    {
        FlowConfig cfg;
        cfg.cadence = 1 << 20;
        const double mu = 0.1, T = 0.1;
        const auto r = run(MetricField::flat(2), 8, mu, T, cfg);
        const double expect = std::exp(mu * T);
        double rel = 0;
        for (int k = 0; k < r.final_state.sites(); ++k)
            rel = std::max(rel, (r.final_state.at(k) - expect * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() / expect);
        o.note("(a) flat torus n=2, N=8, mu=0.1, T=0.1: %d steps, max relative error %.2e", r.steps, rel);
        o.require(!r.halted && rel <= 1e-8, "(a) flat torus matches exp(mu t) I");
    }
    {
        double dev = 0;
        for (int n = 2; n <= 4; ++n)
            for (double t : {0.0, 0.1, 1.0, 10.0, 100.0})
                dev = std::max(dev, std::abs(hopf_self_similar(n, 1.0, (n - 1) / 4.0, t) - 1.0));
        const auto study = hopf_theta2_convergence(2, {16, 24, 32}, 20, 8000);
        o.note("(b) Hopf scale factor at mu=(n-1)/4: max |c(t) - 1| = %.1e", dev);
        o.note("(b) discrete second Chern Ricci on Hopf data: errors %.2e %.2e %.2e, observed orders %.2f %.2f",
               study.errors[0], study.errors[1], study.errors[2], study.orders[0], study.orders[1]);
        o.require(dev == 0.0, "(b) c(t) == 1 exactly");
        o.require(std::all_of(study.orders.begin(), study.orders.end(), [](double p) { return p >= 3.5; }),
                  "(b) fourth-order convergence");
    }
    {
        Rng rng(8100);
        const auto f = kahler_torus(2, rng);
        const auto r = run(f, 12, 0.0, 0.01);
        double worst = 0;
        for (const auto& d : r.series) worst = std::max(worst, d.kahler_defect);
        o.note("(c) Kahler torus n=2, N=12, T=0.01: %d steps, initial defect %.2e, max defect %.2e, final t %.4f", r.steps,
               r.series.front().kahler_defect, worst, r.final_state.t);
        o.require(!r.halted && worst <= 1e-6, "(c) Kahler defect <= 1e-6 throughout");
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"Hopf closed forms", hopf_closed_forms},
        {"Kahler coincidence of curvatures", kahler_coincidence},
        {"induced curvature dominates Levi-Civita", induced_dominance},
        {"complexified Ricci through the Bianchi identity", bianchi_routes},
        {"operator identities on forms", operator_identities},
        {"normal-point curvature formulas", normal_point_formulas},
        {"Hopf positivity checklist", hopf_checklist},
        {"second Chern Ricci flow", flow_checks},
    };
    int failed = 0;
    for (size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.details.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s [%zu] %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs);
        for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
