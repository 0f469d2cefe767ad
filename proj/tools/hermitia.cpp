#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "hermitia/curvature.hpp"
#include "hermitia/flow.hpp"
#include "hermitia/forms.hpp"
#include "hermitia/hopf.hpp"
#include "hermitia/normal_point.hpp"
#include "hermitia/positivity.hpp"
#include "hermitia/samples.hpp"
#include "hermitia/structure.hpp"

#ifndef HERMITIA_VERSION
#define HERMITIA_VERSION "unknown"
#endif

using json = nlohmann::ordered_json;
using namespace hermitia;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kRuntime = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- shared configuration ----

struct MetricOptions {
    std::string metric;
    std::string metric_file;
    int dim = 2;
    std::uint64_t seed = 1;
    std::vector<std::string> points;
    int sample = 0;
    std::string format = "json";
    std::string output;
    double tol = -1.0;
};

void add_metric_options(CLI::App* app, MetricOptions& o, bool points) {
    auto* m = app->add_option("--metric", o.metric,
                              "built-in metric: flat, hopf, normal-form, balanced, skt, kahler-torus, random-torus");
    auto* f = app->add_option("--metric-file", o.metric_file, "torus metric file");
    m->excludes(f);
    f->excludes(m);
    app->add_option("--dim", o.dim, "complex dimension")->check(CLI::Range(1, 6));
    app->add_option("--seed", o.seed, "seed for random metrics and samplers");
    if (points) {
        app->add_option("--point", o.points, "coordinates re1,im1,...,ren,imn (repeatable)");
        app->add_option("--sample", o.sample, "number of sampled points")->check(CLI::NonNegativeNumber);
    }
    app->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--output", o.output, "write the report here instead of stdout");
    app->add_option("--tol", o.tol, "tolerance");
}

MetricField build_metric(const MetricOptions& o) {
    if (!o.metric_file.empty()) return ingest_torus_metric(o.metric_file);
    if (o.metric.empty()) throw UsageError("one of --metric or --metric-file is required");
    Rng rng(o.seed);
    const int n = o.dim;
    if (o.metric == "flat") return MetricField::flat(n);
    if (o.metric == "hopf") return MetricField::hopf(n);
    if (o.metric == "normal-form") return MetricField::normal_form(random_normal_form(n, rng));
    if (o.metric == "balanced") return MetricField::normal_form(balanced_normal_form(n, rng));
    if (o.metric == "skt") return MetricField::normal_form(skt_normal_form(n, rng));
    if (o.metric == "kahler-torus") return kahler_torus(n, rng);
    if (o.metric == "random-torus") return random_torus(n, rng);
    throw UsageError("unknown metric '" + o.metric + "'");
}

Point parse_point(const std::string& s, int n) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("bad coordinate '" + tok + "' in --point");
        }
    }
    if (static_cast<int>(v.size()) != 2 * n)
        throw UsageError("--point needs " + std::to_string(2 * n) + " reals, got " + std::to_string(v.size()));
    Point z(n);
    for (int j = 0; j < n; ++j) z[j] = cplx(v[2 * j], v[2 * j + 1]);
    return z;
}

std::vector<Point> resolve_points(const MetricOptions& o, const MetricField& f) {
    const int n = f.n();
    if (!o.points.empty() && o.sample > 0) throw UsageError("--point and --sample are exclusive");
    std::vector<Point> pts;
    for (const auto& s : o.points) pts.push_back(parse_point(s, n));
    if (o.sample > 0) pts = sample_points(f, o.sample, o.seed);
    if (pts.empty()) {
        Point z(n, cplx(0.0));
        if (f.kind() == MetricKind::Hopf) z[0] = 1.0;
        pts.push_back(z);
    }
    return pts;
}

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json mjson(const CMatrix& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(cjson(m(i, j)));
        a.push_back(row);
    }
    return a;
}

json pjson(const Point& z) {
    json a = json::array();
    for (auto v : z) {
        a.push_back(v.real());
        a.push_back(v.imag());
    }
    return a;
}

json header(const std::string& cmd, const json& cfg, std::uint64_t seed) {
    return {{"tool", "hermitia"}, {"version", HERMITIA_VERSION}, {"command", cmd}, {"config", cfg}, {"seed", seed}};
}

json metric_cfg(const MetricOptions& o) {
    json c;
    if (!o.metric_file.empty()) {
        c["metric_file"] = o.metric_file;
    } else {
        c["metric"] = o.metric;
        c["dim"] = o.dim;
    }
    c["seed"] = o.seed;
    if (!o.points.empty()) c["points"] = o.points;
    if (o.sample > 0) c["sample"] = o.sample;
    c["format"] = o.format;
    if (o.tol >= 0) c["tol"] = o.tol;
    return c;
}

void emit(const MetricOptions& o, const std::string& text) {
    if (o.output.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(o.output);
    if (!out) throw UsageError("cannot write " + o.output);
    out << text;
}

std::string csv_header_comment(const json& h) {
    return "# hermitia " + h["version"].get<std::string>() + " " + h["command"].get<std::string>() +
           " seed=" + std::to_string(h["seed"].get<std::uint64_t>()) + " config=" + h["config"].dump() + "\n";
}

// ---- curvature ----

struct CurvatureOptions {
    MetricOptions m;
    std::string connection = "chern";
    std::string what = "ricci";
};

CurvatureKind connection_kind(const std::string& s) {
    if (s == "lc") return CurvatureKind::LeviCivita;
    if (s == "induced") return CurvatureKind::Induced;
    if (s == "chern") return CurvatureKind::Chern;
    if (s == "bismut") return CurvatureKind::Bismut;
    throw UsageError("unknown connection '" + s + "'");
}

int cmd_curvature(const CurvatureOptions& o) {
    const auto field = build_metric(o.m);
    const auto pts = resolve_points(o.m, field);
    std::vector<std::string> conns;
    if (o.connection == "all") conns = {"lc", "induced", "chern", "bismut"};
    else conns = {o.connection};
    for (const auto& c : conns) connection_kind(c);
    const bool tensor = o.what == "tensor" || o.what == "all";
    const bool r1 = o.what == "ricci1" || o.what == "ricci" || o.what == "all";
    const bool r2 = o.what == "ricci2" || o.what == "ricci" || o.what == "all";
    const bool sc = o.what == "scalars" || o.what == "all";
    if (!(tensor || r1 || r2 || sc)) throw UsageError("unknown --what '" + o.what + "'");

    json cfg = metric_cfg(o.m);
    cfg["connection"] = o.connection;
    cfg["what"] = o.what;
    json rep = header("curvature", cfg, o.m.seed);
    std::ostringstream csv;
    csv.precision(17);
    if (o.m.format == "csv") {
        csv << csv_header_comment(rep);
        csv << (sc && !tensor && !r1 && !r2 ? "point_index,s_h_re,s_h_im,S_re,S_im,S_lc_re,S_lc_im,S_ch_re,S_ch_im,S_bm_re,S_bm_im\n"
                                            : "point_index,connection,quantity,i,j,k,l,re,im\n");
    }
    json jpts = json::array();
    for (size_t p = 0; p < pts.size(); ++p) {
        const auto mj = metric_jet(field, pts[p], 2);
        json jp = {{"point", pjson(pts[p])}};
        for (const auto& cname : conns) {
            const auto t = curvature(mj, connection_kind(cname));
            json jc;
            auto mat_rows = [&](const std::string& q, const CMatrix& m) {
                for (int i = 0; i < m.rows(); ++i)
                    for (int j = 0; j < m.cols(); ++j)
                        csv << p << ',' << cname << ',' << q << ',' << i << ',' << j << ",,," << m(i, j).real() << ','
                            << m(i, j).imag() << '\n';
            };
            if (tensor) {
                json a = json::array();
                for (int i = 0; i < mj.n; ++i)
                    for (int j = 0; j < mj.n; ++j)
                        for (int k = 0; k < mj.n; ++k)
                            for (int l = 0; l < mj.n; ++l) {
                                a.push_back({{"i", i}, {"j", j}, {"k", k}, {"l", l}, {"value", cjson(t(i, j, k, l))}});
                                if (o.m.format == "csv")
                                    csv << p << ',' << cname << ",tensor," << i << ',' << j << ',' << k << ',' << l << ','
                                        << t(i, j, k, l).real() << ',' << t(i, j, k, l).imag() << '\n';
                            }
                jc["tensor"] = a;
            }
            if (r1) {
                const auto m = ricci(t, mj, RicciFlavor::First).m;
                jc["ricci1"] = mjson(m);
                if (o.m.format == "csv") mat_rows("ricci1", m);
            }
            if (r2) {
                const auto m = ricci(t, mj, RicciFlavor::Second).m;
                jc["ricci2"] = mjson(m);
                if (o.m.format == "csv") mat_rows("ricci2", m);
            }
            if (cname == "lc" && (r1 || r2)) {
                const auto h = ricci(t, mj, RicciFlavor::HermitianRicci).m;
                const auto c = ricci(t, mj, RicciFlavor::ComplexifiedRicci).m;
                jc["hermitian_ricci"] = mjson(h);
                jc["complexified_ricci"] = mjson(c);
                if (o.m.format == "csv") {
                    mat_rows("hermitian_ricci", h);
                    mat_rows("complexified_ricci", c);
                }
            }
            if (!jc.empty()) jp[cname] = jc;
        }
        if (sc) {
            const auto s = scalars(mj);
            jp["scalars"] = {{"s_h", cjson(s.s_h)}, {"S", cjson(s.S)}, {"S_lc", cjson(s.S_lc)},
                             {"S_ch", cjson(s.S_ch)}, {"S_bm", cjson(s.S_bm)}};
            if (o.m.format == "csv") {
                if (!tensor && !r1 && !r2) {
                    csv << p;
                    for (auto v : {s.s_h, s.S, s.S_lc, s.S_ch, s.S_bm}) csv << ',' << v.real() << ',' << v.imag();
                    csv << '\n';
                } else {
                    const std::pair<const char*, cplx> named[] = {
                        {"s_h", s.s_h}, {"S", s.S}, {"S_lc", s.S_lc}, {"S_ch", s.S_ch}, {"S_bm", s.S_bm}};
                    for (const auto& [nm, v] : named)
                        csv << p << ",," << nm << ",,,,," << v.real() << ',' << v.imag() << '\n';
                }
            }
        }
        jpts.push_back(jp);
    }
    rep["points"] = jpts;
    emit(o.m, o.m.format == "csv" ? csv.str() : rep.dump(2));
    return kPass;
}

// ---- check ----

struct CheckOptions {
    MetricOptions m;
    int griffiths_trials = 200;
};

int cmd_check(const CheckOptions& o) {
    const auto field = build_metric(o.m);
    const auto pts = resolve_points(o.m, field);
    const double tol = o.m.tol >= 0 ? o.m.tol : kClassifyTol;
    const int n = field.n();
    json cfg = metric_cfg(o.m);
    cfg["griffiths_trials"] = o.griffiths_trials;
    json rep = header("check", cfg, o.m.seed);

    bool kahler = true, balanced = true, skt = true;
    double kd = 0, bd = 0, sd = 0;
    json per = json::array();
    struct Tracked {
        std::string name;
        std::vector<int> weak_fail, strict;  // counts per p
        std::vector<double> worst_lo, worst_hi;
        std::vector<Point> lo_witness, hi_witness;
    };
    const std::vector<std::string> names = {"chern_second_ricci", "chern_first_ricci", "hermitian_ricci",
                                            "bismut_first_ricci", "bismut_second_ricci"};
    std::vector<Tracked> tr;
    for (const auto& nm : names)
        tr.push_back({nm, std::vector<int>(n, 0), std::vector<int>(n, 0), std::vector<double>(n, INFINITY),
                      std::vector<double>(n, -INFINITY), std::vector<Point>(n), std::vector<Point>(n)});
    std::vector<std::map<std::string, int>> verdict_counts(names.size() * n);
    double griffiths_min = INFINITY;
    Point griffiths_point;
    std::vector<cplx> gu, gv;
    for (size_t p = 0; p < pts.size(); ++p) {
        const auto mj = metric_jet(field, pts[p], 2);
        const auto c = classify(mj, tol);
        kahler &= c.kahler;
        balanced &= c.balanced;
        skt &= c.skt;
        kd = std::max(kd, c.kahler_defect);
        bd = std::max(bd, c.balanced_defect);
        sd = std::max(sd, c.skt_traced_defect);
        per.push_back({{"point", pjson(pts[p])},
                       {"kahler_defect", c.kahler_defect},
                       {"balanced_defect", c.balanced_defect},
                       {"skt_defect", c.skt_defect},
                       {"skt_traced_defect", c.skt_traced_defect}});
        const auto F = ricci_family(mj);
        const CMatrix mats[] = {F.theta2, F.theta1, F.hermitian, F.bismut1, F.bismut2};
        for (size_t t = 0; t < names.size(); ++t) {
            const CMatrix herm = 0.5 * (mats[t] + mats[t].adjoint());
            const auto pr = p_positivity(herm);
            for (int q = 1; q <= n; ++q) {
                verdict_counts[t * n + q - 1][to_string(pr.p_verdicts[q - 1])]++;
                double lo = 0, hi = 0;
                for (int k = 0; k < q; ++k) {
                    lo += pr.eigenvalues[k];
                    hi += pr.eigenvalues[n - 1 - k];
                }
                if (lo < tr[t].worst_lo[q - 1]) {
                    tr[t].worst_lo[q - 1] = lo;
                    tr[t].lo_witness[q - 1] = pts[p];
                }
                if (hi > tr[t].worst_hi[q - 1]) {
                    tr[t].worst_hi[q - 1] = hi;
                    tr[t].hi_witness[q - 1] = pts[p];
                }
            }
        }
        const auto g = griffiths_sample(curvature_chern(mj), o.griffiths_trials, o.m.seed + p);
        if (g.minimum < griffiths_min) {
            griffiths_min = g.minimum;
            griffiths_point = pts[p];
            gu = g.u;
            gv = g.v;
        }
    }
    rep["points_checked"] = pts.size();
    rep["kahler"] = kahler;
    rep["balanced"] = balanced;
    rep["skt"] = skt;
    rep["max_defects"] = {{"kahler", kd}, {"balanced", bd}, {"skt_traced", sd}};
    json pos = json::object();
    for (size_t t = 0; t < names.size(); ++t) {
        json arr = json::array();
        for (int q = 1; q <= n; ++q) {
            json counts = json::object();
            for (const auto& [k, v] : verdict_counts[t * n + q - 1]) counts[k] = v;
            arr.push_back({{"p", q},
                           {"verdicts", counts},
                           {"min_low_sum", tr[t].worst_lo[q - 1]},
                           {"min_low_sum_at", pjson(tr[t].lo_witness[q - 1])},
                           {"max_high_sum", tr[t].worst_hi[q - 1]},
                           {"max_high_sum_at", pjson(tr[t].hi_witness[q - 1])}});
        }
        pos[names[t]] = arr;
    }
    rep["positivity"] = pos;
    json gw = {{"minimum", griffiths_min}, {"at", pjson(griffiths_point)}, {"trials_per_point", o.griffiths_trials}};
    json ju = json::array(), jv = json::array();
    for (auto v : gu) ju.push_back(cjson(v));
    for (auto v : gv) jv.push_back(cjson(v));
    gw["u"] = ju;
    gw["v"] = jv;
    rep["griffiths_chern"] = gw;
    json hyp = json::array();
    for (auto t : {HypothesisTensor::ChernSecond, HypothesisTensor::ChernFirst, HypothesisTensor::HermitianRicci,
                   HypothesisTensor::BismutFirst, HypothesisTensor::BismutSecond})
        for (auto s : {HypothesisSign::Positive, HypothesisSign::Negative}) {
            const auto h = vanishing_hypothesis_report(field, pts, t, s, 1);
            hyp.push_back({{"tensor", to_string(t)},
                           {"sign", s == HypothesisSign::Positive ? "positive" : "negative"},
                           {"holds", h.holds},
                           {"statement", h.statement}});
        }
    rep["sign_hypotheses"] = hyp;
    rep["per_point"] = per;
    if (o.m.format == "csv") {
        std::ostringstream csv;
        csv.precision(17);
        csv << csv_header_comment(rep) << "point_index,kahler_defect,balanced_defect,skt_defect,skt_traced_defect\n";
        for (size_t p = 0; p < per.size(); ++p)
            csv << p << ',' << per[p]["kahler_defect"].get<double>() << ',' << per[p]["balanced_defect"].get<double>()
                << ',' << per[p]["skt_defect"].get<double>() << ',' << per[p]["skt_traced_defect"].get<double>() << '\n';
        csv << "# kahler=" << kahler << " balanced=" << balanced << " skt=" << skt << '\n';
        emit(o.m, csv.str());
    } else {
        emit(o.m, rep.dump(2));
    }
    return kPass;
}

// ---- verify ----

struct VerifyOptions {
    MetricOptions m;
    std::string suite;
    int trials = 20;
    int points = 50;
    int metrics = 10;
    int rank = 2;
};

json residual_rows(const IdentityReport& r) {
    json a = json::array();
    for (const auto& x : r.rows) a.push_back({{"identity", x.name}, {"residual", x.residual}});
    return a;
}

int cmd_verify(const VerifyOptions& o) {
    json cfg = o.suite == "hopf-oracle" || o.suite == "normal-form" ? json::object() : metric_cfg(o.m);
    cfg["suite"] = o.suite;
    if (o.m.metric_file.empty()) cfg["dim"] = o.m.dim;
    cfg["seed"] = o.m.seed;
    cfg["format"] = o.m.format;
    json rep;
    bool pass = true;
    std::ostringstream csv;
    csv.precision(17);

    if (o.suite == "appendix") {
        const double tol = o.m.tol >= 0 ? o.m.tol : 1e-9;
        cfg["trials"] = o.trials;
        cfg["rank"] = o.rank;
        cfg["tol"] = tol;
        rep = header("verify", cfg, o.m.seed);
        const auto field = build_metric(o.m);
        const auto pts = resolve_points(o.m, field);
        json jp = json::array();
        csv << csv_header_comment(rep) << "point_index,suite,identity,residual\n";
        for (size_t p = 0; p < pts.size(); ++p) {
            const auto mj = metric_jet(field, pts[p], 4);
            const auto scalar = identity_suite(mj, o.trials, o.m.seed + p);
            Rng rng(o.m.seed + 1000 + p);
            const auto conn = random_metric_connection(mj.n, o.rank, 3, rng);
            const auto bundle = bundle_identity_suite(mj, conn, o.trials, o.m.seed + 2000 + p);
            pass &= scalar.max_residual() <= tol && bundle.max_residual() <= tol;
            jp.push_back({{"point", pjson(pts[p])},
                          {"scalar_forms", residual_rows(scalar)},
                          {"bundle_forms", residual_rows(bundle)},
                          {"max_residual", std::max(scalar.max_residual(), bundle.max_residual())}});
            for (const auto& x : scalar.rows) csv << p << ",scalar," << x.name << ',' << x.residual << '\n';
            for (const auto& x : bundle.rows) csv << p << ",bundle," << x.name << ',' << x.residual << '\n';
        }
        rep["points"] = jp;
    } else if (o.suite == "hopf-oracle") {
        const double tol = o.m.tol >= 0 ? o.m.tol : 1e-10;
        cfg["points"] = o.points;
        cfg["tol"] = tol;
        rep = header("verify", cfg, o.m.seed);
        if (o.m.dim < 2) throw UsageError("hopf-oracle needs --dim >= 2");
        Rng rng(o.m.seed);
        std::map<std::string, double> worst;
        double quartic = 0, quarter = 0;
        for (int k = 0; k < o.points; ++k) {
            const auto r = oracle_vs_pipeline(HopfPoint(o.m.dim, hopf_point(rng, o.m.dim)));
            for (const auto& q : r.residuals) worst[to_string(q.quantity)] = std::max(worst[to_string(q.quantity)], q.residual);
            quartic = std::max(quartic, r.bismut_residual_quartic);
            quarter = std::max(quarter, r.bismut_residual_quarter);
        }
        const auto chosen = quartic <= quarter ? BismutRicciForm::Quartic : BismutRicciForm::QuarterQuadratic;
        const double chosen_res = std::min(quartic, quarter);
        json table = json::array();
        csv << csv_header_comment(rep) << "quantity,residual\n";
        for (const auto& [k, v] : worst) {
            table.push_back({{"quantity", k}, {"residual", v}});
            csv << k << ',' << v << '\n';
            pass &= v <= tol;
        }
        pass &= chosen_res <= tol;
        rep["residuals"] = table;
        rep["bismut_ricci"] = {{"quartic_residual", quartic},
                               {"quarter_quadratic_residual", quarter},
                               {"matching_form", to_string(chosen)}};
        csv << "bismut_ricci[quartic]," << quartic << "\nbismut_ricci[quarter_quadratic]," << quarter << '\n';
    } else if (o.suite == "normal-form") {
        const double tol = o.m.tol >= 0 ? o.m.tol : 1e-9;
        cfg["metrics"] = o.metrics;
        cfg["tol"] = tol;
        rep = header("verify", cfg, o.m.seed);
        const auto r = normal_point_suite(o.m.dim, o.metrics, o.m.seed);
        json table = json::array();
        csv << csv_header_comment(rep) << "family,formula,alternative,residual\n";
        for (const auto& x : r.rows) {
            table.push_back({{"family", to_string(x.family)},
                             {"formula", x.name},
                             {"alternative", x.alternative},
                             {"residual", x.residual},
                             {"within_tol", x.residual <= tol}});
            csv << to_string(x.family) << ',' << x.name << ',' << (x.alternative ? 1 : 0) << ',' << x.residual << '\n';
        }
        const auto failing = r.failing(tol);
        pass = failing.empty();
        rep["rows"] = table;
        rep["failing_reference_rows"] = failing;
    } else {
        throw UsageError("unknown --suite '" + o.suite + "' (appendix, hopf-oracle, normal-form)");
    }
    rep["pass"] = pass;
    emit(o.m, o.m.format == "csv" ? csv.str() + (pass ? "# pass\n" : "# FAIL\n") : rep.dump(2));
    return pass ? kPass : kFail;
}

// ---- flow ----

struct FlowOptions {
    MetricOptions m;
    bool hopf_ode = false;
    double mu = 0.0;
    double c0 = 1.0;
    double T = 0.1;
    int grid = 8;
    int cadence = 1;
    double dt = 0.0;
    int samples = 11;
    std::string dump;
    std::string fit;
    int fit_freq = 2;
};

int cmd_flow(const FlowOptions& o) {
    json cfg;
    cfg["hopf_ode"] = o.hopf_ode;
    cfg["mu"] = o.mu;
    cfg["T"] = o.T;
    cfg["format"] = o.m.format;
    if (o.T < 0) throw UsageError("--T must be nonnegative");
    if (o.hopf_ode) {
        cfg["dim"] = o.m.dim;
        cfg["c0"] = o.c0;
        cfg["samples"] = o.samples;
        json rep = header("flow", cfg, o.m.seed);
        const int steps = std::max(o.samples - 1, 1);
        json series = json::array();
        std::ostringstream csv;
        csv.precision(17);
        csv << csv_header_comment(rep) << "t,c\n";
        for (int k = 0; k <= steps; ++k) {
            const double t = o.T * k / steps;
            const double c = hopf_self_similar(o.m.dim, o.c0, o.mu, t);
            series.push_back({{"t", t}, {"c", c}});
            csv << t << ',' << c << '\n';
        }
        const double ext = hopf_extinction_time(o.m.dim, o.c0, o.mu);
        rep["series"] = series;
        rep["extinction_time"] = std::isinf(ext) ? json(nullptr) : json(ext);
        emit(o.m, o.m.format == "csv" ? csv.str() : rep.dump(2));
        return kPass;
    }
    cfg.update(metric_cfg(o.m));
    cfg["grid"] = o.grid;
    cfg["cadence"] = o.cadence;
    cfg["dt"] = o.dt;
    json rep = header("flow", cfg, o.m.seed);
    const auto field = build_metric(o.m);
    FlowConfig fc;
    fc.dt = o.dt;
    fc.cadence = o.cadence;
    const auto r = run(field, o.grid, o.mu, o.T, fc);
    if (!o.dump.empty()) {
        std::ofstream out(o.dump);
        if (!out) throw UsageError("cannot write " + o.dump);
        out << grid_dump_csv(r.final_state);
    }
    if (!o.fit.empty()) {
        std::ofstream out(o.fit);
        if (!out) throw UsageError("cannot write " + o.fit);
        out << format_torus_metric(r.final_state.n, fit_torus_terms(r.final_state, o.fit_freq));
    }
    if (o.m.format == "csv") {
        emit(o.m, csv_header_comment(rep) + diagnostics_csv(r.series) + (r.halted ? "# halted: " + r.halt_reason + "\n" : ""));
    } else {
        json series = json::array();
        for (const auto& d : r.series)
            series.push_back({{"step", d.step},
                              {"t", d.t},
                              {"kahler_defect", d.kahler_defect},
                              {"min_eig", d.min_eig},
                              {"max_eig", d.max_eig},
                              {"einstein_residual", d.einstein_residual},
                              {"wall_seconds", d.wall_seconds}});
        rep["series"] = series;
        rep["steps"] = r.steps;
        rep["final_t"] = r.final_state.t;
        rep["final_h_site0"] = mjson(r.final_state.at(0));
        rep["halted"] = r.halted;
        if (r.halted) rep["halt"] = {{"reason", r.halt_reason}, {"site", r.halt_site}};
        emit(o.m, rep.dump(2));
    }
    return r.halted ? kRuntime : kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curvature, structure checks, identity verification and curvature flow for Hermitian metrics"};
    app.set_version_flag("--version", std::string(HERMITIA_VERSION));
    app.require_subcommand(1);

    CurvatureOptions co;
    auto* curv = app.add_subcommand("curvature", "curvature tensors, Ricci matrices and scalars at points");
    add_metric_options(curv, co.m, true);
    curv->add_option("--connection", co.connection, "lc, induced, chern, bismut or all");
    curv->add_option("--what", co.what, "tensor, ricci1, ricci2, ricci, scalars or all");

    CheckOptions ko;
    auto* check = app.add_subcommand("check", "Kahler / balanced / SKT verdicts and positivity checklists");
    add_metric_options(check, ko.m, true);
    check->add_option("--griffiths-trials", ko.griffiths_trials, "random (u,v) pairs per point")->check(CLI::PositiveNumber);

    VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "run a verification suite; exit 1 when a residual exceeds --tol");
    add_metric_options(verify, vo.m, true);
    verify->add_option("--suite", vo.suite, "appendix, hopf-oracle or normal-form")->required();
    verify->add_option("--trials", vo.trials, "random forms per point (appendix)")->check(CLI::PositiveNumber);
    verify->add_option("--points", vo.points, "random points (hopf-oracle)")->check(CLI::PositiveNumber);
    verify->add_option("--metrics", vo.metrics, "random metrics per family (normal-form)")->check(CLI::PositiveNumber);
    verify->add_option("--rank", vo.rank, "bundle rank (appendix)")->check(CLI::Range(1, 4));

    FlowOptions fo;
    auto* flow = app.add_subcommand("flow", "second-Ricci-Chern flow on a torus grid, or the Hopf scale ODE");
    add_metric_options(flow, fo.m, false);
    flow->add_flag("--hopf-ode", fo.hopf_ode, "integrate the Hopf self-similar scale factor instead of a grid");
    flow->add_option("--mu", fo.mu, "flow parameter mu");
    flow->add_option("--c0", fo.c0, "initial scale factor (Hopf ODE)");
    flow->add_option("--T", fo.T, "time horizon");
    flow->add_option("--grid", fo.grid, "points per axis")->check(CLI::Range(8, 256));
    flow->add_option("--cadence", fo.cadence, "diagnostics every k steps")->check(CLI::PositiveNumber);
    flow->add_option("--dt", fo.dt, "fixed time step (default: automatic)");
    flow->add_option("--samples", fo.samples, "series length for the Hopf ODE")->check(CLI::PositiveNumber);
    flow->add_option("--dump", fo.dump, "write the final grid as CSV");
    flow->add_option("--fit", fo.fit, "write a Fourier fit of the final grid as a torus metric file");
    flow->add_option("--fit-freq", fo.fit_freq, "largest frequency in the fit")->check(CLI::Range(0, 4));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }
    try {
        if (*curv) return cmd_curvature(co);
        if (*check) return cmd_check(ko);
        if (*verify) return cmd_verify(vo);
        if (*flow) return cmd_flow(fo);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
