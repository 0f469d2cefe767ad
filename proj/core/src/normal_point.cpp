#include "hermitia/normal_point.hpp"

#include <algorithm>
#include <functional>

#include "hermitia/samples.hpp"

namespace hermitia {

std::string to_string(FormulaFamily f) {
    switch (f) {
        case FormulaFamily::General: return "general";
        case FormulaFamily::Balanced: return "balanced";
        case FormulaFamily::Pluriclosed: return "pluriclosed";
    }
    return "?";
}

NormalPointData normal_point_data(const MetricJet& mj, double tol) {
    if (mj.order < 2) throw OrderExhausted("normal_point_data: metric jet order >= 2 required");
    const int n = mj.n;
    if ((mj.h0() - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > tol)
        throw PreconditionError("normal point: h is not the identity");
    const auto lc = levi_civita(mj);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (std::abs(lc(i, j, k).value()) > tol)
                    throw PreconditionError("normal point: holomorphic Christoffel symbols do not vanish");
    NormalPointData d;
    d.n = n;
    d.first_z.resize(n * n * n);
    d.first_zb.resize(n * n * n);
    d.second.resize(n * n * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Jet& h = mj.h(i, j);
            for (int k = 0; k < n; ++k) {
                d.first_z[(i * n + j) * n + k] = h.linear(k);
                d.first_zb[(i * n + j) * n + k] = h.linear(n + k);
                for (int l = 0; l < n; ++l) d.second[((i * n + j) * n + k) * n + l] = h.partial({k, n + l});
            }
        }
    return d;
}

namespace {

using Entry = std::function<cplx(int, int)>;

CMatrix build(int n, const Entry& f) {
    CMatrix m(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) m(k, l) = f(k, l);
    return m;
}

double diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Sums over the inner index pair used throughout.
struct Terms {
    const NormalPointData& d;
    int n;
    cplx tr(int k, int l) const {  // sum_i d_k d_lbar h_{i ibar}
        cplx s = 0.0;
        for (int i = 0; i < n; ++i) s += d.d2(i, i, k, l);
        return s;
    }
    cplx lap(int k, int l) const {  // sum_i d_i d_ibar h_{k lbar}
        cplx s = 0.0;
        for (int i = 0; i < n; ++i) s += d.d2(k, l, i, i);
        return s;
    }
    cplx p1(int k, int l) const {  // sum d_ibar h_{q lbar} d_i h_{k qbar}
        cplx s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < n; ++q) s += d.dzb(q, l, i) * d.dz(k, q, i);
        return s;
    }
    cplx p2(int k, int l) const {  // sum d_ibar h_{k qbar} d_i h_{q lbar}
        cplx s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < n; ++q) s += d.dzb(k, q, i) * d.dz(q, l, i);
        return s;
    }
    cplx p3(int k, int l) const {  // sum d_i h_{q lbar} d_ibar h_{k qbar}
        cplx s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < n; ++q) s += d.dz(q, l, i) * d.dzb(k, q, i);
        return s;
    }
    cplx mixed_traces(int k, int l) const {
        // sum (d_k h_{q lbar} d_ibar h_{i qbar} + d_i h_{q ibar} d_lbar h_{k qbar})
        cplx s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < n; ++q) s += d.dz(q, l, k) * d.dzb(i, q, i) + d.dz(q, i, i) * d.dzb(k, q, l);
        return s;
    }
};

double tensor_diff(const CurvatureTensor& t, int n, const std::function<cplx(int, int, int, int)>& f) {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) m = std::max(m, std::abs(t(i, j, k, l) - f(i, j, k, l)));
    return m;
}

CMatrix contract_cross(const CurvatureTensor& t, const MetricJet& mj, bool swapped) {
    const int n = t.n;
    const CMatrix P = mj.up0();
    CMatrix m = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(k, l) += P(i, j) * (swapped ? t(i, l, k, j) : t(k, j, i, l));
    return m;
}

double min_eig(const CMatrix& m) { return min_eigenvalue(0.5 * (m + m.adjoint())); }

}  // namespace

std::vector<FormulaRow> general_formulas(const MetricJet& mj) {
    const auto d = normal_point_data(mj);
    const int n = d.n;
    const Terms T{d, n};
    const auto lc = curvature_lc(mj), ind = curvature_induced(mj), bm = curvature_bismut(mj);
    std::vector<FormulaRow> rows;
    auto add = [&](const std::string& name, double r) { rows.push_back({name, FormulaFamily::General, false, r}); };

    add("lc_tensor", tensor_diff(lc, n, [&](int i, int j, int k, int l) {
            cplx s = -0.5 * (d.d2(i, l, k, j) + d.d2(k, j, i, l));
            for (int q = 0; q < n; ++q) s -= d.dz(q, l, i) * d.dzb(k, q, j) + d.dz(q, j, k) * d.dzb(i, q, l);
            return s;
        }));
    auto half_mixed = [&](int k, int l) {
        cplx s = 0.0;
        for (int i = 0; i < n; ++i) s += d.d2(i, l, k, i) + d.d2(k, i, i, l);
        return 0.5 * s;
    };
    const CMatrix hr = build(n, [&](int k, int l) { return -half_mixed(k, l) - T.p3(k, l) - T.p1(k, l); });
    add("hermitian_ricci", diff(ricci(lc, mj, RicciFlavor::HermitianRicci).m, hr));
    const CMatrix cross = build(n, [&](int k, int l) { return -0.5 * (T.lap(k, l) + T.tr(k, l)) - T.mixed_traces(k, l); });
    add("lc_cross_trace", diff(contract_cross(lc, mj, false), cross));
    add("lc_cross_trace_swapped", diff(contract_cross(lc, mj, true), cross));
    const CMatrix cr = build(n, [&](int k, int l) {
        return half_mixed(k, l) - (T.lap(k, l) + T.tr(k, l)) + T.p3(k, l) + T.p1(k, l) - 2.0 * T.mixed_traces(k, l);
    });
    add("complexified_ricci", diff(ricci(lc, mj, RicciFlavor::ComplexifiedRicci).m, cr));

    add("induced_tensor", tensor_diff(ind, n, [&](int i, int j, int k, int l) {
            cplx s = -0.5 * (d.d2(i, l, k, j) + d.d2(k, j, i, l));
            for (int q = 0; q < n; ++q) s -= d.dz(q, l, i) * d.dzb(k, q, j);
            return s;
        }));
    auto induced_common = [&](int i, int j) {
        cplx s = 0.0;
        for (int k = 0; k < n; ++k) s += d.d2(i, k, k, j) + d.d2(k, j, i, k);
        return -0.5 * s;
    };
    const CMatrix r1 = build(n, [&](int i, int j) {
        cplx s = induced_common(i, j);
        for (int k = 0; k < n; ++k)
            for (int q = 0; q < n; ++q) s -= d.dz(q, k, i) * d.dzb(k, q, j);
        return s;
    });
    const CMatrix r2 = build(n, [&](int i, int j) {
        cplx s = induced_common(i, j);
        for (int k = 0; k < n; ++k)
            for (int q = 0; q < n; ++q) s -= d.dzb(i, q, k) * d.dz(q, j, k);
        return s;
    });
    const CMatrix rh1 = ricci(ind, mj, RicciFlavor::First).m, rh2 = ricci(ind, mj, RicciFlavor::Second).m;
    add("induced_first_ricci", diff(rh1, r1));
    add("induced_second_ricci", diff(rh2, r2));
    add("induced_ricci_difference", diff(rh1 - rh2, build(n, [&](int i, int j) {
                                             cplx s = 0.0;
                                             for (int k = 0; k < n; ++k)
                                                 for (int q = 0; q < n; ++q)
                                                     s += d.dzb(i, q, k) * d.dz(q, j, k) - d.dz(i, q, k) * d.dzb(q, j, k);
                                             return s;
                                         })));
    add("bismut_tensor", tensor_diff(bm, n, [&](int i, int j, int a, int b) {
            cplx s = -(d.d2(i, b, a, j) + d.d2(a, j, i, b) - d.d2(a, b, i, j));
            for (int g = 0; g < n; ++g) s += d.dz(a, g, i) * d.dzb(g, b, j) - 4.0 * d.dzb(a, g, j) * d.dz(g, b, i);
            return s;
        }));
    return rows;
}

std::vector<FormulaRow> balanced_formulas(const MetricJet& mj) {
    const auto d = normal_point_data(mj);
    const int n = d.n;
    const Terms T{d, n};
    const auto F = ricci_family(mj);
    std::vector<FormulaRow> rows;
    auto add = [&](const std::string& name, double r, bool alt = false) {
        rows.push_back({name, FormulaFamily::Balanced, alt, r});
    };
    double first = 0.0;
    for (int i = 0; i < n; ++i) {
        cplx a = 0.0, b = 0.0;
        for (int s = 0; s < n; ++s) {
            a += d.dzb(s, i, s);
            b += d.dzb(s, s, i);
        }
        first = std::max({first, std::abs(a), std::abs(b)});
    }
    add("first_derivative_traces", first);
    double second = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            cplx a = 0.0, b = 0.0;
            for (int i = 0; i < n; ++i) {
                a += d.d2(i, l, k, i);
                b += d.d2(k, i, i, l);
            }
            const cplx c = T.tr(k, l) - 2.0 * T.p1(k, l);
            second = std::max({second, std::abs(a - b), std::abs(a - c)});
        }
    add("second_derivative_traces", second);

    const CMatrix common = build(n, [&](int k, int l) { return -T.tr(k, l) + T.p1(k, l); });
    add("chern_first_ricci", diff(F.theta1, common));
    add("induced_first_ricci", diff(F.induced1, common));
    add("bismut_first_ricci", diff(F.bismut1, common));
    add("chern_second_ricci", diff(F.theta2, build(n, [&](int k, int l) { return -T.lap(k, l) + T.p1(k, l); })));
    add("induced_second_ricci",
        diff(F.induced2, build(n, [&](int k, int l) { return -T.tr(k, l) + 2.0 * T.p1(k, l) - T.p2(k, l); })));
    add("bismut_second_ricci",
        diff(F.bismut2, build(n, [&](int k, int l) { return -T.tr(k, l) + 5.0 * T.p1(k, l) - 4.0 * T.p2(k, l); })));
    add("bismut_second_ricci",
        diff(F.bismut2, build(n, [&](int k, int l) {
                 return -2.0 * T.tr(k, l) + T.lap(k, l) + 5.0 * T.p1(k, l) - 4.0 * T.p2(k, l);
             })),
        true);
    add("hermitian_ricci",
        diff(F.hermitian, build(n, [&](int k, int l) { return -T.tr(k, l) + T.p1(k, l) - T.p2(k, l); })));
    add("complexified_ricci",
        diff(F.complexified, build(n, [&](int k, int l) { return -T.lap(k, l) - (T.p1(k, l) - T.p2(k, l)); })));
    return rows;
}

std::vector<FormulaRow> pluriclosed_formulas(const MetricJet& mj) {
    const auto d = normal_point_data(mj);
    const int n = d.n;
    const Terms T{d, n};
    const auto F = ricci_family(mj);
    std::vector<FormulaRow> rows;
    auto add = [&](const std::string& name, double r, bool alt = false) {
        rows.push_back({name, FormulaFamily::Pluriclosed, alt, r});
    };
    auto avg = [&](int k, int l) { return -0.5 * (T.lap(k, l) + T.tr(k, l)); };
    add("chern_first_ricci", diff(F.theta1, build(n, [&](int k, int l) { return -T.tr(k, l) + T.p1(k, l); })));
    add("chern_second_ricci", diff(F.theta2, build(n, [&](int k, int l) { return -T.lap(k, l) + T.p1(k, l); })));
    add("induced_first_ricci", diff(F.induced1, build(n, [&](int k, int l) { return avg(k, l) - T.p1(k, l); })));
    add("induced_second_ricci", diff(F.induced2, build(n, [&](int k, int l) { return avg(k, l) - T.p2(k, l); })));
    add("bismut_first_ricci",
        diff(F.bismut1, build(n, [&](int k, int l) { return -T.lap(k, l) + T.p1(k, l) - 4.0 * T.p3(k, l); })));
    add("bismut_first_ricci", diff(F.bismut1, build(n, [&](int k, int l) { return -T.lap(k, l) - 3.0 * T.p1(k, l); })),
        true);
    add("bismut_second_ricci",
        diff(F.bismut2, build(n, [&](int k, int l) { return -T.tr(k, l) + T.p1(k, l) - 4.0 * T.p2(k, l); })));
    add("hermitian_ricci",
        diff(F.hermitian, build(n, [&](int k, int l) { return avg(k, l) - (T.p1(k, l) + T.p2(k, l)); })));
    add("complexified_ricci", diff(F.complexified, build(n, [&](int k, int l) {
                                       return avg(k, l) + (T.p1(k, l) + T.p2(k, l)) - 2.0 * T.mixed_traces(k, l);
                                   })));
    // Sign comparisons: residual is how far the difference falls below zero.
    add("chern_first_dominates_bismut_second", std::max(0.0, -min_eig(F.theta1 - F.bismut2)));
    add("chern_second_dominates_bismut_first", std::max(0.0, -min_eig(F.theta2 - F.bismut1)));
    // Theta2 + B2 = Theta1 + X, the reference reading X = induced first Ricci, then the others.
    const CMatrix lhs = F.theta2 + F.bismut2 - F.theta1;
    add("ricci_balance", diff(lhs, F.induced1));
    add("ricci_balance[hermitian_ricci]", diff(lhs, F.hermitian), true);
    add("ricci_balance[induced_second]", diff(lhs, F.induced2), true);
    add("ricci_balance[bismut_first]", diff(lhs, F.bismut1), true);
    add("ricci_balance[bismut_first-4(induced_first-induced_second)]",
        diff(lhs, F.bismut1 - 4.0 * (F.induced1 - F.induced2)), true);
    return rows;
}

double NormalPointReport::max_reference() const {
    double m = 0.0;
    for (const auto& r : rows)
        if (!r.alternative) m = std::max(m, r.residual);
    return m;
}

double NormalPointReport::max_alternative() const {
    double m = 0.0;
    for (const auto& r : rows)
        if (r.alternative) m = std::max(m, r.residual);
    return m;
}

std::vector<std::string> NormalPointReport::failing(double tol, bool alternative) const {
    std::vector<std::string> out;
    for (const auto& r : rows)
        if (r.alternative == alternative && !(r.residual <= tol)) out.push_back(to_string(r.family) + "." + r.name);
    return out;
}

NormalPointReport normal_point_suite(int n, int metrics, std::uint64_t seed) {
    if (metrics < 1) throw StructuralError("normal_point_suite: metrics >= 1 required");
    NormalPointReport rep;
    rep.n = n;
    rep.metrics = metrics;
    rep.seed = seed;
    auto merge = [&](const std::vector<FormulaRow>& rows) {
        for (const auto& r : rows) {
            auto it = std::find_if(rep.rows.begin(), rep.rows.end(), [&](const FormulaRow& x) {
                return x.family == r.family && x.name == r.name && x.alternative == r.alternative;
            });
            if (it == rep.rows.end()) rep.rows.push_back(r);
            else it->residual = std::max(it->residual, r.residual);
        }
    };
    Rng rng(seed);
    const Point origin(n, cplx(0.0));
    for (int m = 0; m < metrics; ++m) {
        const auto g = metric_jet(MetricField::normal_form(random_normal_form(n, rng)), origin, 3);
        merge(general_formulas(g));
        const auto b = metric_jet(MetricField::normal_form(balanced_normal_form(n, rng)), origin, 3);
        merge(general_formulas(b));
        merge(balanced_formulas(b));
        const auto s = metric_jet(MetricField::normal_form(skt_normal_form(n, rng)), origin, 3);
        merge(general_formulas(s));
        merge(pluriclosed_formulas(s));
    }
    return rep;
}

}  // namespace hermitia
