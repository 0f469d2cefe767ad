#include "hermitia/hopf.hpp"

#include <algorithm>
#include <cmath>

namespace hermitia {

HopfPoint::HopfPoint(int n_, Point z_) : n(n_), z(std::move(z_)) {
    if (n < 2) throw DomainError("Hopf point: n >= 2 required");
    if (static_cast<int>(z.size()) != n) throw StructuralError("Hopf point: coordinate count != n");
    if (r2() == 0.0) throw DomainError("Hopf point: z = 0 is outside the chart");
}

double HopfPoint::r2() const {
    double s = 0.0;
    for (auto v : z) s += std::norm(v);
    return s;
}

std::string to_string(HopfQuantity q) {
    switch (q) {
        case HopfQuantity::Metric: return "metric";
        case HopfQuantity::Dh: return "dh";
        case HopfQuantity::DbarH: return "dbar_h";
        case HopfQuantity::D2h: return "d2h";
        case HopfQuantity::LeviCivita: return "levi_civita";
        case HopfQuantity::ChernTensor: return "chern_tensor";
        case HopfQuantity::ChernFirst: return "chern_ricci1";
        case HopfQuantity::ChernSecond: return "chern_ricci2";
        case HopfQuantity::ChernFirstSpectrum: return "chern_ricci1_spectrum";
        case HopfQuantity::LcTensor: return "lc_tensor";
        case HopfQuantity::LcMixed: return "lc_mixed";
        case HopfQuantity::HermitianRicci: return "hermitian_ricci";
        case HopfQuantity::BismutMixed: return "bismut_mixed";
        case HopfQuantity::BismutFirst: return "bismut_ricci1";
        case HopfQuantity::BismutSecond: return "bismut_ricci2";
    }
    return "?";
}

const std::vector<HopfQuantity>& all_hopf_quantities() {
    static const std::vector<HopfQuantity> all = {
        HopfQuantity::Metric,         HopfQuantity::Dh,           HopfQuantity::DbarH,
        HopfQuantity::D2h,            HopfQuantity::LeviCivita,   HopfQuantity::ChernTensor,
        HopfQuantity::ChernFirst,     HopfQuantity::ChernSecond,  HopfQuantity::ChernFirstSpectrum,
        HopfQuantity::LcTensor,       HopfQuantity::LcMixed,      HopfQuantity::HermitianRicci,
        HopfQuantity::BismutMixed,    HopfQuantity::BismutFirst,  HopfQuantity::BismutSecond,
    };
    return all;
}

std::string to_string(BismutRicciForm f) {
    return f == BismutRicciForm::Quartic ? "quartic" : "quarter_quadratic";
}

namespace {

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

// Full complexified Levi-Civita symbol from the holomorphic and mixed closed forms,
// their conjugates and the lower-slot symmetry.
cplx gamma_closed(const HopfPoint& p, int A, int B, int C) {
    const int n = p.n;
    const double r2 = p.r2();
    const auto& z = p.z;
    const bool a = A >= n, b = B >= n, c = C >= n;
    const int i = A % n, k = B % n, l = C % n;
    if (!a && !b && !c)
        return -(delta(i, l) * std::conj(z[k]) + delta(k, l) * std::conj(z[i])) / (2 * r2);
    if (a && b && c) return (std::conj(gamma_closed(p, i, k, l)));
    if (a != b) {
        const int barred = a ? i : k, plain = a ? k : i;
        // Gamma_{jbar k}^l, and its conjugate Gamma_{j kbar}^{lbar}
        if (!c) return (delta(barred, plain) * z[l] - delta(plain, l) * z[barred]) / (2 * r2);
        return (delta(plain, barred) * std::conj(z[l]) - delta(barred, l) * std::conj(z[plain])) / (2 * r2);
    }
    return 0.0;
}

std::vector<cplx> matrix_entries(const CMatrix& m) {
    std::vector<cplx> out;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

std::vector<cplx> spectrum(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    std::vector<cplx> out;
    for (int i = 0; i < m.rows(); ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

std::vector<cplx> raise_last(const CurvatureTensor& t, const CMatrix& P) {
    const int n = t.n;
    std::vector<cplx> out(static_cast<size_t>(n) * n * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    cplx s = 0.0;
                    for (int q = 0; q < n; ++q) s += t(i, j, k, q) * P(l, q);
                    out[((i * n + j) * n + k) * n + l] = s;
                }
    return out;
}

std::vector<cplx> pipeline_from(const MetricJet& mj, HopfQuantity q) {
    const int n = mj.n;
    std::vector<cplx> out;
    switch (q) {
        case HopfQuantity::Metric: return matrix_entries(mj.h0());
        case HopfQuantity::Dh:
        case HopfQuantity::DbarH:
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        out.push_back(mj.h(k, l).linear(q == HopfQuantity::Dh ? i : n + i));
            return out;
        case HopfQuantity::D2h:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) out.push_back(mj.h(k, l).partial({i, n + j}));
            return out;
        case HopfQuantity::LeviCivita: {
            const auto G = levi_civita(mj);
            for (const auto& e : G.e) out.push_back(e.value());
            return out;
        }
        case HopfQuantity::ChernTensor: return curvature_chern(mj).c;
        case HopfQuantity::ChernFirst: return matrix_entries(ricci(curvature_chern(mj), mj, RicciFlavor::First).m);
        case HopfQuantity::ChernSecond:
            return matrix_entries(ricci(curvature_chern(mj), mj, RicciFlavor::Second).m);
        case HopfQuantity::ChernFirstSpectrum:
            return spectrum(ricci(curvature_chern(mj), mj, RicciFlavor::First).m);
        case HopfQuantity::LcTensor: return curvature_lc(mj).c;
        case HopfQuantity::LcMixed: return raise_last(curvature_lc(mj), mj.up0());
        case HopfQuantity::HermitianRicci:
            return matrix_entries(ricci(curvature_lc(mj), mj, RicciFlavor::HermitianRicci).m);
        case HopfQuantity::BismutMixed: return raise_last(curvature_bismut(mj), mj.up0());
        case HopfQuantity::BismutFirst:
            return matrix_entries(ricci(curvature_bismut(mj), mj, RicciFlavor::First).m);
        case HopfQuantity::BismutSecond:
            return matrix_entries(ricci(curvature_bismut(mj), mj, RicciFlavor::Second).m);
    }
    return out;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw StructuralError("oracle/pipeline layout mismatch");
    double m = 0.0;
    for (size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace

std::vector<cplx> oracle(const HopfPoint& p, HopfQuantity q, BismutRicciForm form) {
    const int n = p.n;
    const double r2 = p.r2(), r4 = r2 * r2, r6 = r4 * r2;
    const auto& z = p.z;
    auto zb = [&](int i) { return std::conj(z[i]); };
    std::vector<cplx> out;
    switch (q) {
        case HopfQuantity::Metric:
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) out.push_back(4.0 * delta(k, l) / r2);
            return out;
        case HopfQuantity::Dh:
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) out.push_back(-4.0 * delta(k, l) * zb(i) / r4);
            return out;
        case HopfQuantity::DbarH:
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) out.push_back(-4.0 * delta(k, l) * z[j] / r4);
            return out;
        case HopfQuantity::D2h:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            out.push_back(-4.0 * delta(k, l) * (delta(i, j) * r2 - 2.0 * zb(i) * z[j]) / r6);
            return out;
        case HopfQuantity::LeviCivita:
            for (int A = 0; A < 2 * n; ++A)
                for (int B = 0; B < 2 * n; ++B)
                    for (int C = 0; C < 2 * n; ++C) out.push_back(gamma_closed(p, A, B, C));
            return out;
        case HopfQuantity::ChernTensor:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            out.push_back(4.0 * delta(k, l) * (delta(i, j) * r2 - z[j] * zb(i)) / r6);
            return out;
        case HopfQuantity::ChernFirst:
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) out.push_back(double(n) * (delta(k, l) * r2 - z[l] * zb(k)) / r4);
            return out;
        case HopfQuantity::ChernSecond:
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) out.push_back(double(n - 1) * delta(k, l) / r2);
            return out;
        case HopfQuantity::ChernFirstSpectrum:
            out.push_back(0.0);
            for (int k = 1; k < n; ++k) out.push_back(double(n) / r2);
            return out;
        case HopfQuantity::LcTensor:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            out.push_back(2.0 * delta(i, l) * delta(j, k) / r4 -
                                          (delta(i, l) * z[j] * zb(k) + delta(j, k) * z[l] * zb(i)) / r6);
            return out;
        case HopfQuantity::LcMixed:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            out.push_back(delta(i, l) * delta(j, k) / (2 * r2) -
                                          (delta(i, l) * z[j] * zb(k) + delta(j, k) * z[l] * zb(i)) / (4 * r4));
            return out;
        case HopfQuantity::HermitianRicci:
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) out.push_back((delta(k, l) * r2 - z[l] * zb(k)) / (2 * r4));
            return out;
        case HopfQuantity::BismutMixed:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            out.push_back((delta(j, k) * delta(i, l) - delta(k, l) * delta(i, j)) / r2 +
                                          (delta(i, j) * zb(k) * z[l] + delta(k, l) * zb(i) * z[j] -
                                           delta(i, l) * zb(k) * z[j] - delta(j, k) * zb(i) * z[l]) /
                                              r4);
            return out;
        case HopfQuantity::BismutFirst:
        case HopfQuantity::BismutSecond: {
            const double den = form == BismutRicciForm::Quartic ? r4 : 4 * r2;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out.push_back(double(2 - n) * (delta(i, j) * r2 - zb(i) * z[j]) / den);
            return out;
        }
    }
    return out;
}

std::vector<cplx> pipeline(const HopfPoint& p, HopfQuantity q) {
    return pipeline_from(metric_jet(MetricField::hopf(p.n), p.z, kDefaultOrder), q);
}

double OracleReport::max_residual() const {
    double m = bismut_form == BismutRicciForm::Quartic ? bismut_residual_quartic : bismut_residual_quarter;
    for (const auto& r : residuals) m = std::max(m, r.residual);
    return m;
}

namespace {

OracleReport compare(const HopfPoint& p, const BismutRicciForm* forced) {
    const auto mj = metric_jet(MetricField::hopf(p.n), p.z, kDefaultOrder);
    OracleReport rep;
    rep.point = p;
    for (auto q : all_hopf_quantities()) {
        if (q == HopfQuantity::BismutFirst || q == HopfQuantity::BismutSecond) continue;
        rep.residuals.push_back({q, max_diff(oracle(p, q), pipeline_from(mj, q))});
    }
    for (auto q : {HopfQuantity::BismutFirst, HopfQuantity::BismutSecond}) {
        const auto got = pipeline_from(mj, q);
        rep.bismut_residual_quartic =
            std::max(rep.bismut_residual_quartic, max_diff(oracle(p, q, BismutRicciForm::Quartic), got));
        rep.bismut_residual_quarter =
            std::max(rep.bismut_residual_quarter, max_diff(oracle(p, q, BismutRicciForm::QuarterQuadratic), got));
    }
    if (forced)
        rep.bismut_form = *forced;
    else
        rep.bismut_form = rep.bismut_residual_quarter < rep.bismut_residual_quartic ? BismutRicciForm::QuarterQuadratic
                                                                                     : BismutRicciForm::Quartic;
    return rep;
}

}  // namespace

OracleReport oracle_vs_pipeline(const HopfPoint& p) { return compare(p, nullptr); }

OracleReport oracle_vs_pipeline(const HopfPoint& p, BismutRicciForm forced) { return compare(p, &forced); }

}  // namespace hermitia
