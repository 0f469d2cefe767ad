#include "hermitia/positivity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hermitia/samples.hpp"

namespace hermitia {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Positive: return "positive";
        case Verdict::Nonnegative: return "nonnegative";
        case Verdict::Indefinite: return "indefinite";
        case Verdict::Nonpositive: return "nonpositive";
        case Verdict::Negative: return "negative";
    }
    return "?";
}

std::string to_string(HypothesisTensor t) {
    switch (t) {
        case HypothesisTensor::ChernSecond: return "chern_second_ricci";
        case HypothesisTensor::ChernFirst: return "chern_first_ricci";
        case HypothesisTensor::BismutFirst: return "bismut_first_ricci";
        case HypothesisTensor::BismutSecond: return "bismut_second_ricci";
        case HypothesisTensor::HermitianRicci: return "hermitian_ricci";
    }
    return "?";
}

namespace {

double low_sum(const std::vector<double>& ev, int p) {
    return std::accumulate(ev.begin(), ev.begin() + p, 0.0);
}

double high_sum(const std::vector<double>& ev, int p) {
    return std::accumulate(ev.end() - p, ev.end(), 0.0);
}

void check_p(const std::vector<double>& ev, int p) {
    if (p < 1 || p > static_cast<int>(ev.size())) throw StructuralError("p out of range");
}

Verdict verdict_of(double lo, double hi, double tol) {
    if (lo > tol) return Verdict::Positive;
    if (lo >= -tol) return Verdict::Nonnegative;
    if (hi < -tol) return Verdict::Negative;
    if (hi <= tol) return Verdict::Nonpositive;
    return Verdict::Indefinite;
}

}  // namespace

bool PositivityReport::p_positive(int p) const {
    check_p(eigenvalues, p);
    return low_sum(eigenvalues, p) > tol;
}
bool PositivityReport::p_nonnegative(int p) const {
    check_p(eigenvalues, p);
    return low_sum(eigenvalues, p) >= -tol;
}
bool PositivityReport::p_negative(int p) const {
    check_p(eigenvalues, p);
    return high_sum(eigenvalues, p) < -tol;
}
bool PositivityReport::p_nonpositive(int p) const {
    check_p(eigenvalues, p);
    return high_sum(eigenvalues, p) <= tol;
}

PositivityReport p_positivity(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) throw StructuralError("p_positivity: matrix not square");
    if (hermitian_defect(m) > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw StructuralError("p_positivity: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    PositivityReport r;
    r.tol = tol;
    r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
    for (int p = 1; p <= m.rows(); ++p)
        r.p_verdicts.push_back(verdict_of(low_sum(r.eigenvalues, p), high_sum(r.eigenvalues, p), tol));
    return r;
}

namespace {

template <class Better>
double subset_extreme(const std::vector<double>& ev, int p, Better better) {
    const int r = static_cast<int>(ev.size());
    if (r > 20) throw StructuralError("subset sums: matrix too large for enumeration");
    check_p(ev, p);
    bool first = true;
    double best = 0.0;
    for (unsigned mask = 0; mask < (1u << r); ++mask) {
        if (std::popcount(mask) != p) continue;
        double s = 0.0;
        for (int i = 0; i < r; ++i)
            if (mask & (1u << i)) s += ev[i];
        if (first || better(s, best)) best = s;
        first = false;
    }
    return best;
}

}  // namespace

double subset_min_sum(const std::vector<double>& ev, int p) {
    return subset_extreme(ev, p, [](double a, double b) { return a < b; });
}

double subset_max_sum(const std::vector<double>& ev, int p) {
    return subset_extreme(ev, p, [](double a, double b) { return a > b; });
}

cplx griffiths_form(const CurvatureTensor& t, const std::vector<cplx>& u, const std::vector<cplx>& v) {
    const int n = t.n;
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s += t(i, j, k, l) * u[i] * std::conj(u[j]) * v[k] * std::conj(v[l]);
    return s;
}

GriffithsResult griffiths_sample(const CurvatureTensor& t, int trials, std::uint64_t seed, double tol) {
    if (trials < 1) throw StructuralError("griffiths_sample: trials >= 1 required");
    Rng rng(seed);
    GriffithsResult r;
    r.seed = seed;
    r.trials = trials;
    for (int k = 0; k < trials; ++k) {
        auto u = random_vector(rng, t.n);
        auto v = random_vector(rng, t.n);
        double nu = 0.0, nv = 0.0;
        for (auto x : u) nu += std::norm(x);
        for (auto x : v) nv += std::norm(x);
        for (auto& x : u) x /= std::sqrt(nu);
        for (auto& x : v) x /= std::sqrt(nv);
        const double val = griffiths_form(t, u, v).real();
        if (k == 0 || val < r.minimum) {
            r.minimum = val;
            r.u = u;
            r.v = v;
        }
        if (k == 0 || val > r.maximum) r.maximum = val;
    }
    r.verdict = verdict_of(r.minimum, r.maximum, tol);
    return r;
}

CMatrix second_ricci_of(const ConnectionJet& c, const MetricJet& mj) {
    if (c.n != mj.n) throw StructuralError("second_ricci_of: dimension mismatch");
    const int n = c.n, r = c.rank;
    const auto R = lowered_curvature(c);
    const CMatrix P = mj.up0();
    CMatrix out = CMatrix::Zero(r, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b) out(a, b) += P(i, j) * R[((i * n + j) * r + a) * r + b];
    return out;
}

namespace {

CMatrix hypothesis_matrix(const MetricJet& mj, HypothesisTensor t) {
    switch (t) {
        case HypothesisTensor::ChernSecond:
            return ricci(curvature_chern(mj), mj, RicciFlavor::Second).m;
        case HypothesisTensor::ChernFirst: return ricci(curvature_chern(mj), mj, RicciFlavor::First).m;
        case HypothesisTensor::BismutFirst: return ricci(curvature_bismut(mj), mj, RicciFlavor::First).m;
        case HypothesisTensor::BismutSecond: return ricci(curvature_bismut(mj), mj, RicciFlavor::Second).m;
        case HypothesisTensor::HermitianRicci:
            return ricci(curvature_lc(mj), mj, RicciFlavor::HermitianRicci).m;
    }
    return {};
}

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

HypothesisReport vanishing_hypothesis_report(const std::vector<CMatrix>& traces, const std::vector<Point>& samples,
                                             HypothesisSign sign, int p, double tol) {
    HypothesisReport rep;
    rep.sign = sign;
    rep.p = p;
    rep.samples = static_cast<int>(samples.size());
    for (size_t k = 0; k < traces.size(); ++k) {
        const auto pr = p_positivity(hermitize(traces[k]), tol);
        const bool weak = sign == HypothesisSign::Positive ? pr.p_nonnegative(p) : pr.p_nonpositive(p);
        const bool strict = sign == HypothesisSign::Positive ? pr.p_positive(p) : pr.p_negative(p);
        if (!weak) {
            rep.everywhere = false;
            rep.failures.push_back(samples[k]);
        }
        if (strict && !rep.somewhere_strict) {
            rep.somewhere_strict = true;
            rep.strict_witness = samples[k];
        }
    }
    rep.holds = rep.everywhere && rep.somewhere_strict && !traces.empty();
    std::ostringstream os;
    const char* weak = sign == HypothesisSign::Positive ? "nonnegative" : "nonpositive";
    const char* strict = sign == HypothesisSign::Positive ? "positive" : "negative";
    os << "sign hypothesis (" << p << "-" << weak << " at every sample, " << p << "-" << strict
       << " at some sample) " << (rep.holds ? "HOLDS" : "FAILS") << " across " << rep.samples
       << " sampled points";
    if (!rep.everywhere) os << " (" << rep.failures.size() << " samples violate the weak inequality)";
    if (!rep.somewhere_strict) os << " (no sample is strict)";
    os << "; this checks curvature hypotheses only, no cohomology vanishing is computed or claimed";
    rep.statement = os.str();
    return rep;
}

HypothesisReport vanishing_hypothesis_report(const MetricField& field, const std::vector<Point>& samples,
                                             HypothesisTensor tensor, HypothesisSign sign, int p, double tol) {
    std::vector<CMatrix> traces;
    traces.reserve(samples.size());
    for (const auto& z : samples) traces.push_back(hypothesis_matrix(metric_jet(field, z, 2), tensor));
    auto rep = vanishing_hypothesis_report(traces, samples, sign, p, tol);
    rep.tensor = tensor;
    rep.statement = to_string(tensor) + ": " + rep.statement;
    return rep;
}

}  // namespace hermitia
