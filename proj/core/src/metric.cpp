#include "hermitia/metric.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace hermitia {

std::string to_string(MetricKind k) {
    switch (k) {
        case MetricKind::Flat: return "flat";
        case MetricKind::Hopf: return "hopf";
        case MetricKind::NormalForm: return "normal-form";
        case MetricKind::TorusFourier: return "torus";
        case MetricKind::Scaled: return "scaled";
    }
    return "?";
}

NormalFormCoeffs NormalFormCoeffs::zero(int n) {
    NormalFormCoeffs c;
    c.n = n;
    c.a.assign(n * n * n, 0.0);
    c.b.assign(n * n * n * n, 0.0);
    c.c.assign(n * n * n * n, 0.0);
    return c;
}

void NormalFormCoeffs::symmetrize() {
    NormalFormCoeffs o = *this;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) A(i, j, k) = 0.5 * (o.A(i, j, k) - o.A(k, j, i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    B(i, j, k, l) = 0.5 * (o.B(i, j, k, l) + std::conj(o.B(j, i, l, k)));
}

std::vector<double> torus_coords(const Point& z) {
    const int n = static_cast<int>(z.size());
    std::vector<double> x(2 * n);
    for (int j = 0; j < n; ++j) {
        x[j] = z[j].real();
        x[n + j] = z[j].imag();
    }
    return x;
}

Point torus_point(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size()) / 2;
    Point z(n);
    for (int j = 0; j < n; ++j) z[j] = cplx(x[j], x[n + j]);
    return z;
}

double min_eigenvalue(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double hermitian_defect(const CMatrix& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

MetricField MetricField::flat(int n) {
    if (n < 1) throw DomainError("dimension must be >= 1");
    MetricField f;
    f.kind_ = MetricKind::Flat;
    f.n_ = n;
    return f;
}

MetricField MetricField::hopf(int n) {
    if (n < 1) throw DomainError("dimension must be >= 1");
    MetricField f;
    f.kind_ = MetricKind::Hopf;
    f.n_ = n;
    return f;
}

MetricField MetricField::normal_form(NormalFormCoeffs coeffs) {
    const int n = coeffs.n;
    if (n < 1 || coeffs.a.size() != static_cast<size_t>(n * n * n) ||
        coeffs.b.size() != static_cast<size_t>(n * n * n * n) ||
        coeffs.c.size() != static_cast<size_t>(n * n * n * n))
        throw StructuralError("normal form coefficients have the wrong size");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (std::abs(coeffs.A(i, j, k) + coeffs.A(k, j, i)) > 1e-12)
                    throw ValidationError("normal form: linear coefficient not antisymmetric in (i,k)");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    if (std::abs(coeffs.B(i, j, k, l) - std::conj(coeffs.B(j, i, l, k))) > 1e-12)
                        throw HermitianConstraintError("normal form: mixed coefficient not Hermitian");
    MetricField f;
    f.kind_ = MetricKind::NormalForm;
    f.n_ = n;
    f.nf_ = std::move(coeffs);
    return f;
}

MetricField MetricField::torus_unchecked(int n, std::vector<FourierTerm> terms) {
    if (n < 1) throw DomainError("dimension must be >= 1");
    for (const auto& t : terms)
        if (static_cast<int>(t.freq.size()) != 2 * n || t.amp.rows() != n || t.amp.cols() != n)
            throw StructuralError("Fourier term has the wrong shape");
    MetricField f;
    f.kind_ = MetricKind::TorusFourier;
    f.n_ = n;
    f.terms_ = std::move(terms);
    return f;
}

namespace {

std::string freq_str(const std::vector<int>& m) {
    std::string s = "(";
    for (size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + std::to_string(m[i]);
    return s + ")";
}

std::string point_str(const std::vector<double>& x) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    return os.str();
}

}  // namespace

MetricField MetricField::torus(int n, std::vector<FourierTerm> terms) {
    std::map<std::vector<int>, const FourierTerm*> by_freq;
    for (const auto& t : terms) {
        if (static_cast<int>(t.freq.size()) != 2 * n || t.amp.rows() != n || t.amp.cols() != n)
            throw StructuralError("Fourier term has the wrong shape");
        if (!by_freq.emplace(t.freq, &t).second)
            throw ParseError("duplicate frequency " + freq_str(t.freq));
    }
    for (const auto& t : terms) {
        std::vector<int> neg(t.freq);
        for (auto& v : neg) v = -v;
        auto it = by_freq.find(neg);
        if (it == by_freq.end())
            throw HermitianConstraintError("frequency " + freq_str(t.freq) + " has no partner " +
                                           freq_str(neg));
        const double scale = 1.0 + t.amp.cwiseAbs().maxCoeff();
        if ((it->second->amp - t.amp.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw HermitianConstraintError("amplitude at " + freq_str(neg) +
                                           " is not the conjugate transpose of the one at " +
                                           freq_str(t.freq));
    }
    MetricField f = torus_unchecked(n, std::move(terms));
    // positivity on the 5^{2n} sample grid
    const int dims = 2 * n;
    std::vector<int> idx(dims, 0);
    for (;;) {
        std::vector<double> x(dims);
        for (int k = 0; k < dims; ++k) x[k] = idx[k] / 5.0;
        const double ev = min_eigenvalue(f.evaluate_raw(torus_point(x)));
        if (!(ev > 1e-10))
            throw PositivityError("torus metric not positive definite at x=" + point_str(x) +
                                  " (min eigenvalue " + std::to_string(ev) + ")");
        int k = 0;
        while (k < dims && ++idx[k] == 5) idx[k++] = 0;
        if (k == dims) break;
    }
    return f;
}

MetricField MetricField::scaled(const MetricField& base, double factor) {
    if (!(factor > 0.0)) throw DomainError("scale factor must be positive");
    MetricField f;
    f.kind_ = MetricKind::Scaled;
    f.n_ = base.n_;
    f.base_ = std::make_shared<const MetricField>(base);
    f.factor_ = factor;
    return f;
}

CMatrix MetricField::evaluate_raw(const Point& z) const {
    const int n = n_;
    if (static_cast<int>(z.size()) != n) throw StructuralError("point has the wrong dimension");
    CMatrix h = CMatrix::Zero(n, n);
    switch (kind_) {
        case MetricKind::Flat:
            h.setIdentity();
            break;
        case MetricKind::Hopf: {
            cplx r2 = 0.0;
            for (int i = 0; i < n; ++i) r2 += z[i] * std::conj(z[i]);
            if (std::abs(r2) == 0.0) throw DomainError("Hopf metric is undefined at z = 0");
            const cplx v = cplx(4.0) * (cplx(1.0) / r2);
            for (int i = 0; i < n; ++i) h(i, i) = v;
            break;
        }
        case MetricKind::NormalForm: {
            const auto& c = nf_;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    cplx s = (i == j) ? 1.0 : 0.0;
                    for (int k = 0; k < n; ++k) {
                        s += c.A(i, j, k) * z[k] + std::conj(c.A(j, i, k)) * std::conj(z[k]);
                        for (int l = 0; l < n; ++l)
                            s += c.B(i, j, k, l) * z[k] * std::conj(z[l]) +
                                 c.C(i, j, k, l) * z[k] * z[l] +
                                 std::conj(c.C(j, i, k, l)) * std::conj(z[k]) * std::conj(z[l]);
                    }
                    h(i, j) = s;
                }
            break;
        }
        case MetricKind::TorusFourier: {
            const auto x = torus_coords(z);
            for (const auto& t : terms_) {
                double phase = 0.0;
                for (int k = 0; k < 2 * n; ++k) phase += t.freq[k] * x[k];
                h += t.amp * std::exp(cplx(0.0, 2.0 * std::numbers::pi * phase));
            }
            break;
        }
        case MetricKind::Scaled:
            h = factor_ * base_->evaluate_raw(z);
            break;
    }
    return h;
}

CMatrix MetricField::evaluate(const Point& z) const {
    CMatrix h = evaluate_raw(z);
    const double ev = min_eigenvalue(h);
    if (!(ev > 1e-10))
        throw ValidationError("metric not positive definite at the point (min eigenvalue " +
                              std::to_string(ev) + ")");
    return h;
}

JetMat MetricField::jets(const Point& z, int order) const {
    const int n = n_;
    if (static_cast<int>(z.size()) != n) throw StructuralError("point has the wrong dimension");
    JetMat h(n, n, n, order);
    std::vector<Jet> zj, zb;
    for (int i = 0; i < n; ++i) {
        zj.push_back(Jet::variable(n, order, i, z[i]));
        zb.push_back(Jet::variable(n, order, n + i, std::conj(z[i])));
    }
    switch (kind_) {
        case MetricKind::Flat:
            h = JetMat::identity(n, n, order);
            break;
        case MetricKind::Hopf: {
            Jet r2(n, order);
            for (int i = 0; i < n; ++i) r2 += zj[i] * zb[i];
            if (std::abs(r2.value()) == 0.0) throw DomainError("Hopf metric is undefined at z = 0");
            const Jet v = inverse(r2) * cplx(4.0);
            for (int i = 0; i < n; ++i) h(i, i) = v;
            break;
        }
        case MetricKind::NormalForm: {
            const auto& c = nf_;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Jet s = Jet::constant(n, order, i == j ? 1.0 : 0.0);
                    for (int k = 0; k < n; ++k) {
                        s += zj[k] * c.A(i, j, k) + zb[k] * std::conj(c.A(j, i, k));
                        for (int l = 0; l < n; ++l) {
                            s += (zj[k] * zb[l]) * c.B(i, j, k, l);
                            s += (zj[k] * zj[l]) * c.C(i, j, k, l);
                            s += (zb[k] * zb[l]) * std::conj(c.C(j, i, k, l));
                        }
                    }
                    h(i, j) = s;
                }
            break;
        }
        case MetricKind::TorusFourier: {
            // x^j = (z + zbar)/2, x^{n+j} = (z - zbar)/(2i)
            for (const auto& t : terms_) {
                Jet lin(n, order);
                for (int j = 0; j < n; ++j) {
                    lin += (zj[j] + zb[j]) * cplx(0.5 * t.freq[j]);
                    lin += (zj[j] - zb[j]) * (cplx(t.freq[n + j]) / cplx(0.0, 2.0));
                }
                // the real part of the constant is m.x exactly; drop rounding in the imaginary part
                lin[0] = lin[0].real();
                const Jet e = exp(lin * cplx(0.0, 2.0 * std::numbers::pi));
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (t.amp(i, j) != cplx(0.0)) h(i, j) += e * t.amp(i, j);
            }
            break;
        }
        case MetricKind::Scaled: {
            h = base_->jets(z, order);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) h(i, j) *= factor_;
            break;
        }
    }
    return h;
}

CMatrix MetricJet::h0() const {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = h(i, j).value();
    return m;
}

CMatrix MetricJet::up0() const {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = hinv(j, i).value();
    return m;
}

MetricJet metric_jet_from(JetMat h, const Point& z) {
    MetricJet mj;
    mj.n = h.rows();
    mj.order = h.order();
    mj.point = z;
    CMatrix h0(mj.n, mj.n);
    for (int i = 0; i < mj.n; ++i)
        for (int j = 0; j < mj.n; ++j) h0(i, j) = h(i, j).value();
    if (hermitian_defect(h0) > 1e-10 * (1.0 + h0.cwiseAbs().maxCoeff()))
        throw ValidationError("metric jet: constant term not Hermitian");
    if (!(min_eigenvalue(h0) > 1e-10))
        throw ValidationError("metric jet: constant term not positive definite");
    mj.h = std::move(h);
    mj.hinv = inverse(mj.h);
    return mj;
}

MetricJet metric_jet(const MetricField& field, const Point& z, int order) {
    return metric_jet_from(field.jets(z, order), z);
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

long parse_int(const std::string& tok, int line) {
    char* end = nullptr;
    errno = 0;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (errno || end == tok.c_str() || *end != '\0') parse_fail(line, "expected integer, got '" + tok + "'");
    return v;
}

double parse_real(const std::string& tok, int line) {
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(tok.c_str(), &end);
    if (errno || end == tok.c_str() || *end != '\0' || !std::isfinite(v))
        parse_fail(line, "expected real number, got '" + tok + "'");
    return v;
}

}  // namespace

MetricField parse_torus_metric(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    int n = 0;
    std::vector<FourierTerm> terms;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (n == 0) {
            if (toks[0] != "dim" || toks.size() != 2) parse_fail(lineno, "expected header 'dim n'");
            long v = parse_int(toks[1], lineno);
            if (v < 1 || v > 6) parse_fail(lineno, "dimension out of range");
            n = static_cast<int>(v);
            continue;
        }
        if (toks[0] != "freq") parse_fail(lineno, "expected 'freq' entry");
        const size_t nf = 2 * n, na = 2 * n * n;
        if (toks.size() != 1 + nf + 1 + na)
            parse_fail(lineno, "expected " + std::to_string(nf) + " integers, ';', and " +
                                   std::to_string(na) + " reals");
        if (toks[1 + nf] != ";") parse_fail(lineno, "expected ';' after the frequency vector");
        FourierTerm t;
        for (size_t k = 0; k < nf; ++k) t.freq.push_back(static_cast<int>(parse_int(toks[1 + k], lineno)));
        t.amp = CMatrix(n, n);
        size_t p = 2 + nf;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double re = parse_real(toks[p++], lineno);
                double im = parse_real(toks[p++], lineno);
                t.amp(i, j) = cplx(re, im);
            }
        terms.push_back(std::move(t));
    }
    if (n == 0) throw ParseError("missing 'dim n' header");
    return MetricField::torus(n, std::move(terms));
}

MetricField ingest_torus_metric(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_torus_metric(ss.str());
}

std::string format_torus_metric(int n, const std::vector<FourierTerm>& terms) {
    std::ostringstream os;
    os.precision(17);
    os << "dim " << n << "\n";
    for (const auto& t : terms) {
        os << "freq";
        for (int m : t.freq) os << ' ' << m;
        os << " ;";
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) os << ' ' << t.amp(i, j).real() << ' ' << t.amp(i, j).imag();
        os << "\n";
    }
    return os.str();
}

}  // namespace hermitia
