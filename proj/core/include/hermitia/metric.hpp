#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hermitia/jet.hpp"

namespace hermitia {

using Point = std::vector<cplx>;
using CMatrix = Eigen::MatrixXcd;

enum class MetricKind { Flat, Hopf, NormalForm, TorusFourier, Scaled };

std::string to_string(MetricKind k);

// h = I + a_{ijk} z^k + conj(a_{jik}) zbar^k + b_{ijkl} z^k zbar^l
//       + c_{ijkl} z^k z^l + conj(c_{jikl}) zbar^k zbar^l
// a is antisymmetric in (i,k) so that the holomorphic Christoffels vanish at 0;
// b satisfies conj(b_{ijkl}) = b_{jilk}. Flat row-major storage.
struct NormalFormCoeffs {
    int n = 0;
    std::vector<cplx> a;  // n^3
    std::vector<cplx> b;  // n^4
    std::vector<cplx> c;  // n^4

    static NormalFormCoeffs zero(int n);
    cplx& A(int i, int j, int k) { return a[(i * n + j) * n + k]; }
    cplx A(int i, int j, int k) const { return a[(i * n + j) * n + k]; }
    cplx& B(int i, int j, int k, int l) { return b[((i * n + j) * n + k) * n + l]; }
    cplx B(int i, int j, int k, int l) const { return b[((i * n + j) * n + k) * n + l]; }
    cplx& C(int i, int j, int k, int l) { return c[((i * n + j) * n + k) * n + l]; }
    cplx C(int i, int j, int k, int l) const { return c[((i * n + j) * n + k) * n + l]; }

    // Project onto the admissible family (antisymmetric a, Hermitian b).
    void symmetrize();
};

struct FourierTerm {
    std::vector<int> freq;  // length 2n
    CMatrix amp;            // n x n
};

// Real torus coordinates x in [0,1)^{2n}; z^j = x^j + i x^{n+j}.
std::vector<double> torus_coords(const Point& z);
Point torus_point(const std::vector<double>& x);

class MetricField {
public:
    static MetricField flat(int n);
    static MetricField hopf(int n);
    static MetricField normal_form(NormalFormCoeffs coeffs);
    // Validates the Hermitian frequency pairing and positivity on a 5^{2n} grid.
    static MetricField torus(int n, std::vector<FourierTerm> terms);
    static MetricField torus_unchecked(int n, std::vector<FourierTerm> terms);
    static MetricField scaled(const MetricField& base, double factor);

    MetricKind kind() const { return kind_; }
    int n() const { return n_; }
    const NormalFormCoeffs& normal_form_coeffs() const { return nf_; }
    const std::vector<FourierTerm>& terms() const { return terms_; }
    double factor() const { return factor_; }
    const MetricField& base() const { return *base_; }

    // Throws DomainError outside the chart, ValidationError when not positive definite.
    CMatrix evaluate(const Point& z) const;
    // No positivity check; used by validation itself.
    CMatrix evaluate_raw(const Point& z) const;
    // Entry jets of h at z; exact for every built-in kind.
    JetMat jets(const Point& z, int order) const;

private:
    MetricKind kind_ = MetricKind::Flat;
    int n_ = 0;
    NormalFormCoeffs nf_;
    std::vector<FourierTerm> terms_;
    std::shared_ptr<const MetricField> base_;
    double factor_ = 1.0;
};

double min_eigenvalue(const CMatrix& h);
double hermitian_defect(const CMatrix& h);

struct MetricJet {
    int n = 0;
    int order = 0;
    Point point;
    JetMat h;     // h(i,j) = h_{i jbar}
    JetMat hinv;  // inverse matrix; h^{i jbar} = hinv(j,i)

    // h^{i jbar} as a jet
    const Jet& up(int i, int j) const { return hinv(j, i); }
    CMatrix h0() const;
    // P(i,j) = h^{i jbar} at the point
    CMatrix up0() const;
};

MetricJet metric_jet(const MetricField& field, const Point& z, int order = kDefaultOrder);
MetricJet metric_jet_from(JetMat h, const Point& z);

// Torus metric text format.
MetricField parse_torus_metric(const std::string& text);
MetricField ingest_torus_metric(const std::string& path);
std::string format_torus_metric(int n, const std::vector<FourierTerm>& terms);

}  // namespace hermitia
