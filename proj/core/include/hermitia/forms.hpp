#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hermitia/connection.hpp"
#include "hermitia/samples.hpp"

namespace hermitia {

// Exterior algebra over a chart with Jet coefficients.
//
// A basis form is a bitmask over 2n bits: bit i < n is dz^i, bit n+j is dzbar^j. The
// mask denotes dz^{i_1}..dz^{i_p} dzbar^{j_1}..dzbar^{j_q} with ascending indices,
// unbarred factors first. Bundle-valued forms carry a fiber index alpha in [0, rank);
// component index = mask * rank + alpha.
struct FormJet {
    int n = 0;
    int rank = 1;
    std::vector<Jet> c;

    static FormJet zero(int n, int rank, int order);
    // 0-form with value f (rank 1), or a section with components s (rank s.size()).
    static FormJet function(const Jet& f);
    static FormJet section(const std::vector<Jet>& s);

    int dim() const { return 1 << (2 * n); }
    int order() const { return c.empty() ? 0 : c[0].order(); }
    Jet& at(unsigned mask, int alpha = 0) { return c[mask * rank + alpha]; }
    const Jet& at(unsigned mask, int alpha = 0) const { return c[mask * rank + alpha]; }

    // The (p,q) part.
    FormJet component(int p, int q) const;
    double max_abs() const;
};

unsigned form_mask(const std::vector<int>& holo, const std::vector<int>& anti, int n);
int form_p(unsigned mask, int n);
int form_q(unsigned mask, int n);

FormJet operator+(const FormJet& a, const FormJet& b);
FormJet operator-(const FormJet& a, const FormJet& b);
FormJet operator*(cplx s, const FormJet& a);
FormJet truncate(const FormJet& a, int order);
// Largest coefficient difference after truncating both to the smaller order.
double residual(const FormJet& a, const FormJet& b);

// Complex conjugate of a scalar form.
FormJet conj(const FormJet& a);
// a scalar, b of any rank.
FormJet wedge(const FormJet& a, const FormJet& b);
// phi scalar, s a section.
FormJet tensor(const FormJet& phi, const FormJet& s);
// {phi, psi} = phi^alpha ^ conj(psi^beta) H_{alpha betabar}
FormJet pairing(const FormJet& phi, const FormJet& psi, const JetMat& H);

Jet random_jet(int n, int order, Rng& rng, double scale = 1.0);
// p, q < 0 fills every bidegree.
FormJet random_form(int n, int rank, int order, Rng& rng, int p = -1, int q = -1, double scale = 1.0);

// Square matrix with Jet entries, stored by rows.
class SparseJetMatrix {
public:
    SparseJetMatrix() = default;
    explicit SparseJetMatrix(int dim) : rows_(dim) {}

    int dim() const { return static_cast<int>(rows_.size()); }
    bool empty() const;
    // Accumulates, truncating to the smaller order when they differ.
    void add(int row, int col, const Jet& v);
    const std::map<int, Jet>& row(int r) const { return rows_[r]; }
    int order() const;  // smallest entry order; large when empty
    size_t nonzeros() const;

private:
    std::vector<std::map<int, Jet>> rows_;
};

SparseJetMatrix operator*(const SparseJetMatrix& a, const SparseJetMatrix& b);
SparseJetMatrix operator+(const SparseJetMatrix& a, const SparseJetMatrix& b);
SparseJetMatrix operator*(const Jet& s, const SparseJetMatrix& a);
SparseJetMatrix conj_transpose(const SparseJetMatrix& a);
SparseJetMatrix d(const SparseJetMatrix& a, int var);

// P = sum_A sigma_A d_A + c on the coefficient vector.
struct FormOperator {
    std::string name;
    int n = 0;
    int rank = 1;
    std::vector<SparseJetMatrix> sigma;  // 2n entries, empty when P is algebraic
    SparseJetMatrix c;

    bool differential() const;
    int order() const;
};

FormJet apply(const FormOperator& op, const FormJet& phi);
FormOperator operator+(const FormOperator& a, const FormOperator& b);
FormOperator operator-(const FormOperator& a, const FormOperator& b);
FormOperator operator*(cplx s, const FormOperator& a);
// Composition of two algebraic operators (a after b).
FormOperator compose(const FormOperator& a, const FormOperator& b);
// Acts on each fiber component alike.
FormOperator extend(const FormOperator& scalar_op, int rank);

// Operator calculus for one metric jet: elementary operators, the Hermitian inner
// product, adjoints and the torsion operators.
class FormCalculus {
public:
    explicit FormCalculus(const MetricJet& mj);

    int n() const { return n_; }
    const MetricJet& metric() const { return mj_; }

    FormOperator wedge_op(int b) const;        // e_b ^
    FormOperator contraction(int b) const;     // interior product with d/dz^b
    FormOperator L() const;                    // sqrt(-1) h_{i jbar} dz^i ^ dzbar^j ^
    FormOperator Lambda() const;               // sqrt(-1) h^{i jbar} I_i I_{jbar}
    FormOperator del() const;
    FormOperator delbar() const;
    FormOperator nabla1(int i) const;          // type-preserving covariant derivative along z^i
    FormOperator nabla2(int j) const;          // along zbar^j
    FormOperator D1() const;                   // dz^i ^ nabla1_i
    FormOperator D2() const;                   // dzbar^j ^ nabla2_j
    FormOperator delta1_0() const;             // -h^{i jbar} I_i nabla2_j
    FormOperator delta2_0() const;             // -h^{j ibar} I_{ibar} nabla1_j
    FormOperator A() const;
    FormOperator B() const;
    FormOperator C() const;
    FormOperator del_omega() const;            // 2 d omega ^ (the (2,1) part)
    FormOperator tau() const;                  // [Lambda, 2 d omega ^]

    // Conjugate operator phi -> conj(P conj(phi)); scalar operators only.
    FormOperator conjugate(const FormOperator& op) const;
    // Pointwise adjoint of an algebraic operator, G^{-1} T^dagger G.
    FormOperator adjoint(const FormOperator& op, const JetMat* fiber = nullptr) const;
    // Formal adjoint for the volume det(h) and the pointwise inner product.
    FormOperator formal_adjoint(const FormOperator& op, const JetMat* fiber = nullptr) const;

    // Gram matrix G_{J,I} = <e_I, e_J> and its inverse for the given fiber metric.
    SparseJetMatrix gram(const JetMat* fiber = nullptr) const;
    SparseJetMatrix gram_inverse(const JetMat* fiber = nullptr) const;
    // <phi, psi> = psi^dagger G phi as a jet.
    Jet inner(const FormJet& phi, const FormJet& psi, const JetMat* fiber = nullptr) const;

    FormJet kahler_form() const;               // (sqrt(-1)/2) h_{i jbar} dz^i ^ dzbar^j
    std::vector<Jet> torsion_trace() const;    // eta_l = Gamma_{l jbar}^{jbar}

    // Bundle-valued exterior derivatives for a connection on a trivialized bundle.
    FormOperator del_E(const ConnectionJet& conn) const;
    FormOperator delbar_E(const ConnectionJet& conn) const;

private:
    const MetricJet& mj_;
    int n_;
    int cap_;
    ChristoffelTable gamma_;
    Jet rho_, rho_inv_;

    Jet one() const;
    FormOperator algebraic(const std::string& name) const;
    FormOperator first_order(const std::string& name) const;
    // sum_k M coefficient words for nabla along direction a (connection part only)
    SparseJetMatrix nabla_part(int a) const;
};

struct IdentityResidual {
    std::string name;
    double residual = 0.0;
};

struct IdentityReport {
    std::vector<IdentityResidual> rows;
    int trials = 0;
    std::uint64_t seed = 0;
    double max_residual() const;
    const IdentityResidual* find(const std::string& name) const;
};

// Scalar-form identities on random forms of every bidegree in turn.
IdentityReport identity_suite(const MetricJet& mj, int trials, std::uint64_t seed, int form_order = 2);
// Bundle-valued identities; throws PreconditionError when conn is not metric-compatible.
IdentityReport bundle_identity_suite(const MetricJet& mj, const ConnectionJet& conn, int trials,
                                     std::uint64_t seed, int form_order = 2);

// Random metric connection on a rank-r bundle: random z-direction matrices, fiber metric
// I + a small Hermitian jet, zbar-direction matrices solved from compatibility.
ConnectionJet random_metric_connection(int n, int rank, int order, Rng& rng, double scale = 0.3,
                                       bool constant_metric = false);

// Tr_omega R^E
CMatrix second_hermitian_ricci(const ConnectionJet& conn, const MetricJet& mj);

}  // namespace hermitia
