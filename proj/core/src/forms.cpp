#include "hermitia/forms.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <numeric>

#include "hermitia/positivity.hpp"

namespace hermitia {

namespace {

const cplx I(0.0, 1.0);

int sign_below(unsigned mask, int b) { return (std::popcount(mask & ((1u << b) - 1u)) & 1) ? -1 : 1; }

// Add with truncation to the smaller order; an invalid accumulator takes v.
void accumulate(Jet& acc, const Jet& v) {
    if (!acc.valid()) {
        acc = v;
        return;
    }
    if (acc.order() == v.order()) {
        acc += v;
    } else if (acc.order() < v.order()) {
        acc += truncate(v, acc.order());
    } else {
        acc = truncate(acc, v.order()) + v;
    }
}

// (p,q) bidegree of a mask
int popcount_low(unsigned mask, int n) { return std::popcount(mask & ((1u << n) - 1u)); }

}  // namespace

unsigned form_mask(const std::vector<int>& holo, const std::vector<int>& anti, int n) {
    unsigned m = 0;
    for (int i : holo) m |= 1u << i;
    for (int j : anti) m |= 1u << (n + j);
    return m;
}

int form_p(unsigned mask, int n) { return popcount_low(mask, n); }
int form_q(unsigned mask, int n) { return std::popcount(mask >> n); }

FormJet FormJet::zero(int n, int rank, int order) {
    if (2 * n > 12) throw StructuralError("FormJet: dimension too large");
    FormJet f;
    f.n = n;
    f.rank = rank;
    f.c.assign(static_cast<size_t>(1u << (2 * n)) * rank, Jet(n, order));
    return f;
}

FormJet FormJet::function(const Jet& v) {
    auto f = zero(v.n(), 1, v.order());
    f.c[0] = v;
    return f;
}

FormJet FormJet::section(const std::vector<Jet>& s) {
    if (s.empty()) throw StructuralError("FormJet::section: empty section");
    auto f = zero(s[0].n(), static_cast<int>(s.size()), s[0].order());
    for (size_t a = 0; a < s.size(); ++a) f.c[a] = s[a];
    return f;
}

FormJet FormJet::component(int p, int q) const {
    FormJet out = *this;
    for (unsigned m = 0; m < static_cast<unsigned>(dim()); ++m)
        if (form_p(m, n) != p || form_q(m, n) != q)
            for (int a = 0; a < rank; ++a) out.at(m, a) = Jet(n, order());
    return out;
}

double FormJet::max_abs() const {
    double m = 0.0;
    for (const auto& j : c) m = std::max(m, j.max_abs());
    return m;
}

namespace {

void check_same(const FormJet& a, const FormJet& b) {
    if (a.n != b.n || a.rank != b.rank) throw StructuralError("FormJet: shape mismatch");
}

}  // namespace

FormJet truncate(const FormJet& a, int order) {
    FormJet out = a;
    for (auto& j : out.c) j = truncate(j, order);
    return out;
}

FormJet operator+(const FormJet& a, const FormJet& b) {
    check_same(a, b);
    const int K = std::min(a.order(), b.order());
    FormJet out = truncate(a, K);
    for (size_t k = 0; k < out.c.size(); ++k) out.c[k] += truncate(b.c[k], K);
    return out;
}

FormJet operator-(const FormJet& a, const FormJet& b) { return a + cplx(-1.0) * b; }

FormJet operator*(cplx s, const FormJet& a) {
    FormJet out = a;
    for (auto& j : out.c) j *= s;
    return out;
}

double residual(const FormJet& a, const FormJet& b) { return (a - b).max_abs(); }

FormJet conj(const FormJet& a) {
    if (a.rank != 1) throw StructuralError("conj: scalar forms only");
    const int n = a.n;
    FormJet out = FormJet::zero(n, 1, a.order());
    const unsigned lo = (1u << n) - 1u;
    for (unsigned m = 0; m < static_cast<unsigned>(a.dim()); ++m) {
        const unsigned cm = ((m & lo) << n) | (m >> n);
        const int s = (form_p(m, n) * form_q(m, n)) % 2 ? -1 : 1;
        out.at(cm) = conj(a.at(m)) * cplx(s);
    }
    return out;
}

FormJet wedge(const FormJet& a, const FormJet& b) {
    if (a.rank != 1 || a.n != b.n) throw StructuralError("wedge: left factor must be scalar");
    const int n = a.n, r = b.rank;
    const int K = std::min(a.order(), b.order());
    FormJet out = FormJet::zero(n, r, K);
    for (unsigned m1 = 0; m1 < static_cast<unsigned>(a.dim()); ++m1) {
        if (a.at(m1).is_zero()) continue;
        for (unsigned m2 = 0; m2 < static_cast<unsigned>(a.dim()); ++m2) {
            if (m1 & m2) continue;
            int inv = 0;
            for (int bit = 0; bit < 2 * n; ++bit)
                if (m2 & (1u << bit)) inv += std::popcount(m1 >> (bit + 1));
            const cplx s = inv % 2 ? -1.0 : 1.0;
            for (int al = 0; al < r; ++al) out.at(m1 | m2, al) += mult(a.at(m1), b.at(m2, al)) * s;
        }
    }
    return out;
}

FormJet tensor(const FormJet& phi, const FormJet& s) {
    if (phi.rank != 1) throw StructuralError("tensor: phi must be scalar");
    const int K = std::min(phi.order(), s.order());
    FormJet out = FormJet::zero(phi.n, s.rank, K);
    for (unsigned m = 0; m < static_cast<unsigned>(phi.dim()); ++m)
        for (int a = 0; a < s.rank; ++a) out.at(m, a) = mult(phi.at(m), s.at(0, a));
    return out;
}

FormJet pairing(const FormJet& phi, const FormJet& psi, const JetMat& H) {
    check_same(phi, psi);
    const int r = phi.rank;
    const int K = std::min({phi.order(), psi.order(), H.order()});
    FormJet out = FormJet::zero(phi.n, 1, K);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
            FormJet pa = FormJet::zero(phi.n, 1, phi.order());
            FormJet pb = FormJet::zero(phi.n, 1, psi.order());
            for (unsigned m = 0; m < static_cast<unsigned>(phi.dim()); ++m) {
                pa.at(m) = phi.at(m, a);
                pb.at(m) = psi.at(m, b);
            }
            FormJet w = wedge(pa, conj(pb));
            for (auto& j : w.c) j = mult(j, H(a, b));
            out = out + w;
        }
    return out;
}

Jet random_jet(int n, int order, Rng& rng, double scale) {
    Jet j(n, order);
    for (int k = 0; k < j.size(); ++k) j[k] = random_complex(rng, scale);
    return j;
}

FormJet random_form(int n, int rank, int order, Rng& rng, int p, int q, double scale) {
    FormJet f = FormJet::zero(n, rank, order);
    for (unsigned m = 0; m < static_cast<unsigned>(f.dim()); ++m) {
        if (p >= 0 && (form_p(m, n) != p || form_q(m, n) != q)) continue;
        for (int a = 0; a < rank; ++a) f.at(m, a) = random_jet(n, order, rng, scale);
    }
    return f;
}

// ---- sparse jet matrices ----

bool SparseJetMatrix::empty() const {
    for (const auto& r : rows_)
        if (!r.empty()) return false;
    return true;
}

void SparseJetMatrix::add(int row, int col, const Jet& v) { accumulate(rows_[row][col], v); }

int SparseJetMatrix::order() const {
    int k = INT_MAX;
    for (const auto& r : rows_)
        for (const auto& [c, j] : r) k = std::min(k, j.order());
    return k;
}

size_t SparseJetMatrix::nonzeros() const {
    size_t s = 0;
    for (const auto& r : rows_) s += r.size();
    return s;
}

SparseJetMatrix operator*(const SparseJetMatrix& a, const SparseJetMatrix& b) {
    SparseJetMatrix out(a.dim());
    for (int r = 0; r < a.dim(); ++r)
        for (const auto& [k, x] : a.row(r))
            for (const auto& [c, y] : b.row(k)) out.add(r, c, mult(x, y));
    return out;
}

SparseJetMatrix operator+(const SparseJetMatrix& a, const SparseJetMatrix& b) {
    if (a.dim() == 0) return b;
    if (b.dim() == 0) return a;
    SparseJetMatrix out = a;
    for (int r = 0; r < b.dim(); ++r)
        for (const auto& [c, y] : b.row(r)) out.add(r, c, y);
    return out;
}

SparseJetMatrix operator*(const Jet& s, const SparseJetMatrix& a) {
    SparseJetMatrix out(a.dim());
    for (int r = 0; r < a.dim(); ++r)
        for (const auto& [c, x] : a.row(r)) out.add(r, c, mult(s, x));
    return out;
}

SparseJetMatrix conj_transpose(const SparseJetMatrix& a) {
    SparseJetMatrix out(a.dim());
    for (int r = 0; r < a.dim(); ++r)
        for (const auto& [c, x] : a.row(r)) out.add(c, r, conj(x));
    return out;
}

SparseJetMatrix d(const SparseJetMatrix& a, int var) {
    SparseJetMatrix out(a.dim());
    for (int r = 0; r < a.dim(); ++r)
        for (const auto& [c, x] : a.row(r)) out.add(r, c, d(x, var));
    return out;
}

namespace {

SparseJetMatrix scaled(cplx s, const SparseJetMatrix& a) {
    SparseJetMatrix out(a.dim());
    for (int r = 0; r < a.dim(); ++r)
        for (const auto& [c, x] : a.row(r)) out.add(r, c, x * s);
    return out;
}

std::vector<Jet> times(const SparseJetMatrix& a, const std::vector<Jet>& x, int K) {
    std::vector<Jet> out(x.size(), Jet(x[0].n(), K));
    for (int r = 0; r < a.dim(); ++r)
        for (const auto& [c, m] : a.row(r)) out[r] += truncate(mult(m, x[c]), K);
    return out;
}

}  // namespace

// ---- operators ----

bool FormOperator::differential() const {
    for (const auto& s : sigma)
        if (!s.empty()) return true;
    return false;
}

int FormOperator::order() const {
    int k = c.order();
    for (const auto& s : sigma) k = std::min(k, s.order());
    return k;
}

FormJet apply(const FormOperator& op, const FormJet& phi) {
    if (phi.n != op.n || phi.rank != op.rank) throw StructuralError("apply " + op.name + ": shape mismatch");
    const bool diff = op.differential();
    if (diff && phi.order() < 1) throw OrderExhausted("apply " + op.name + ": form order exhausted");
    const int K = std::min(op.order(), phi.order() - (diff ? 1 : 0));
    if (K < 0) throw OrderExhausted("apply " + op.name + ": operator order exhausted");
    FormJet out = FormJet::zero(op.n, op.rank, K);
    if (op.c.dim()) out.c = times(op.c, phi.c, K);
    for (int A = 0; A < static_cast<int>(op.sigma.size()); ++A) {
        if (op.sigma[A].empty()) continue;
        std::vector<Jet> dphi;
        dphi.reserve(phi.c.size());
        for (const auto& j : phi.c) dphi.push_back(d(j, A));
        const auto t = times(op.sigma[A], dphi, K);
        for (size_t k = 0; k < t.size(); ++k) out.c[k] += t[k];
    }
    return out;
}

namespace {

FormOperator combine(const FormOperator& a, const FormOperator& b, cplx sb, const std::string& name) {
    if (a.n != b.n || a.rank != b.rank) throw StructuralError("operator shape mismatch");
    FormOperator out;
    out.name = name;
    out.n = a.n;
    out.rank = a.rank;
    out.c = a.c + scaled(sb, b.c);
    const size_t m = std::max(a.sigma.size(), b.sigma.size());
    out.sigma.resize(m);
    for (size_t A = 0; A < m; ++A) {
        SparseJetMatrix sa = A < a.sigma.size() ? a.sigma[A] : SparseJetMatrix();
        SparseJetMatrix s2 = A < b.sigma.size() ? scaled(sb, b.sigma[A]) : SparseJetMatrix();
        out.sigma[A] = sa + s2;
    }
    return out;
}

}  // namespace

FormOperator operator+(const FormOperator& a, const FormOperator& b) {
    return combine(a, b, 1.0, "(" + a.name + "+" + b.name + ")");
}

FormOperator operator-(const FormOperator& a, const FormOperator& b) {
    return combine(a, b, -1.0, "(" + a.name + "-" + b.name + ")");
}

FormOperator operator*(cplx s, const FormOperator& a) {
    FormOperator out = a;
    out.c = scaled(s, a.c);
    for (auto& m : out.sigma) m = scaled(s, m);
    return out;
}

FormOperator compose(const FormOperator& a, const FormOperator& b) {
    if (a.differential() || b.differential()) throw StructuralError("compose: algebraic operators only");
    FormOperator out;
    out.name = a.name + "*" + b.name;
    out.n = a.n;
    out.rank = a.rank;
    out.c = a.c * b.c;
    return out;
}

FormOperator extend(const FormOperator& op, int r) {
    if (op.rank != 1) throw StructuralError("extend: scalar operator expected");
    auto ext = [r](const SparseJetMatrix& m) {
        if (m.dim() == 0) return m;
        SparseJetMatrix out(m.dim() * r);
        for (int row = 0; row < m.dim(); ++row)
            for (const auto& [col, x] : m.row(row))
                for (int a = 0; a < r; ++a) out.add(row * r + a, col * r + a, x);
        return out;
    };
    FormOperator out;
    out.name = op.name;
    out.n = op.n;
    out.rank = r;
    out.c = ext(op.c);
    for (const auto& s : op.sigma) out.sigma.push_back(ext(s));
    return out;
}

// ---- the calculus ----

namespace {

// A word of elementary operators applied right to left: 'w' wedge, 'i' contraction.
struct Letter {
    char kind;
    int bit;
};

bool apply_word(unsigned& mask, int& sign, const std::vector<Letter>& word) {
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const unsigned b = 1u << it->bit;
        if (it->kind == 'w') {
            if (mask & b) return false;
        } else if (!(mask & b)) {
            return false;
        }
        sign *= sign_below(mask, it->bit);
        mask ^= b;
    }
    return true;
}

void add_word(SparseJetMatrix& m, int n, const Jet& coeff, const std::vector<Letter>& word) {
    for (unsigned mask = 0; mask < (1u << (2 * n)); ++mask) {
        unsigned out = mask;
        int s = 1;
        if (!apply_word(out, s, word)) continue;
        m.add(static_cast<int>(out), static_cast<int>(mask), coeff * cplx(s));
    }
}

// Product of minors det M[rows, cols] over the jets of a square matrix.
Jet minor(const JetMat& M, const std::vector<int>& rows, const std::vector<int>& cols, int n, int K) {
    const size_t k = rows.size();
    if (k == 0) return Jet::constant(n, K, 1.0);
    if (k == 1) return truncate(M(rows[0], cols[0]), K);
    Jet s(n, K);
    for (size_t c = 0; c < k; ++c) {
        std::vector<int> r2(rows.begin() + 1, rows.end()), c2;
        for (size_t x = 0; x < k; ++x)
            if (x != c) c2.push_back(cols[x]);
        Jet t = mult(M(rows[0], cols[c]), minor(M, r2, c2, n, K));
        if (c % 2) t = -t;
        s += truncate(t, K);
    }
    return s;
}

std::vector<int> bits_of(unsigned m, int offset, int n) {
    std::vector<int> out;
    for (int b = 0; b < n; ++b)
        if (m & (1u << (offset + b))) out.push_back(b);
    return out;
}

}  // namespace

FormCalculus::FormCalculus(const MetricJet& mj) : mj_(mj), n_(mj.n), cap_(mj.order) {
    if (mj.order < 2) throw OrderExhausted("FormCalculus: metric jet order >= 2 required");
    gamma_ = levi_civita(mj);
    rho_ = determinant(mj.h);
    rho_inv_ = inverse(rho_);
}

Jet FormCalculus::one() const { return Jet::constant(n_, cap_, 1.0); }

FormOperator FormCalculus::algebraic(const std::string& name) const {
    FormOperator op;
    op.name = name;
    op.n = n_;
    op.rank = 1;
    op.c = SparseJetMatrix(1 << (2 * n_));
    return op;
}

FormOperator FormCalculus::first_order(const std::string& name) const {
    FormOperator op = algebraic(name);
    op.sigma.assign(2 * n_, SparseJetMatrix(1 << (2 * n_)));
    return op;
}

FormOperator FormCalculus::wedge_op(int b) const {
    auto op = algebraic("e" + std::to_string(b));
    add_word(op.c, n_, one(), {{'w', b}});
    return op;
}

FormOperator FormCalculus::contraction(int b) const {
    auto op = algebraic("I" + std::to_string(b));
    add_word(op.c, n_, one(), {{'i', b}});
    return op;
}

FormOperator FormCalculus::L() const {
    auto op = algebraic("L");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) add_word(op.c, n_, mj_.h(i, j) * I, {{'w', i}, {'w', n_ + j}});
    return op;
}

FormOperator FormCalculus::Lambda() const {
    auto op = algebraic("Lambda");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) add_word(op.c, n_, mj_.up(i, j) * I, {{'i', i}, {'i', n_ + j}});
    return op;
}

FormOperator FormCalculus::del() const {
    auto op = first_order("del");
    for (int i = 0; i < n_; ++i) add_word(op.sigma[i], n_, one(), {{'w', i}});
    return op;
}

FormOperator FormCalculus::delbar() const {
    auto op = first_order("delbar");
    for (int j = 0; j < n_; ++j) add_word(op.sigma[n_ + j], n_, one(), {{'w', n_ + j}});
    return op;
}

SparseJetMatrix FormCalculus::nabla_part(int a) const {
    SparseJetMatrix m(1 << (2 * n_));
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
            add_word(m, n_, -gamma_(a, j, k), {{'w', j}, {'i', k}});
            add_word(m, n_, -gamma_(a, n_ + j, n_ + k), {{'w', n_ + j}, {'i', n_ + k}});
        }
    return m;
}

FormOperator FormCalculus::nabla1(int i) const {
    auto op = first_order("nabla1_" + std::to_string(i));
    add_word(op.sigma[i], n_, one(), {});
    op.c = nabla_part(i);
    return op;
}

FormOperator FormCalculus::nabla2(int j) const {
    auto op = first_order("nabla2_" + std::to_string(j));
    add_word(op.sigma[n_ + j], n_, one(), {});
    op.c = nabla_part(n_ + j);
    return op;
}

FormOperator FormCalculus::D1() const {
    auto op = first_order("D1");
    for (int i = 0; i < n_; ++i) {
        const auto w = wedge_op(i);
        add_word(op.sigma[i], n_, one(), {{'w', i}});
        op.c = op.c + w.c * nabla_part(i);
    }
    return op;
}

FormOperator FormCalculus::D2() const {
    auto op = first_order("D2");
    for (int j = 0; j < n_; ++j) {
        const auto w = wedge_op(n_ + j);
        add_word(op.sigma[n_ + j], n_, one(), {{'w', n_ + j}});
        op.c = op.c + w.c * nabla_part(n_ + j);
    }
    return op;
}

FormOperator FormCalculus::delta1_0() const {
    // -h^{i jbar} I_i nabla2_j
    auto op = first_order("delta1_0");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const Jet coeff = -mj_.up(i, j);
            add_word(op.sigma[n_ + j], n_, coeff, {{'i', i}});
            SparseJetMatrix ci(1 << (2 * n_));
            add_word(ci, n_, coeff, {{'i', i}});
            op.c = op.c + ci * nabla_part(n_ + j);
        }
    return op;
}

FormOperator FormCalculus::delta2_0() const {
    // -h^{j ibar} I_{ibar} nabla1_j
    auto op = first_order("delta2_0");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const Jet coeff = -mj_.up(j, i);
            add_word(op.sigma[j], n_, coeff, {{'i', n_ + i}});
            SparseJetMatrix ci(1 << (2 * n_));
            add_word(ci, n_, coeff, {{'i', n_ + i}});
            op.c = op.c + ci * nabla_part(j);
        }
    return op;
}

FormOperator FormCalculus::A() const {
    // -h^{k lbar} h_{i mbar} Gamma_{s lbar}^{mbar} dz^s ^ dz^i ^ I_k
    auto op = algebraic("A");
    for (int s = 0; s < n_; ++s)
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                Jet coeff(n_, cap_ - 1);
                for (int l = 0; l < n_; ++l)
                    for (int m = 0; m < n_; ++m)
                        coeff -= mult(mult(mj_.up(k, l), mj_.h(i, m)), gamma_(s, n_ + l, n_ + m));
                add_word(op.c, n_, coeff, {{'w', s}, {'w', i}, {'i', k}});
            }
    return op;
}

FormOperator FormCalculus::B() const {
    // -2 Gamma_{i jbar}^{lbar} dz^i ^ dzbar^j ^ I_{lbar}
    auto op = algebraic("B");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int l = 0; l < n_; ++l)
                add_word(op.c, n_, gamma_(i, n_ + j, n_ + l) * cplx(-2.0), {{'w', i}, {'w', n_ + j}, {'i', n_ + l}});
    return op;
}

std::vector<Jet> FormCalculus::torsion_trace() const {
    std::vector<Jet> eta;
    for (int l = 0; l < n_; ++l) {
        Jet s(n_, gamma_.order);
        for (int j = 0; j < n_; ++j) s += gamma_(l, n_ + j, n_ + j);
        eta.push_back(s);
    }
    return eta;
}

FormOperator FormCalculus::C() const {
    auto op = algebraic("C");
    const auto eta = torsion_trace();
    for (int j = 0; j < n_; ++j) add_word(op.c, n_, eta[j] * cplx(2.0), {{'w', j}});
    return op;
}

FormOperator FormCalculus::del_omega() const {
    // sqrt(-1) d_k h_{i jbar} dz^k ^ dz^i ^ dzbar^j ^
    auto op = algebraic("2dw");
    for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                add_word(op.c, n_, d(mj_.h(i, j), k) * I, {{'w', k}, {'w', i}, {'w', n_ + j}});
    return op;
}

FormOperator FormCalculus::tau() const {
    const auto lam = Lambda();
    const auto w = del_omega();
    auto op = compose(lam, w) - compose(w, lam);
    op.name = "tau";
    return op;
}

FormOperator FormCalculus::conjugate(const FormOperator& op) const {
    if (op.rank != 1) throw StructuralError("conjugate: scalar operators only");
    const unsigned lo = (1u << n_) - 1u;
    auto cm = [&](int m) { return static_cast<int>(((m & lo) << n_) | (static_cast<unsigned>(m) >> n_)); };
    auto sg = [&](int m) { return (form_p(m, n_) * form_q(m, n_)) % 2 ? -1.0 : 1.0; };
    auto conj_mat = [&](const SparseJetMatrix& m) {
        if (m.dim() == 0) return m;
        SparseJetMatrix out(m.dim());
        for (int r = 0; r < m.dim(); ++r)
            for (const auto& [c, x] : m.row(r)) out.add(cm(r), cm(c), conj(x) * cplx(sg(r) * sg(c)));
        return out;
    };
    FormOperator out;
    out.name = "conj(" + op.name + ")";
    out.n = op.n;
    out.rank = 1;
    out.c = conj_mat(op.c);
    if (!op.sigma.empty()) {
        out.sigma.assign(2 * n_, SparseJetMatrix());
        for (int A = 0; A < 2 * n_; ++A) out.sigma[A < n_ ? A + n_ : A - n_] = conj_mat(op.sigma[A]);
    }
    return out;
}

SparseJetMatrix FormCalculus::gram(const JetMat* fiber) const {
    const int r = fiber ? fiber->rows() : 1;
    const int dim = 1 << (2 * n_);
    SparseJetMatrix G(dim * r);
    const JetMat& P = mj_.hinv;  // P(k,i) = hinv(k,i) = <dz^i, dz^k>
    for (unsigned J = 0; J < static_cast<unsigned>(dim); ++J)
        for (unsigned Im = 0; Im < static_cast<unsigned>(dim); ++Im) {
            if (form_p(J, n_) != form_p(Im, n_) || form_q(J, n_) != form_q(Im, n_)) continue;
            // unbarred block det hinv[J, I]; barred block det hinv^T[J, I] = det hinv[I, J]
            Jet g = mult(minor(P, bits_of(J, 0, n_), bits_of(Im, 0, n_), n_, cap_),
                         minor(P, bits_of(Im, n_, n_), bits_of(J, n_, n_), n_, cap_));
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b) {
                    const Jet h = fiber ? (*fiber)(a, b) : one();
                    G.add(static_cast<int>(J) * r + b, static_cast<int>(Im) * r + a, mult(g, h));
                }
        }
    return G;
}

SparseJetMatrix FormCalculus::gram_inverse(const JetMat* fiber) const {
    const int r = fiber ? fiber->rows() : 1;
    const int dim = 1 << (2 * n_);
    SparseJetMatrix Gi(dim * r);
    const JetMat Hinv = fiber ? inverse(*fiber) : JetMat::identity(1, n_, cap_);
    const JetMat& h = mj_.h;
    for (unsigned Im = 0; Im < static_cast<unsigned>(dim); ++Im)
        for (unsigned J = 0; J < static_cast<unsigned>(dim); ++J) {
            if (form_p(J, n_) != form_p(Im, n_) || form_q(J, n_) != form_q(Im, n_)) continue;
            Jet g = mult(minor(h, bits_of(Im, 0, n_), bits_of(J, 0, n_), n_, cap_),
                         minor(h, bits_of(J, n_, n_), bits_of(Im, n_, n_), n_, cap_));
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b)
                    Gi.add(static_cast<int>(Im) * r + a, static_cast<int>(J) * r + b, mult(g, Hinv(b, a)));
        }
    return Gi;
}

Jet FormCalculus::inner(const FormJet& phi, const FormJet& psi, const JetMat* fiber) const {
    const auto G = gram(fiber);
    const int K = std::min({phi.order(), psi.order(), G.order()});
    const auto Gphi = times(G, phi.c, K);
    Jet s(n_, K);
    for (size_t k = 0; k < Gphi.size(); ++k) s += truncate(mult(conj(psi.c[k]), Gphi[k]), K);
    return s;
}

FormOperator FormCalculus::adjoint(const FormOperator& op, const JetMat* fiber) const {
    if (op.differential()) throw StructuralError("adjoint: algebraic operator expected; use formal_adjoint");
    FormOperator out = op;
    out.name = op.name + "^*";
    out.c = gram_inverse(fiber) * (conj_transpose(op.c) * gram(fiber));
    return out;
}

FormOperator FormCalculus::formal_adjoint(const FormOperator& op, const JetMat* fiber) const {
    const auto G = gram(fiber);
    const auto Gi = gram_inverse(fiber);
    FormOperator out;
    out.name = op.name + "^*";
    out.n = op.n;
    out.rank = op.rank;
    out.c = op.c.dim() ? Gi * (conj_transpose(op.c) * G) : SparseJetMatrix(G.dim());
    out.sigma.assign(2 * n_, SparseJetMatrix());
    SparseJetMatrix div(G.dim());
    for (int A = 0; A < static_cast<int>(op.sigma.size()); ++A) {
        if (op.sigma[A].empty()) continue;
        const int Abar = A < n_ ? A + n_ : A - n_;
        const auto sG = conj_transpose(op.sigma[A]) * G;
        out.sigma[Abar] = scaled(-1.0, Gi * sG);
        div = div + d(rho_ * sG, Abar);
    }
    out.c = out.c + scaled(-1.0, rho_inv_ * (Gi * div));
    return out;
}

FormJet FormCalculus::kahler_form() const {
    FormJet w = FormJet::zero(n_, 1, cap_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) w.at(form_mask({i}, {j}, n_)) = mj_.h(i, j) * (0.5 * I);
    return w;
}

FormOperator FormCalculus::del_E(const ConnectionJet& conn) const {
    auto op = extend(del(), conn.rank);
    op.name = "del_E";
    const int r = conn.rank;
    for (int i = 0; i < n_; ++i) {
        SparseJetMatrix w(1 << (2 * n_));
        add_word(w, n_, one(), {{'w', i}});
        for (int row = 0; row < w.dim(); ++row)
            for (const auto& [col, x] : w.row(row))
                for (int b = 0; b < r; ++b)
                    for (int a = 0; a < r; ++a) op.c.add(row * r + b, col * r + a, mult(x, conn.theta[i](b, a)));
    }
    return op;
}

FormOperator FormCalculus::delbar_E(const ConnectionJet& conn) const {
    auto op = extend(delbar(), conn.rank);
    op.name = "delbar_E";
    const int r = conn.rank;
    for (int j = 0; j < n_; ++j) {
        SparseJetMatrix w(1 << (2 * n_));
        add_word(w, n_, one(), {{'w', n_ + j}});
        for (int row = 0; row < w.dim(); ++row)
            for (const auto& [col, x] : w.row(row))
                for (int b = 0; b < r; ++b)
                    for (int a = 0; a < r; ++a)
                        op.c.add(row * r + b, col * r + a, mult(x, conn.theta[n_ + j](b, a)));
    }
    return op;
}

// ---- suites ----

double IdentityReport::max_residual() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.residual);
    return m;
}

const IdentityResidual* IdentityReport::find(const std::string& name) const {
    for (const auto& r : rows)
        if (r.name == name) return &r;
    return nullptr;
}

namespace {

struct Tracker {
    std::vector<IdentityResidual> rows;
    void note(const std::string& name, double v) {
        for (auto& r : rows)
            if (r.name == name) {
                r.residual = std::max(r.residual, v);
                return;
            }
        rows.push_back({name, v});
    }
};

FormJet commutator(const FormOperator& a, const FormOperator& b, const FormJet& phi) {
    return apply(a, apply(b, phi)) - apply(b, apply(a, phi));
}

}  // namespace

IdentityReport identity_suite(const MetricJet& mj, int trials, std::uint64_t seed, int form_order) {
    if (trials < 1) throw StructuralError("identity_suite: trials >= 1 required");
    const int n = mj.n;
    FormCalculus fc(mj);
    const auto L = fc.L(), Lam = fc.Lambda();
    const auto A = fc.A(), B = fc.B(), C = fc.C(), tau = fc.tau();
    const auto Abar_s = fc.adjoint(fc.conjugate(A));
    const auto Bbar_s = fc.adjoint(fc.conjugate(B));
    const auto Cbar_s = fc.adjoint(fc.conjugate(C));
    const auto taubar_s = fc.adjoint(fc.conjugate(tau));
    const auto del = fc.del(), delbar = fc.delbar();
    const auto delbar_s = fc.formal_adjoint(delbar);
    const auto D1 = fc.D1(), D2 = fc.D2();
    const auto delta2 = fc.formal_adjoint(D2);
    const auto delta2_0 = fc.delta2_0();
    const auto Lam_adj = fc.adjoint(L);

    Tracker t;
    Rng rng(seed);
    const int nb = (n + 1) * (n + 1);
    for (int k = 0; k < trials; ++k) {
        const int idx = (k * 7 + 5) % nb;
        const int p = idx / (n + 1), q = idx % (n + 1);
        const FormJet phi = k == trials - 1 ? random_form(n, 1, form_order, rng)
                                            : random_form(n, 1, form_order, rng, p, q);
        t.note("lambda_is_adjoint_of_L", residual(apply(Lam, phi), apply(Lam_adj, phi)));
        t.note("tau=A+B+C", residual(apply(tau, phi), apply(A, phi) + apply(B, phi) + apply(C, phi)));
        t.note("[Lambda,A]+iBbar*", (commutator(Lam, A, phi) + I * apply(Bbar_s, phi)).max_abs());
        t.note("[Lambda,B]+i(2Abar*+Bbar*+Cbar*)",
               (commutator(Lam, B, phi) +
                I * (cplx(2.0) * apply(Abar_s, phi) + apply(Bbar_s, phi) + apply(Cbar_s, phi)))
                   .max_abs());
        t.note("[Lambda,C]+iCbar*", (commutator(Lam, C, phi) + I * apply(Cbar_s, phi)).max_abs());
        t.note("del-D1+B/2", (apply(del, phi) - apply(D1, phi) + cplx(0.5) * apply(B, phi)).max_abs());
        t.note("delbar-D2+Bbar/2",
               (apply(delbar, phi) - apply(D2, phi) + cplx(0.5) * apply(fc.conjugate(B), phi)).max_abs());
        t.note("delta2-delta2_0+Cbar*/2",
               (apply(delta2, phi) - apply(delta2_0, phi) + cplx(0.5) * apply(Cbar_s, phi)).max_abs());
        t.note("delbar*-delta2_0+(Bbar*+Cbar*)/2",
               (apply(delbar_s, phi) - apply(delta2_0, phi) + cplx(0.5) * (apply(Bbar_s, phi) + apply(Cbar_s, phi)))
                   .max_abs());
        t.note("[Lambda,D1]-i(delta2+Cbar*/2)",
               (commutator(Lam, D1, phi) - I * (apply(delta2, phi) + cplx(0.5) * apply(Cbar_s, phi))).max_abs());
        t.note("[Lambda,del]-i(delbar*+taubar*)",
               (commutator(Lam, del, phi) - I * (apply(delbar_s, phi) + apply(taubar_s, phi))).max_abs());
        t.note("[delbar*,L]-i(del+tau)",
               (commutator(delbar_s, L, phi) - I * (apply(del, phi) + apply(tau, phi))).max_abs());
        // pointwise adjoint pairing for the algebraic operators
        const FormJet psi = random_form(n, 1, form_order, rng);
        for (const auto* op : {&L, &A, &B, &C}) {
            const auto adj = fc.adjoint(*op);
            const Jet lhs = fc.inner(apply(*op, phi), psi);
            const Jet rhs = fc.inner(phi, apply(adj, psi));
            const int K = std::min(lhs.order(), rhs.order());
            t.note("adjoint_pairing", (truncate(lhs, K) - truncate(rhs, K)).max_abs());
        }
        // metric compatibility of the type-preserving connection on forms
        for (int i = 0; i < n; ++i) {
            const Jet lhs = d(fc.inner(phi, psi), i);
            const Jet rhs = fc.inner(apply(fc.nabla1(i), phi), psi) + fc.inner(phi, apply(fc.nabla2(i), psi));
            const int K = std::min(lhs.order(), rhs.order());
            t.note("nabla_metric_compatible", (truncate(lhs, K) - truncate(rhs, K)).max_abs());
        }
    }
    // torsion one-form identities on the Kahler form
    const FormJet w = fc.kahler_form();
    const FormJet dw = apply(del, w);
    const FormJet lhs = apply(delbar_s, w);
    const FormJet rhs = I * apply(Lam, dw);
    t.note("delbar*w-iLambda(dw)", residual(lhs, rhs));
    FormJet eta_form = FormJet::zero(n, 1, mj.order - 1);
    const auto eta = fc.torsion_trace();
    for (int l = 0; l < n; ++l) eta_form.at(1u << l) = eta[l] * I;
    t.note("iLambda(dw)-i eta dz", residual(rhs, eta_form));
    t.note("C(1)-Lambda(2dw)", residual(apply(C, FormJet::function(Jet::constant(n, mj.order, 1.0))),
                                       apply(Lam, cplx(2.0) * dw)));

    IdentityReport rep;
    rep.rows = std::move(t.rows);
    rep.trials = trials;
    rep.seed = seed;
    return rep;
}

IdentityReport bundle_identity_suite(const MetricJet& mj, const ConnectionJet& conn, int trials, std::uint64_t seed,
                                     int form_order) {
    if (trials < 1) throw StructuralError("bundle_identity_suite: trials >= 1 required");
    if (conn.n != mj.n) throw StructuralError("bundle_identity_suite: dimension mismatch");
    const auto compat = metric_compatibility(conn);
    if (compat.max_violation > 1e-10)
        throw PreconditionError("connection is not metric-compatible: direction " + std::to_string(compat.direction) +
                                ", entry (" + std::to_string(compat.alpha) + "," + std::to_string(compat.beta) +
                                "), violation " + std::to_string(compat.max_violation));
    const int n = mj.n, r = conn.rank;
    FormCalculus fc(mj);
    const JetMat& H = conn.metric;
    const auto L = extend(fc.L(), r), Lam = extend(fc.Lambda(), r);
    const auto tau_s = fc.tau();
    const auto tau = extend(tau_s, r);
    const auto taubar = extend(fc.conjugate(tau_s), r);
    const auto tau_adj = extend(fc.adjoint(tau_s), r);
    const auto taubar_adj = extend(fc.adjoint(fc.conjugate(tau_s)), r);
    const auto dE = fc.del_E(conn), dbE = fc.delbar_E(conn);
    const auto dE_s = fc.formal_adjoint(dE, &H), dbE_s = fc.formal_adjoint(dbE, &H);
    const auto delbar_s = fc.formal_adjoint(fc.delbar());

    Tracker t;
    Rng rng(seed);
    const int nb = (n + 1) * (n + 1);
    for (int k = 0; k < trials; ++k) {
        const int idx = (k * 7 + 5) % nb;
        const int p = idx / (n + 1), q = idx % (n + 1);
        // the commutator identities are linear, so mixed bidegrees are fine
        const FormJet phi = random_form(n, r, form_order, rng);
        t.note("[delbarE*,L]-i(delE+tau)",
               (commutator(dbE_s, L, phi) - I * (apply(dE, phi) + apply(tau, phi))).max_abs());
        t.note("[delE*,L]+i(delbarE+taubar)",
               (commutator(dE_s, L, phi) + I * (apply(dbE, phi) + apply(taubar, phi))).max_abs());
        t.note("[Lambda,delE]-i(delbarE*+taubar*)",
               (commutator(Lam, dE, phi) - I * (apply(dbE_s, phi) + apply(taubar_adj, phi))).max_abs());
        t.note("[Lambda,delbarE]+i(delE*+tau*)",
               (commutator(Lam, dbE, phi) + I * (apply(dE_s, phi) + apply(tau_adj, phi))).max_abs());

        // scalar form times a section
        const FormJet f = random_form(n, 1, form_order + 1, rng, p, q);
        std::vector<Jet> sv;
        for (int a = 0; a < r; ++a) sv.push_back(random_jet(n, form_order + 1, rng));
        const FormJet s = FormJet::section(sv);
        const FormJet fs = tensor(f, s);
        const FormJet curv_fs = apply(dE, apply(dbE, fs)) + apply(dbE, apply(dE, fs));
        const FormJet curv_s = apply(dE, apply(dbE, s)) + apply(dbE, apply(dE, s));
        t.note("curvature_tensorial", residual(curv_fs, wedge(f, curv_s)));

        // adjoint of delbar_E on a product
        FormJet expect = tensor(apply(delbar_s, f), s);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::vector<Jet> nab;
                for (int b = 0; b < r; ++b) {
                    Jet v = d(s.at(0, b), i);
                    for (int a = 0; a < r; ++a) v += truncate(mult(conn.theta[i](b, a), s.at(0, a)), v.order());
                    nab.push_back(v);
                }
                const FormJet Ijf = apply(fc.contraction(n + j), f);
                FormJet term = tensor(Ijf, FormJet::section(nab));
                for (auto& c : term.c) c = mult(c, mj.up(i, j));
                expect = expect - term;
            }
        t.note("delbarE*(f s)-product_rule", residual(apply(dbE_s, fs), expect));

        // metric compatibility of the pairing
        const FormJet psi = random_form(n, r, form_order, rng);
        const FormJet phi_h = random_form(n, r, form_order, rng, p, q);
        const cplx sg = (p + q) % 2 ? -1.0 : 1.0;
        t.note("del{phi,psi}", residual(apply(fc.del(), pairing(phi_h, psi, H)),
                                        pairing(apply(dE, phi_h), psi, H) + sg * pairing(phi_h, apply(dbE, psi), H)));
    }
    // torsion on sections
    {
        std::vector<Jet> sv;
        for (int a = 0; a < r; ++a) sv.push_back(random_jet(n, form_order, rng));
        const FormJet s = FormJet::section(sv);
        const FormJet dsw = apply(delbar_s, fc.kahler_form());
        t.note("tau(s)+2i(delbar*w)s", residual(apply(tau, s), cplx(0.0, -2.0) * wedge(dsw, s)));
    }
    IdentityReport rep;
    rep.rows = std::move(t.rows);
    rep.trials = trials;
    rep.seed = seed;
    return rep;
}

ConnectionJet random_metric_connection(int n, int r, int order, Rng& rng, double scale, bool constant_metric) {
    ConnectionJet c;
    c.n = n;
    c.rank = r;
    JetMat H = JetMat::identity(r, n, order + 1);
    if (!constant_metric) {
        for (int a = 0; a < r; ++a)
            for (int b = a; b < r; ++b) {
                Jet x = random_jet(n, order + 1, rng, 0.1 * scale);
                x[0] = 0.0;
                if (a == b) {
                    H(a, a) = H(a, a) + (x + conj(x)) * cplx(0.5);
                } else {
                    H(a, b) = x;
                    H(b, a) = conj(x);
                }
            }
    }
    c.metric = H;
    c.theta.assign(2 * n, JetMat(r, r, n, order));
    const JetMat Hk = truncate(H, order);
    const JetMat Hinv = inverse(Hk);
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) c.theta[i](a, b) = random_jet(n, order, rng, scale);
        // conj(theta_ibar) = H^{-1} (d_i H - theta_i^T H)
        const JetMat rhs = Hinv * (d(H, i) - transpose(c.theta[i]) * Hk);
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) c.theta[n + i](a, b) = conj(rhs(a, b));
    }
    return c;
}

CMatrix second_hermitian_ricci(const ConnectionJet& conn, const MetricJet& mj) { return second_ricci_of(conn, mj); }

}  // namespace hermitia
