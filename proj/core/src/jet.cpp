#include "hermitia/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace hermitia {

namespace {

void monomials_of_degree(int nvars, int degree, std::vector<std::vector<int>>& out) {
    std::vector<int> e(nvars, 0);
    // lexicographically descending in the first variable
    auto rec = [&](auto&& self, int var, int left) -> void {
        if (var == nvars - 1) {
            e[var] = left;
            out.push_back(e);
            return;
        }
        for (int k = left; k >= 0; --k) {
            e[var] = k;
            self(self, var + 1, left - k);
        }
        e[var] = 0;
    };
    if (nvars == 0) {
        if (degree == 0) out.push_back(e);
        return;
    }
    rec(rec, 0, degree);
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

void require_same(const Jet& a, const Jet& b, const char* what) {
    if (!a.valid() || !b.valid()) throw StructuralError(std::string(what) + ": empty jet");
    if (a.n() != b.n() || a.order() != b.order()) {
        throw StructuralError(std::string(what) + ": jets differ in (n, order): (" +
                              std::to_string(a.n()) + "," + std::to_string(a.order()) + ") vs (" +
                              std::to_string(b.n()) + "," + std::to_string(b.order()) + ")");
    }
}

}  // namespace

JetLayout::JetLayout(int n, int order) : n_(n), order_(order) {
    if (n < 0 || 2 * n > 12) throw StructuralError("jet dimension out of range");
    if (order < 0 || order > 30) throw StructuralError("jet order out of range");
    const int nv = 2 * n;
    std::vector<std::vector<int>> all;
    degree_end_.assign(order + 1, 0);
    for (int deg = 0; deg <= order; ++deg) {
        monomials_of_degree(nv, deg, all);
        degree_end_[deg] = static_cast<int>(all.size());
    }
    exps_.reserve(all.size());
    for (size_t idx = 0; idx < all.size(); ++idx) {
        std::vector<std::uint8_t> e(all[idx].begin(), all[idx].end());
        exps_.push_back(e);
        int deg = 0;
        for (int v : all[idx]) deg += v;
        degree_.push_back(deg);
        lookup_.emplace(key(all[idx]), static_cast<int>(idx));
    }
    const int sz = size();
    for (int a = 0; a < sz; ++a) {
        for (int b = 0; b < sz; ++b) {
            if (degree_[a] + degree_[b] > order) continue;
            std::vector<int> e(nv);
            for (int v = 0; v < nv; ++v) e[v] = exps_[a][v] + exps_[b][v];
            products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                                 static_cast<std::uint32_t>(index(e))});
        }
    }
    deriv_.resize(nv);
    for (int v = 0; v < nv; ++v) {
        for (int idx = 0; idx < sz; ++idx) {
            if (exps_[idx][v] == 0) continue;
            std::vector<int> e(exps_[idx].begin(), exps_[idx].end());
            double f = e[v];
            e[v] -= 1;
            deriv_[v].push_back({static_cast<std::uint32_t>(idx),
                                 static_cast<std::uint32_t>(index(e)), f});
        }
    }
}

std::uint64_t JetLayout::key(const std::vector<int>& exps) const {
    std::uint64_t k = 0;
    for (int v : exps) k = (k << 5) | static_cast<std::uint64_t>(v);
    return k;
}

int JetLayout::index(const std::vector<int>& exps) const {
    int deg = 0;
    for (int v : exps) {
        if (v < 0) return -1;
        deg += v;
    }
    if (deg > order_ || static_cast<int>(exps.size()) != nvars()) return -1;
    auto it = lookup_.find(key(exps));
    return it == lookup_.end() ? -1 : it->second;
}

const JetLayout& JetLayout::get(int n, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, order}];
    if (!slot) slot.reset(new JetLayout(n, order));
    return *slot;
}

Jet::Jet(int n, int order) : layout_(&JetLayout::get(n, order)) {
    c_.assign(layout_->size(), cplx(0.0));
}

Jet Jet::constant(int n, int order, cplx value) {
    Jet j(n, order);
    j.c_[0] = value;
    return j;
}

Jet Jet::variable(int n, int order, int var, cplx value) {
    if (var < 0 || var >= 2 * n) throw StructuralError("variable index out of range");
    Jet j(n, order);
    j.c_[0] = value;
    if (order >= 1) {
        std::vector<int> e(2 * n, 0);
        e[var] = 1;
        j.c_[j.layout_->index(e)] = 1.0;
    }
    return j;
}

cplx Jet::coeff(const std::vector<int>& alpha, const std::vector<int>& beta) const {
    std::vector<int> e(alpha);
    e.insert(e.end(), beta.begin(), beta.end());
    int idx = layout_->index(e);
    return idx < 0 ? cplx(0.0) : c_[idx];
}

void Jet::set_coeff(const std::vector<int>& alpha, const std::vector<int>& beta, cplx v) {
    std::vector<int> e(alpha);
    e.insert(e.end(), beta.begin(), beta.end());
    int idx = layout_->index(e);
    if (idx < 0) throw StructuralError("monomial exceeds jet order");
    c_[idx] = v;
}

cplx Jet::partial(const std::vector<int>& vars) const {
    std::vector<int> e(layout_->nvars(), 0);
    for (int v : vars) e.at(v) += 1;
    int idx = layout_->index(e);
    if (idx < 0) return 0.0;
    double f = 1.0;
    for (int v : e) f *= factorial(v);
    return c_[idx] * f;
}

double Jet::max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

bool Jet::is_zero() const {
    for (const auto& v : c_)
        if (v != cplx(0.0)) return false;
    return true;
}

Jet& Jet::operator+=(const Jet& o) {
    require_same(*this, o, "jet add");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    require_same(*this, o, "jet sub");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
}

Jet Jet::operator-() const {
    Jet r(*this);
    for (auto& v : r.c_) v = -v;
    return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(Jet a, cplx s) { return a *= s; }
Jet operator*(cplx s, Jet a) { return a *= s; }
Jet operator+(Jet a, cplx s) { return a += s; }
Jet operator-(Jet a, cplx s) { return a += -s; }

Jet mul(const Jet& a, const Jet& b) {
    require_same(a, b, "jet_mul");
    Jet r(a.n(), a.order());
    const cplx* pa = a.c_.data();
    const cplx* pb = b.c_.data();
    cplx* pr = r.c_.data();
    for (const auto& t : a.layout_->products()) pr[t.out] += pa[t.a] * pb[t.b];
    return r;
}

Jet operator*(const Jet& a, const Jet& b) { return mul(a, b); }

Jet mult(const Jet& a, const Jet& b) {
    if (a.order() == b.order()) return mul(a, b);
    if (a.order() < b.order()) return mul(a, truncate(b, a.order()));
    return mul(truncate(a, b.order()), b);
}

Jet truncate(const Jet& a, int order) {
    if (order > a.order()) throw StructuralError("truncate: cannot raise jet order");
    if (order == a.order()) return a;
    Jet r(a.n(), order);
    std::copy_n(a.c_.begin(), r.c_.size(), r.c_.begin());
    return r;
}

Jet d(const Jet& a, int var) {
    if (a.order() == 0) throw OrderExhausted("derivative of an order-0 jet");
    if (var < 0 || var >= 2 * a.n()) throw StructuralError("derivative variable out of range");
    Jet r(a.n(), a.order() - 1);
    for (const auto& s : a.layout_->derivative(var)) r.c_[s.dst] += s.factor * a.c_[s.src];
    return r;
}

Jet wirtinger(const Jet& a, Wirtinger which, int index) {
    if (index < 0 || index >= a.n()) throw StructuralError("wirtinger index out of range");
    return d(a, which == Wirtinger::Holomorphic ? index : a.n() + index);
}

Jet conj(const Jet& a) {
    Jet r(a.n(), a.order());
    const int n = a.n();
    const auto& L = *a.layout_;
    std::vector<int> e(2 * n);
    for (int idx = 0; idx < L.size(); ++idx) {
        const auto& x = L.exponents(idx);
        for (int v = 0; v < n; ++v) {
            e[v] = x[n + v];
            e[n + v] = x[v];
        }
        r.c_[L.index(e)] = std::conj(a.c_[idx]);
    }
    return r;
}

Jet inverse(const Jet& a) {
    const cplx a0 = a.value();
    if (std::abs(a0) == 0.0) throw SingularSeries("jet inverse: zero constant term");
    // 1/(a0 (1+x)) = (1/a0) sum (-x)^k, x nilpotent to order K
    Jet x = a * (1.0 / a0);
    x[0] = 0.0;
    Jet sum = Jet::constant(a.n(), a.order(), 1.0);
    Jet term = sum;
    for (int k = 1; k <= a.order(); ++k) {
        term = -(term * x);
        sum += term;
    }
    return sum * (1.0 / a0);
}

Jet exp(const Jet& a) {
    Jet x = a;
    x[0] = 0.0;
    Jet sum = Jet::constant(a.n(), a.order(), 1.0);
    Jet term = sum;
    for (int k = 1; k <= a.order(); ++k) {
        term = (term * x) * (1.0 / k);
        sum += term;
    }
    return sum * std::exp(a.value());
}

Jet log(const Jet& a) {
    const cplx a0 = a.value();
    if (std::abs(a0) == 0.0) throw SingularSeries("jet log: zero constant term");
    Jet x = a * (1.0 / a0);
    x[0] = 0.0;
    Jet sum(a.n(), a.order());
    Jet power = Jet::constant(a.n(), a.order(), 1.0);
    for (int k = 1; k <= a.order(); ++k) {
        power = power * x;
        sum += power * ((k % 2 == 1 ? 1.0 : -1.0) / k);
    }
    return sum + std::log(a0);
}

cplx evaluate(const Jet& a, const std::vector<cplx>& w) {
    const auto& L = a.layout();
    if (static_cast<int>(w.size()) != L.nvars()) throw StructuralError("evaluate: wrong point size");
    cplx total = 0.0;
    for (int idx = 0; idx < L.size(); ++idx) {
        cplx m = a[idx];
        if (m == cplx(0.0)) continue;
        const auto& e = L.exponents(idx);
        for (int v = 0; v < L.nvars(); ++v)
            for (int k = 0; k < e[v]; ++k) m *= w[v];
        total += m;
    }
    return total;
}

JetMat::JetMat(int rows, int cols, int n, int order) : rows_(rows), cols_(cols) {
    e_.assign(static_cast<size_t>(rows) * cols, Jet(n, order));
}

JetMat JetMat::identity(int size, int n, int order) {
    JetMat m(size, size, n, order);
    for (int i = 0; i < size; ++i) m(i, i)[0] = 1.0;
    return m;
}

JetMat operator*(const JetMat& a, const JetMat& b) {
    if (a.cols() != b.rows()) throw StructuralError("jet matrix product: shape mismatch");
    const int order = std::min(a.order(), b.order());
    const int n = a(0, 0).n();
    JetMat r(a.rows(), b.cols(), n, order);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j)
            for (int k = 0; k < a.cols(); ++k) r(i, j) += mult(a(i, k), b(k, j));
    return r;
}

JetMat operator+(const JetMat& a, const JetMat& b) {
    JetMat r = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) += b(i, j);
    return r;
}

JetMat operator-(const JetMat& a, const JetMat& b) {
    JetMat r = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) -= b(i, j);
    return r;
}

JetMat conj_transpose(const JetMat& a) {
    JetMat r(a.cols(), a.rows(), a(0, 0).n(), a.order());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(j, i) = conj(a(i, j));
    return r;
}

JetMat transpose(const JetMat& a) {
    JetMat r(a.cols(), a.rows(), a(0, 0).n(), a.order());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
    return r;
}

JetMat truncate(const JetMat& a, int order) {
    JetMat r(a.rows(), a.cols(), a(0, 0).n(), order);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = truncate(a(i, j), order);
    return r;
}

JetMat d(const JetMat& a, int var) {
    JetMat r(a.rows(), a.cols(), a(0, 0).n(), a.order() - 1);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = d(a(i, j), var);
    return r;
}

namespace {

// Forward elimination on [a | rhs]; returns det when requested.
void eliminate(JetMat& a, JetMat* rhs, Jet* det) {
    const int m = a.rows();
    if (a.cols() != m) throw StructuralError("jet matrix elimination: not square");
    const int n = a(0, 0).n();
    const int order = a.order();
    Jet detv = Jet::constant(n, order, 1.0);
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a(r, col).value()) > std::abs(a(piv, col).value())) piv = r;
        if (std::abs(a(piv, col).value()) == 0.0)
            throw SingularSeries("jet matrix: singular constant term");
        if (piv != col) {
            for (int c = 0; c < m; ++c) std::swap(a(col, c), a(piv, c));
            if (rhs)
                for (int c = 0; c < rhs->cols(); ++c) std::swap((*rhs)(col, c), (*rhs)(piv, c));
            detv = -detv;
        }
        detv = detv * a(col, col);
        Jet inv = inverse(a(col, col));
        for (int c = 0; c < m; ++c) a(col, c) = a(col, c) * inv;
        if (rhs)
            for (int c = 0; c < rhs->cols(); ++c) (*rhs)(col, c) = (*rhs)(col, c) * inv;
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            Jet f = a(r, col);
            if (f.is_zero()) continue;
            for (int c = 0; c < m; ++c) a(r, c) -= f * a(col, c);
            if (rhs)
                for (int c = 0; c < rhs->cols(); ++c) (*rhs)(r, c) -= f * (*rhs)(col, c);
        }
    }
    if (det) *det = detv;
}

}  // namespace

JetMat inverse(const JetMat& a) {
    JetMat work = a;
    JetMat rhs = JetMat::identity(a.rows(), a(0, 0).n(), a.order());
    eliminate(work, &rhs, nullptr);
    return rhs;
}

Jet determinant(const JetMat& a) {
    JetMat work = a;
    Jet det;
    eliminate(work, nullptr, &det);
    return det;
}

double max_abs(const JetMat& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, a(i, j).max_abs());
    return m;
}

}  // namespace hermitia
