#pragma once

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hermitia/errors.hpp"

namespace hermitia {

using cplx = std::complex<double>;

inline constexpr int kDefaultOrder = 3;

// Monomials in 2n variables (z^1..z^n, zbar^1..zbar^n), graded by total degree.
// Monomials of degree d always occupy the same index range whatever the truncation
// order, so truncation is a prefix copy and derivative targets keep their index.
class JetLayout {
public:
    struct Product {
        std::uint32_t a, b, out;
    };
    struct Shift {
        std::uint32_t src, dst;
        double factor;
    };

    static const JetLayout& get(int n, int order);

    int n() const { return n_; }
    int nvars() const { return 2 * n_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(exps_.size()); }
    int size_up_to(int degree) const { return degree_end_[degree]; }
    int degree(int idx) const { return degree_[idx]; }
    const std::vector<std::uint8_t>& exponents(int idx) const { return exps_[idx]; }
    // -1 if the monomial is not stored.
    int index(const std::vector<int>& exps) const;

    const std::vector<Product>& products() const { return products_; }
    const std::vector<Shift>& derivative(int var) const { return deriv_[var]; }

private:
    JetLayout(int n, int order);

    int n_;
    int order_;
    std::vector<std::vector<std::uint8_t>> exps_;
    std::vector<int> degree_;
    std::vector<int> degree_end_;
    std::unordered_map<std::uint64_t, int> lookup_;
    std::vector<Product> products_;
    std::vector<std::vector<Shift>> deriv_;

    std::uint64_t key(const std::vector<int>& exps) const;
};

enum class Wirtinger { Holomorphic, Antiholomorphic };

class Jet {
public:
    Jet() = default;
    Jet(int n, int order);

    static Jet constant(int n, int order, cplx value);
    // var in [0, 2n): z^var for var < n, zbar^(var-n) otherwise. Returns value + w.
    static Jet variable(int n, int order, int var, cplx value = 0.0);

    bool valid() const { return layout_ != nullptr; }
    int n() const { return layout_->n(); }
    int order() const { return layout_->order(); }
    int size() const { return static_cast<int>(c_.size()); }
    const JetLayout& layout() const { return *layout_; }

    cplx value() const { return c_[0]; }
    // Coefficient of the single variable var (the first derivative at the base point).
    cplx linear(int var) const { return c_[1 + var]; }
    cplx operator[](int idx) const { return c_[idx]; }
    cplx& operator[](int idx) { return c_[idx]; }
    const std::vector<cplx>& coeffs() const { return c_; }

    // Coefficient of z^alpha zbar^beta; zero when the degree exceeds the order.
    cplx coeff(const std::vector<int>& alpha, const std::vector<int>& beta) const;
    void set_coeff(const std::vector<int>& alpha, const std::vector<int>& beta, cplx v);

    // Coefficient times the factorials, i.e. the partial derivative at the base point.
    cplx partial(const std::vector<int>& vars) const;

    double max_abs() const;
    bool is_zero() const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(cplx s);
    Jet& operator+=(cplx s) {
        c_[0] += s;
        return *this;
    }
    Jet operator-() const;

private:
    const JetLayout* layout_ = nullptr;
    std::vector<cplx> c_;

    friend Jet truncate(const Jet&, int);
    friend Jet mul(const Jet&, const Jet&);
    friend Jet d(const Jet&, int);
    friend Jet conj(const Jet&);
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(Jet a, cplx s);
Jet operator*(cplx s, Jet a);
Jet operator+(Jet a, cplx s);
Jet operator-(Jet a, cplx s);

// Strict product: throws StructuralError unless (n, order) match.
Jet mul(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
// Product after truncating both factors to the smaller order.
Jet mult(const Jet& a, const Jet& b);

Jet truncate(const Jet& a, int order);

// Derivative along variable var in [0, 2n); order drops by one.
Jet d(const Jet& a, int var);
Jet wirtinger(const Jet& a, Wirtinger which, int index);
Jet conj(const Jet& a);

Jet inverse(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);

// Evaluate the truncated polynomial at displacement w (first n entries z, last n zbar).
cplx evaluate(const Jet& a, const std::vector<cplx>& w);

// Dense matrix of jets sharing one (n, order).
class JetMat {
public:
    JetMat() = default;
    JetMat(int rows, int cols, int n, int order);

    static JetMat identity(int size, int n, int order);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Jet& operator()(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
    const Jet& operator()(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }
    int order() const { return e_.empty() ? 0 : e_[0].order(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Jet> e_;
};

JetMat operator*(const JetMat& a, const JetMat& b);
JetMat operator+(const JetMat& a, const JetMat& b);
JetMat operator-(const JetMat& a, const JetMat& b);
JetMat conj_transpose(const JetMat& a);
JetMat transpose(const JetMat& a);
JetMat truncate(const JetMat& a, int order);
JetMat d(const JetMat& a, int var);

// Gaussian elimination with pivoting on the constant term.
JetMat inverse(const JetMat& a);
Jet determinant(const JetMat& a);

double max_abs(const JetMat& a);

}  // namespace hermitia
