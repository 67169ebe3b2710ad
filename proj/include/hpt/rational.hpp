#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <string>

#include "hpt/errors.hpp"

namespace hpt {

/// Exact rational scalar. Values are always kept in lowest terms with a
/// positive denominator; every operation is exact. The base field is fixed
/// to the rationals: characteristic 0 is required by the symmetrizers, which
/// divide by n!.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}  // NOLINT: implicit on purpose, scalars read like ints
    Rational(long num, long den) {
        if (den == 0) throw DegreeError("rational with zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }

    /// Parse "p" or "p/q". Throws SemanticError on malformed input.
    static Rational parse(const std::string& s) {
        if (s.empty()) throw SemanticError("empty rational literal");
        std::string::size_type slash = s.find('/');
        try {
            if (slash == std::string::npos) {
                Rational r;
                r.v_ = mpq_class(mpz_class(s), 1);
                return r;
            }
            mpz_class num(s.substr(0, slash));
            mpz_class den(s.substr(slash + 1));
            if (den == 0) throw SemanticError("rational with zero denominator: " + s);
            Rational r;
            r.v_ = mpq_class(num, den);
            r.v_.canonicalize();
            return r;
        } catch (const std::invalid_argument&) {
            throw SemanticError("malformed rational literal: " + s);
        }
    }

    bool is_zero() const { return v_ == 0; }
    bool is_one() const { return v_ == 1; }
    int sign() const { return sgn(v_); }

    Rational operator-() const {
        Rational r;
        r.v_ = -v_;
        return r;
    }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw DegreeError("division by zero rational");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    Rational inverse() const {
        if (is_zero()) throw DegreeError("inverse of zero rational");
        Rational r;
        r.v_ = 1 / v_;
        return r;
    }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }

    /// Canonical form: "p" when the denominator is 1, else "p/q".
    std::string str() const {
        if (v_.get_den() == 1) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.str();
    }

    /// 1/n!, exact.
    static Rational inverse_factorial(int n) {
        mpz_class f;
        mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
        Rational r;
        r.v_ = mpq_class(1, f);
        r.v_.canonicalize();
        return r;
    }

private:
    mpq_class v_;
};

}  // namespace hpt
