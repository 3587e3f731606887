#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace seedplan {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. Canonical reduced form, denominator always positive.
/// Conversion from double is exact (doubles are dyadic rationals).
class ExactRatio {
public:
    ExactRatio() : q_(0) {}
    ExactRatio(long long n) : q_(n) {}
    ExactRatio(long long n, long long d) : ExactRatio(BigInt(n), BigInt(d)) {}
    ExactRatio(BigInt n, BigInt d) {
        if (d == 0) throw std::invalid_argument("ExactRatio: zero denominator");
        // division normalizes sign and gcd; the raw two-argument constructor
        // would insist on already-canonical input
        q_ = Rational(std::move(n)) / Rational(std::move(d));
    }

    static ExactRatio from_double(double x) {
        if (!std::isfinite(x)) throw std::invalid_argument("ExactRatio: non-finite value");
        ExactRatio out;
        if (x == 0.0) return out;
        int exp = 0;
        double m = std::frexp(x, &exp);  // x = m * 2^exp, 0.5 <= |m| < 1
        // 53 doublings make the mantissa integral
        BigInt num(static_cast<long long>(std::ldexp(m, 53)));
        exp -= 53;
        if (exp >= 0) {
            out.q_ = Rational(num << exp);
        } else {
            out.q_ = Rational(num, BigInt(1) << -exp);
        }
        return out;
    }

    BigInt numerator() const { return boost::multiprecision::numerator(q_); }
    BigInt denominator() const { return boost::multiprecision::denominator(q_); }

    double to_double() const { return q_.convert_to<double>(); }
    std::string str() const {
        if (denominator() == 1) return numerator().str();
        return numerator().str() + "/" + denominator().str();
    }

    ExactRatio& operator+=(const ExactRatio& o) { q_ += o.q_; return *this; }
    ExactRatio& operator-=(const ExactRatio& o) { q_ -= o.q_; return *this; }
    ExactRatio& operator*=(const ExactRatio& o) { q_ *= o.q_; return *this; }
    ExactRatio& operator/=(const ExactRatio& o) {
        if (o.q_ == 0) throw std::invalid_argument("ExactRatio: division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend ExactRatio operator+(ExactRatio a, const ExactRatio& b) { a += b; return a; }
    friend ExactRatio operator-(ExactRatio a, const ExactRatio& b) { a -= b; return a; }
    friend ExactRatio operator*(ExactRatio a, const ExactRatio& b) { a *= b; return a; }
    friend ExactRatio operator/(ExactRatio a, const ExactRatio& b) { a /= b; return a; }
    friend ExactRatio operator-(const ExactRatio& a) { ExactRatio r; r.q_ = -a.q_; return r; }

    friend bool operator==(const ExactRatio& a, const ExactRatio& b) { return a.q_ == b.q_; }
    friend bool operator!=(const ExactRatio& a, const ExactRatio& b) { return a.q_ != b.q_; }
    friend bool operator<(const ExactRatio& a, const ExactRatio& b) { return a.q_ < b.q_; }
    friend bool operator<=(const ExactRatio& a, const ExactRatio& b) { return a.q_ <= b.q_; }
    friend bool operator>(const ExactRatio& a, const ExactRatio& b) { return a.q_ > b.q_; }
    friend bool operator>=(const ExactRatio& a, const ExactRatio& b) { return a.q_ >= b.q_; }

private:
    using Rational = boost::multiprecision::cpp_rational;
    Rational q_;
};

}  // namespace seedplan
