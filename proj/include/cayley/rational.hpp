#pragma once

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cayley {

/// Exact rational number. Every verdict in the library is computed with it.
using Rational = mpq_class;

/// Parses "p/q" or an integer literal. Decimal literals are rejected.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

Rational pow(const Rational& base, unsigned long exponent);

/// Non-negative extended rational: a finite value or +infinity.
///
/// Multiplication follows the measure-theoretic convention 0 * inf = 0.
class Extended {
public:
    Extended() = default;
    Extended(const Rational& v) : value_(v) {}
    Extended(long v) : value_(v) {}

    static Extended infinity() {
        Extended e;
        e.infinite_ = true;
        return e;
    }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }
    bool is_zero() const { return !infinite_ && sgn(value_) == 0; }

    /// Throws std::domain_error when infinite.
    const Rational& finite() const;

    Extended& operator+=(const Extended& o);
    Extended& operator*=(const Extended& o);

    friend Extended operator+(Extended a, const Extended& b) { return a += b; }
    friend Extended operator*(Extended a, const Extended& b) { return a *= b; }

    friend bool operator==(const Extended& a, const Extended& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }
    friend std::strong_ordering operator<=>(const Extended& a, const Extended& b);

private:
    Rational value_{0};
    bool infinite_ = false;
};

/// "inf" for infinity, otherwise as Rational.
std::string to_string(const Extended& e);

std::ostream& operator<<(std::ostream& os, const Extended& e);

} // namespace cayley
