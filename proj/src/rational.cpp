#include "cayley/rational.hpp"

#include <cctype>
#include <ostream>

namespace cayley {

namespace {

bool is_integer_literal(std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den.front() == '-' || den.front() == '+')
        throw std::invalid_argument("not an exact rational literal: '" + std::string(text) + "'");
    std::string n(num);
    if (n.front() == '+') n.erase(0, 1);
    mpz_class p(n, 10);
    mpz_class q(std::string(den), 10);
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational pow(const Rational& base, unsigned long exponent) {
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), base.get_num().get_mpz_t(), exponent);
    mpz_pow_ui(d.get_mpz_t(), base.get_den().get_mpz_t(), exponent);
    Rational r(n, d);
    r.canonicalize();
    return r;
}

const Rational& Extended::finite() const {
    if (infinite_) throw std::domain_error("extended value is infinite");
    return value_;
}

Extended& Extended::operator+=(const Extended& o) {
    if (o.infinite_) infinite_ = true;
    if (infinite_) {
        value_ = 0;
        return *this;
    }
    value_ += o.value_;
    return *this;
}

Extended& Extended::operator*=(const Extended& o) {
    if (is_zero() || o.is_zero()) {
        infinite_ = false;
        value_ = 0;
        return *this;
    }
    if (infinite_ || o.infinite_) {
        infinite_ = true;
        value_ = 0;
        return *this;
    }
    value_ *= o.value_;
    return *this;
}

std::strong_ordering operator<=>(const Extended& a, const Extended& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::string to_string(const Extended& e) {
    return e.is_infinite() ? std::string("inf") : to_string(e.finite());
}

std::ostream& operator<<(std::ostream& os, const Extended& e) { return os << to_string(e); }

} // namespace cayley
