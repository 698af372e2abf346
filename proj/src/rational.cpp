#include "mcsched/rational.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mcsched {

namespace {

mpz_class pow10(int digits) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    return p;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

mpq_class exact_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value cannot be made exact");
    return mpq_class(x);  // mpq_set_d is exact
}

}  // namespace

Rat::Rat(long num, long den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rat& Rat::operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    v_ /= o.v_;
    return *this;
}

Rat Rat::parse(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) throw std::invalid_argument("empty number");

    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view p = s.substr(0, slash);
        std::string_view q = s.substr(slash + 1);
        bool neg = false;
        if (!p.empty() && p.front() == '-') {
            neg = true;
            p.remove_prefix(1);
        }
        if (!all_digits(p) || !all_digits(q))
            throw std::invalid_argument("malformed fraction: " + std::string(text));
        mpz_class num(std::string(p), 10), den(std::string(q), 10);
        if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
        if (neg) num = -num;
        return Rat(mpq_class(num, den));
    }

    bool neg = false;
    if (s.front() == '-' || s.front() == '+') {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string_view ip = s, fp;
    if (const auto dot = s.find('.'); dot != std::string_view::npos) {
        ip = s.substr(0, dot);
        fp = s.substr(dot + 1);
        if (fp.empty() || !all_digits(fp))
            throw std::invalid_argument("malformed decimal: " + std::string(text));
    }
    if (!all_digits(ip) || (ip.empty() && fp.empty())) throw std::invalid_argument("malformed decimal: " + std::string(text));

    mpz_class num(std::string(ip) + std::string(fp), 10);
    mpz_class den = pow10(static_cast<int>(fp.size()));
    if (neg) num = -num;
    return Rat(mpq_class(num, den));
}

Rat Rat::ceil_to(int digits) const {
    const mpz_class scale = pow10(digits);
    mpz_class scaled_num = v_.get_num() * scale;
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), scaled_num.get_mpz_t(), v_.get_den_mpz_t());
    return Rat(mpq_class(q, scale));
}

Rat Rat::floor_to(int digits) const {
    const mpz_class scale = pow10(digits);
    mpz_class scaled_num = v_.get_num() * scale;
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), scaled_num.get_mpz_t(), v_.get_den_mpz_t());
    return Rat(mpq_class(q, scale));
}

Rat Rat::ceil_decimal(double x, int digits) { return Rat(exact_double(x)).ceil_to(digits); }
Rat Rat::floor_decimal(double x, int digits) { return Rat(exact_double(x)).floor_to(digits); }

Rat Rat::round_decimal(double x, int digits) {
    // half-up on the exact binary value
    const Rat half = Rat(mpq_class(1, 2)) / Rat(mpq_class(pow10(digits), 1));
    return (Rat(exact_double(x)) + half).floor_to(digits);
}

std::string Rat::to_string() const {
    mpz_class den = v_.get_den();
    int twos = 0, fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1) return v_.get_num().get_str() + "/" + v_.get_den().get_str();

    const int digits = std::max(twos, fives);
    if (digits == 0) return v_.get_num().get_str();

    mpz_class scaled = v_.get_num() * pow10(digits) / v_.get_den();  // exact
    const bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string s = scaled.get_str();
    if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<size_t>(digits), ".");
    return neg ? "-" + s : s;
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.to_string(); }

}  // namespace mcsched
