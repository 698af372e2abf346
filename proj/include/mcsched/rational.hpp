#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace mcsched {

/// Exact rational number used for every model quantity (periods, WCETs,
/// rates, window lengths, simulation instants).
///
/// Decimal strings are parsed without rounding: "0.571428" is exactly
/// 571428/1000000. Formatting produces a terminating decimal whenever the
/// reduced denominator has no prime factors other than 2 and 5, and "p/q"
/// otherwise, so parse(to_string(r)) == r for every value.
class Rat {
public:
    Rat() = default;
    Rat(long v) : v_(v) {}  // NOLINT(google-explicit-constructor)
    Rat(int v) : v_(v) {}   // NOLINT(google-explicit-constructor)
    Rat(long num, long den);
    explicit Rat(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    /// Accepts "12", "-3.25", "0.571428", "4/7". Throws std::invalid_argument.
    static Rat parse(std::string_view text);

    /// Smallest k-digit decimal >= x (x is treated as the exact binary value).
    static Rat ceil_decimal(double x, int digits);
    static Rat floor_decimal(double x, int digits);
    static Rat round_decimal(double x, int digits);

    /// Same as above but for an exact input.
    Rat ceil_to(int digits) const;
    Rat floor_to(int digits) const;

    std::string to_string() const;
    double to_double() const { return v_.get_d(); }

    const mpq_class& raw() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_positive() const { return sgn(v_) > 0; }
    bool is_negative() const { return sgn(v_) < 0; }

    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o);

    friend Rat operator+(Rat a, const Rat& b) { a += b; return a; }
    friend Rat operator-(Rat a, const Rat& b) { a -= b; return a; }
    friend Rat operator*(Rat a, const Rat& b) { a *= b; return a; }
    friend Rat operator/(Rat a, const Rat& b) { a /= b; return a; }
    friend Rat operator-(const Rat& a) { return Rat(mpq_class(-a.v_)); }

    friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        const int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    mpq_class v_{0};
};

inline Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

std::ostream& operator<<(std::ostream& os, const Rat& r);

}  // namespace mcsched
