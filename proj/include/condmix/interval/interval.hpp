#pragma once

// mpfr.h only declares the intmax interface (mpfr_set_uj) when stdint is
// visible first, so pin the order here instead of relying on the includer.
#include <stdint.h>
#define MPFR_USE_INTMAX_T 1
#include <mpfr.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "condmix/errors.hpp"

namespace condmix {

// Runtime-configurable working precision in bits. Set once at startup, before
// any worker threads exist; every value object carries its own precision, so
// nothing here depends on MPFR's thread-default.
inline mpfr_prec_t& default_precision_slot() {
    static mpfr_prec_t p = 196;
    return p;
}
inline mpfr_prec_t default_precision() { return default_precision_slot(); }
inline void set_default_precision(mpfr_prec_t p) {
    if (p < 53 || p > (mpfr_prec_t(1) << 20))
        throw ConfigError("precision bits must lie in [53, 2^20]");
    default_precision_slot() = p;
}

// Arbitrary-precision float with round-to-nearest semantics. Used for point
// orbits, test oracles and midpoints; the enclosure type below owns the
// directed rounding.
class MpReal {
  public:
    explicit MpReal(mpfr_prec_t prec = default_precision()) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    MpReal(double d, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_d(v_, d, MPFR_RNDN);
    }
    MpReal(const MpReal& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    MpReal(MpReal&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    MpReal& operator=(const MpReal& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    MpReal& operator=(MpReal&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~MpReal() { mpfr_clear(v_); }

    static MpReal from_string(std::string_view s, mpfr_prec_t prec = default_precision(),
                              mpfr_rnd_t rnd = MPFR_RNDN) {
        MpReal r(prec);
        std::string z(s);
        if (mpfr_set_str(r.v_, z.c_str(), 10, rnd) != 0)
            throw DomainError("unparseable number: " + z);
        return r;
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
    double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_inf() const { return mpfr_inf_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    friend MpReal operator-(const MpReal& a) {
        MpReal r(a.precision());
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

#define CONDMIX_MPREAL_BINOP(op, fn)                                          \
    friend MpReal operator op(const MpReal& a, const MpReal& b) {             \
        MpReal r(std::max(a.precision(), b.precision()));                     \
        fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                      \
        return r;                                                             \
    }                                                                         \
    friend MpReal operator op(const MpReal& a, double b) {                    \
        return a op MpReal(b, a.precision());                                 \
    }                                                                         \
    friend MpReal operator op(double a, const MpReal& b) {                    \
        return MpReal(a, b.precision()) op b;                                 \
    }
    CONDMIX_MPREAL_BINOP(+, mpfr_add)
    CONDMIX_MPREAL_BINOP(-, mpfr_sub)
    CONDMIX_MPREAL_BINOP(*, mpfr_mul)
    CONDMIX_MPREAL_BINOP(/, mpfr_div)
#undef CONDMIX_MPREAL_BINOP

#define CONDMIX_MPREAL_CMP(op, fn)                                            \
    friend bool operator op(const MpReal& a, const MpReal& b) {               \
        return fn(a.v_, b.v_) != 0;                                           \
    }                                                                         \
    friend bool operator op(const MpReal& a, double b) {                      \
        return a op MpReal(b, a.precision());                                 \
    }                                                                         \
    friend bool operator op(double a, const MpReal& b) {                      \
        return MpReal(a, b.precision()) op b;                                 \
    }
    CONDMIX_MPREAL_CMP(<, mpfr_less_p)
    CONDMIX_MPREAL_CMP(<=, mpfr_lessequal_p)
    CONDMIX_MPREAL_CMP(>, mpfr_greater_p)
    CONDMIX_MPREAL_CMP(>=, mpfr_greaterequal_p)
    CONDMIX_MPREAL_CMP(==, mpfr_equal_p)
#undef CONDMIX_MPREAL_CMP
    friend bool operator!=(const MpReal& a, const MpReal& b) { return !(a == b); }

#define CONDMIX_MPREAL_FN1(name, fn)                                          \
    friend MpReal name(const MpReal& a) {                                     \
        MpReal r(a.precision());                                              \
        fn(r.v_, a.v_, MPFR_RNDN);                                            \
        return r;                                                             \
    }
    CONDMIX_MPREAL_FN1(abs, mpfr_abs)
    CONDMIX_MPREAL_FN1(sqrt, mpfr_sqrt)
    CONDMIX_MPREAL_FN1(sin, mpfr_sin)
    CONDMIX_MPREAL_FN1(cos, mpfr_cos)
    CONDMIX_MPREAL_FN1(exp, mpfr_exp)
    CONDMIX_MPREAL_FN1(log, mpfr_log)
#undef CONDMIX_MPREAL_FN1

    friend MpReal floor(const MpReal& a) {
        MpReal r(a.precision());
        mpfr_floor(r.v_, a.v_);
        return r;
    }

    friend MpReal atan2(const MpReal& y, const MpReal& x) {
        MpReal r(std::max(y.precision(), x.precision()));
        mpfr_atan2(r.v_, y.v_, x.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal hypot(const MpReal& x, const MpReal& y) {
        MpReal r(std::max(y.precision(), x.precision()));
        mpfr_hypot(r.v_, x.v_, y.v_, MPFR_RNDN);
        return r;
    }

    std::string to_string(int digits = 20) const {
        char buf[512];
        mpfr_snprintf(buf, sizeof buf, "%.*R*e", digits, MPFR_RNDN, v_);
        return buf;
    }
    friend std::ostream& operator<<(std::ostream& os, const MpReal& a) {
        return os << a.to_string();
    }

  private:
    mpfr_t v_;
};

// The exact dyadic bits * 2^-64, used to interpret a raw 64-bit uniform draw
// as a point on [0,1). Exact whenever prec >= 64.
inline MpReal dyadic_unit(std::uint64_t bits, mpfr_prec_t prec = default_precision()) {
    assert(prec >= 64);
    MpReal r(prec);
    mpfr_set_uj(r.raw(), bits, MPFR_RNDN);
    mpfr_mul_2si(r.raw(), r.raw(), -64, MPFR_RNDN);
    return r;
}

// Closed interval with outward-rounded endpoints at a fixed precision.
// Contract: every operation returns an enclosure of the exact set-image of its
// operands. The empty set is a sentinel [+inf,-inf]; arithmetic propagates it
// but never produces it from nonempty inputs. NaN endpoints are forbidden and
// abort via StabilityError.
class Interval {
  public:
    explicit Interval(mpfr_prec_t prec = default_precision()) : lo_(prec), hi_(prec) {}
    // Exact-match overloads for doubles: without them a lone double literal
    // would convert to mpfr_prec_t and be taken as a precision.
    explicit Interval(double v) : Interval(v, default_precision()) {}
    Interval(double lo, double hi) : Interval(lo, hi, default_precision()) {}
    Interval(double v, mpfr_prec_t prec) : lo_(prec), hi_(prec) {
        mpfr_set_d(lo_.raw(), v, MPFR_RNDD);
        mpfr_set_d(hi_.raw(), v, MPFR_RNDU);
        check();
    }
    Interval(double lo, double hi, mpfr_prec_t prec) : lo_(prec), hi_(prec) {
        if (!(lo <= hi)) throw DomainError("interval endpoints out of order");
        mpfr_set_d(lo_.raw(), lo, MPFR_RNDD);
        mpfr_set_d(hi_.raw(), hi, MPFR_RNDU);
        check();
    }
    explicit Interval(const MpReal& v, mpfr_prec_t prec = 0)
        : lo_(prec ? prec : v.precision()), hi_(prec ? prec : v.precision()) {
        mpfr_set(lo_.raw(), v.raw(), MPFR_RNDD);
        mpfr_set(hi_.raw(), v.raw(), MPFR_RNDU);
        check();
    }
    Interval(const MpReal& lo, const MpReal& hi, mpfr_prec_t prec = 0)
        : lo_(prec ? prec : std::max(lo.precision(), hi.precision())),
          hi_(prec ? prec : std::max(lo.precision(), hi.precision())) {
        if (!(lo <= hi)) throw DomainError("interval endpoints out of order");
        mpfr_set(lo_.raw(), lo.raw(), MPFR_RNDD);
        mpfr_set(hi_.raw(), hi.raw(), MPFR_RNDU);
        check();
    }

    static Interval empty(mpfr_prec_t prec = default_precision()) {
        Interval r(prec);
        mpfr_set_inf(r.lo_.raw(), 1);
        mpfr_set_inf(r.hi_.raw(), -1);
        return r;
    }
    static Interval entire(mpfr_prec_t prec = default_precision()) {
        Interval r(prec);
        mpfr_set_inf(r.lo_.raw(), -1);
        mpfr_set_inf(r.hi_.raw(), 1);
        return r;
    }

    const MpReal& lo() const { return lo_; }
    const MpReal& hi() const { return hi_; }
    mpfr_prec_t precision() const { return lo_.precision(); }

    bool is_empty() const { return mpfr_cmp(lo_.raw(), hi_.raw()) > 0; }
    bool has_inf() const { return lo_.is_inf() || hi_.is_inf(); }
    bool is_point() const { return !is_empty() && mpfr_equal_p(lo_.raw(), hi_.raw()); }

    bool contains(double v) const {
        return !is_empty() && mpfr_cmp_d(lo_.raw(), v) <= 0 && mpfr_cmp_d(hi_.raw(), v) >= 0;
    }
    bool contains(const MpReal& v) const { return !is_empty() && lo_ <= v && v <= hi_; }
    bool contains(const Interval& o) const {
        if (o.is_empty()) return true;
        return !is_empty() && lo_ <= o.lo_ && o.hi_ <= hi_;
    }
    bool contains_zero() const { return !is_empty() && lo_.sign() <= 0 && hi_.sign() >= 0; }
    bool certainly_positive() const { return !is_empty() && lo_.sign() > 0; }
    bool certainly_negative() const { return !is_empty() && hi_.sign() < 0; }
    bool certainly_nonneg() const { return !is_empty() && lo_.sign() >= 0; }
    bool certainly_nonpos() const { return !is_empty() && hi_.sign() <= 0; }

    // Upper bound on hi - lo, as a double (0 for the empty set).
    double width() const {
        if (is_empty()) return 0.0;
        MpReal w(precision());
        mpfr_sub(w.raw(), hi_.raw(), lo_.raw(), MPFR_RNDU);
        return w.to_double(MPFR_RNDU);
    }
    double mag() const {
        if (is_empty()) return 0.0;
        MpReal m(precision());
        mpfr_abs(m.raw(), lo_.raw(), MPFR_RNDU);
        MpReal m2(precision());
        mpfr_abs(m2.raw(), hi_.raw(), MPFR_RNDU);
        mpfr_max(m.raw(), m.raw(), m2.raw(), MPFR_RNDU);
        return m.to_double(MPFR_RNDU);
    }
    MpReal midpoint() const {
        if (is_empty()) throw EmptyError("midpoint of empty interval");
        if (has_inf()) throw DomainError("midpoint of unbounded interval");
        MpReal m(precision());
        mpfr_add(m.raw(), lo_.raw(), hi_.raw(), MPFR_RNDN);
        mpfr_div_2ui(m.raw(), m.raw(), 1, MPFR_RNDN);
        return m;
    }
    double mid_double() const { return midpoint().to_double(); }

    friend Interval operator-(const Interval& a) {
        if (a.is_empty()) return empty(a.precision());
        Interval r(a.precision());
        mpfr_neg(r.lo_.raw(), a.hi_.raw(), MPFR_RNDD);
        mpfr_neg(r.hi_.raw(), a.lo_.raw(), MPFR_RNDU);
        return r;
    }

    friend Interval operator+(const Interval& a, const Interval& b) {
        mpfr_prec_t p = std::max(a.precision(), b.precision());
        if (a.is_empty() || b.is_empty()) return empty(p);
        Interval r(p);
        mpfr_add(r.lo_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_add(r.hi_.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
        r.check();
        return r;
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        mpfr_prec_t p = std::max(a.precision(), b.precision());
        if (a.is_empty() || b.is_empty()) return empty(p);
        Interval r(p);
        mpfr_sub(r.lo_.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDD);
        mpfr_sub(r.hi_.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDU);
        r.check();
        return r;
    }
    friend Interval operator*(const Interval& a, const Interval& b) {
        mpfr_prec_t p = std::max(a.precision(), b.precision());
        if (a.is_empty() || b.is_empty()) return empty(p);
        if (a.has_inf() || b.has_inf()) return entire(p);  // overflow escape; callers abort on width
        Interval r(p);
        MpReal t(p);
        mpfr_mul(r.lo_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_mul(t.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDD);
        mpfr_min(r.lo_.raw(), r.lo_.raw(), t.raw(), MPFR_RNDD);
        mpfr_mul(t.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_min(r.lo_.raw(), r.lo_.raw(), t.raw(), MPFR_RNDD);
        mpfr_mul(t.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDD);
        mpfr_min(r.lo_.raw(), r.lo_.raw(), t.raw(), MPFR_RNDD);
        mpfr_mul(r.hi_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDU);
        mpfr_mul(t.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDU);
        mpfr_max(r.hi_.raw(), r.hi_.raw(), t.raw(), MPFR_RNDU);
        mpfr_mul(t.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDU);
        mpfr_max(r.hi_.raw(), r.hi_.raw(), t.raw(), MPFR_RNDU);
        mpfr_mul(t.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
        mpfr_max(r.hi_.raw(), r.hi_.raw(), t.raw(), MPFR_RNDU);
        r.check();
        return r;
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        mpfr_prec_t p = std::max(a.precision(), b.precision());
        if (a.is_empty() || b.is_empty()) return empty(p);
        if (b.contains_zero()) throw DomainError("division by interval containing 0");
        if (a.has_inf() || b.has_inf()) return entire(p);
        Interval r(p);
        MpReal t(p);
        mpfr_div(r.lo_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_div(t.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDD);
        mpfr_min(r.lo_.raw(), r.lo_.raw(), t.raw(), MPFR_RNDD);
        mpfr_div(t.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_min(r.lo_.raw(), r.lo_.raw(), t.raw(), MPFR_RNDD);
        mpfr_div(t.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDD);
        mpfr_min(r.lo_.raw(), r.lo_.raw(), t.raw(), MPFR_RNDD);
        mpfr_div(r.hi_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDU);
        mpfr_div(t.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDU);
        mpfr_max(r.hi_.raw(), r.hi_.raw(), t.raw(), MPFR_RNDU);
        mpfr_div(t.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDU);
        mpfr_max(r.hi_.raw(), r.hi_.raw(), t.raw(), MPFR_RNDU);
        mpfr_div(t.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
        mpfr_max(r.hi_.raw(), r.hi_.raw(), t.raw(), MPFR_RNDU);
        r.check();
        return r;
    }

#define CONDMIX_IVAL_DBLOP(op)                                                \
    friend Interval operator op(const Interval& a, double b) {                \
        return a op Interval(b, a.precision());                               \
    }                                                                         \
    friend Interval operator op(double a, const Interval& b) {                \
        return Interval(a, b.precision()) op b;                               \
    }
    CONDMIX_IVAL_DBLOP(+)
    CONDMIX_IVAL_DBLOP(-)
    CONDMIX_IVAL_DBLOP(*)
    CONDMIX_IVAL_DBLOP(/)
#undef CONDMIX_IVAL_DBLOP

    friend Interval abs(const Interval& a) {
        if (a.is_empty()) return empty(a.precision());
        if (a.certainly_nonneg()) return a;
        if (a.certainly_nonpos()) return -a;
        Interval r(a.precision());
        mpfr_set_zero(r.lo_.raw(), 1);
        mpfr_neg(r.hi_.raw(), a.lo_.raw(), MPFR_RNDU);
        mpfr_max(r.hi_.raw(), r.hi_.raw(), a.hi_.raw(), MPFR_RNDU);
        return r;
    }
    friend Interval sqrt(const Interval& a) {
        if (a.is_empty()) return empty(a.precision());
        if (a.lo_.sign() < 0) throw DomainError("sqrt of interval reaching below 0");
        Interval r(a.precision());
        mpfr_sqrt(r.lo_.raw(), a.lo_.raw(), MPFR_RNDD);
        mpfr_sqrt(r.hi_.raw(), a.hi_.raw(), MPFR_RNDU);
        r.check();
        return r;
    }
    friend Interval hypot(const Interval& x, const Interval& y) {
        mpfr_prec_t p = std::max(x.precision(), y.precision());
        if (x.is_empty() || y.is_empty()) return empty(p);
        Interval ax = abs(x), ay = abs(y);
        Interval r(p);
        mpfr_hypot(r.lo_.raw(), ax.lo_.raw(), ay.lo_.raw(), MPFR_RNDD);
        mpfr_hypot(r.hi_.raw(), ax.hi_.raw(), ay.hi_.raw(), MPFR_RNDU);
        r.check();
        return r;
    }

    friend Interval sin(const Interval& a) { return trig(a, /*is_sin=*/true); }
    friend Interval cos(const Interval& a) { return trig(a, /*is_sin=*/false); }

    // Enclosure of atan2 over a box. Boxes meeting the closed negative x-axis
    // (branch cut) or the origin fall back to [-pi, pi]; elsewhere the angular
    // extremes over an axis-aligned box are attained at corners.
    friend Interval atan2(const Interval& y, const Interval& x) {
        mpfr_prec_t p = std::max(x.precision(), y.precision());
        if (x.is_empty() || y.is_empty()) return empty(p);
        if (y.contains_zero() && x.lo_.sign() <= 0) {
            Interval r(p);
            mpfr_const_pi(r.hi_.raw(), MPFR_RNDU);
            mpfr_neg(r.lo_.raw(), r.hi_.raw(), MPFR_RNDD);
            return r;
        }
        Interval r(p);
        MpReal t(p);
        bool first = true;
        const MpReal* ys[2] = {&y.lo_, &y.hi_};
        const MpReal* xs[2] = {&x.lo_, &x.hi_};
        for (auto* cy : ys)
            for (auto* cx : xs) {
                mpfr_atan2(t.raw(), cy->raw(), cx->raw(), MPFR_RNDD);
                if (first)
                    mpfr_set(r.lo_.raw(), t.raw(), MPFR_RNDD);
                else
                    mpfr_min(r.lo_.raw(), r.lo_.raw(), t.raw(), MPFR_RNDD);
                mpfr_atan2(t.raw(), cy->raw(), cx->raw(), MPFR_RNDU);
                if (first)
                    mpfr_set(r.hi_.raw(), t.raw(), MPFR_RNDU);
                else
                    mpfr_max(r.hi_.raw(), r.hi_.raw(), t.raw(), MPFR_RNDU);
                first = false;
            }
        r.check();
        return r;
    }

    friend Interval intersect(const Interval& a, const Interval& b) {
        mpfr_prec_t p = std::max(a.precision(), b.precision());
        if (a.is_empty() || b.is_empty()) return empty(p);
        Interval r(p);
        mpfr_max(r.lo_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_min(r.hi_.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
        if (mpfr_cmp(r.lo_.raw(), r.hi_.raw()) > 0) return empty(p);
        return r;
    }
    friend Interval hull(const Interval& a, const Interval& b) {
        mpfr_prec_t p = std::max(a.precision(), b.precision());
        if (a.is_empty()) return b;
        if (b.is_empty()) return a;
        Interval r(p);
        mpfr_min(r.lo_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_max(r.hi_.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
        return r;
    }

    friend std::ostream& operator<<(std::ostream& os, const Interval& a) {
        return os << to_string(a);
    }
    friend std::string to_string(const Interval& a) {
        if (a.is_empty()) return "[empty]";
        // Directed printing keeps the round-trip guarantee parse(print(x)) >= x
        // at any digit count; clamp so the buffer suffices at huge precisions.
        int digits = std::min(int(double(a.precision()) * 0.30103) + 3, 1000);
        std::string out = "[";
        char buf[4096];
        mpfr_snprintf(buf, sizeof buf, "%.*R*e", digits, MPFR_RNDD, a.lo_.raw());
        out += buf;
        out += ",";
        mpfr_snprintf(buf, sizeof buf, "%.*R*e", digits, MPFR_RNDU, a.hi_.raw());
        out += buf;
        out += "]";
        return out;
    }
    static Interval from_string(std::string_view s, mpfr_prec_t prec = default_precision()) {
        if (s == "[empty]") return empty(prec);
        if (s.size() < 5 || s.front() != '[' || s.back() != ']')
            throw DomainError("unparseable interval: " + std::string(s));
        auto comma = s.find(',');
        if (comma == std::string_view::npos)
            throw DomainError("unparseable interval: " + std::string(s));
        Interval r(prec);
        std::string lo(s.substr(1, comma - 1)), hi(s.substr(comma + 1, s.size() - comma - 2));
        if (mpfr_set_str(r.lo_.raw(), lo.c_str(), 10, MPFR_RNDD) != 0 ||
            mpfr_set_str(r.hi_.raw(), hi.c_str(), 10, MPFR_RNDU) != 0)
            throw DomainError("unparseable interval: " + std::string(s));
        r.check();
        if (r.is_empty()) throw DomainError("interval endpoints out of order: " + std::string(s));
        return r;
    }

  private:
    static Interval trig(const Interval& a, bool is_sin) {
        mpfr_prec_t p = a.precision();
        if (a.is_empty()) return empty(p);
        if (a.has_inf() || a.width() >= 6.3) return Interval(-1.0, 1.0, p);
        Interval r(p);
        MpReal t(p);
        auto eval = [&](mpfr_ptr dst, mpfr_srcptr src, mpfr_rnd_t rnd) {
            if (is_sin)
                mpfr_sin(dst, src, rnd);
            else
                mpfr_cos(dst, src, rnd);
        };
        eval(r.lo_.raw(), a.lo_.raw(), MPFR_RNDD);
        eval(t.raw(), a.hi_.raw(), MPFR_RNDD);
        mpfr_min(r.lo_.raw(), r.lo_.raw(), t.raw(), MPFR_RNDD);
        eval(r.hi_.raw(), a.lo_.raw(), MPFR_RNDU);
        eval(t.raw(), a.hi_.raw(), MPFR_RNDU);
        mpfr_max(r.hi_.raw(), r.hi_.raw(), t.raw(), MPFR_RNDU);
        // Critical points offset + k*pi (offset pi/2 for sin, 0 for cos) carry
        // the extrema +-1; include any whose enclosure meets the argument.
        Interval pi(p);
        mpfr_const_pi(pi.lo_.raw(), MPFR_RNDD);
        mpfr_const_pi(pi.hi_.raw(), MPFR_RNDU);
        double offset = is_sin ? 0.5 : 0.0;
        double alo = a.lo_.to_double(MPFR_RNDD), ahi = a.hi_.to_double(MPFR_RNDU);
        if (std::fabs(alo) > 1e15 || std::fabs(ahi) > 1e15) return Interval(-1.0, 1.0, p);
        long klo = long(std::floor(alo / 3.14159265358979 - offset)) - 1;
        long khi = long(std::ceil(ahi / 3.14159265358979 - offset)) + 1;
        for (long k = klo; k <= khi; ++k) {
            Interval xk = pi * Interval(double(k) + offset, p);
            bool overlaps = !(xk.hi_ < a.lo_ || a.hi_ < xk.lo_);
            if (!overlaps) continue;
            // sin(pi/2 + k*pi) = cos(k*pi) = (-1)^k; the k-th critical value
            // is +1 exactly when k is even, for sin and cos alike.
            bool is_max = (k % 2) == 0;
            if (is_max) {
                if (mpfr_cmp_ui(r.hi_.raw(), 1) < 0) mpfr_set_ui(r.hi_.raw(), 1, MPFR_RNDU);
            } else {
                if (mpfr_cmp_si(r.lo_.raw(), -1) > 0) mpfr_set_si(r.lo_.raw(), -1, MPFR_RNDD);
            }
        }
        r.check();
        return r;
    }

    void check() const {
        if (lo_.is_nan() || hi_.is_nan())
            throw StabilityError("NaN interval endpoint");
    }

    MpReal lo_, hi_;
};

} // namespace condmix
