#include "charseq/torus.hpp"

#include <mpfr.h>

#include <cmath>
#include <limits>

namespace charseq {

namespace {

// RAII wrapper around a single mpfr_t.  Precision is always explicit;
// the global default precision is never touched, so concurrent use of
// value-distinct objects is safe.
class Mp {
public:
    explicit Mp(mpfr_prec_t prec) { mpfr_init2(x_, prec); }
    ~Mp() { mpfr_clear(x_); }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
    operator mpfr_ptr() { return x_; }
    operator mpfr_srcptr() const { return x_; }

private:
    mpfr_t x_;
};

double dir_get_d(mpfr_srcptr x, mpfr_rnd_t rnd) { return mpfr_get_d(x, rnd); }

// Enclosure of 2 sin(pi t) for exact rational t in [0, 1/2] at the given
// working precision, written into the mpfr outputs.  sin(pi t) is increasing
// on the whole segment, but pi itself is only available as an enclosure, so
// the argument product is kept on a monotone piece of sin/cos:
//   t <= 1/4:  2 sin(pi t)   with pi t in [0, ~pi/4], sin increasing;
//   t >  1/4:  2 cos(pi s), s = 1/2 - t in [0, 1/4), cos decreasing.
void chord_bounds_mp(const mpq_class& t, mpfr_prec_t prec, mpfr_ptr lo, mpfr_ptr hi) {
    Mp pi_lo(prec), pi_hi(prec), arg(prec), r(prec);
    mpfr_const_pi(pi_lo, MPFR_RNDD);
    mpfr_const_pi(pi_hi, MPFR_RNDU);

    mpq_class quarter(1, 4);
    if (t <= quarter) {
        mpfr_set_q(r, t.get_mpq_t(), MPFR_RNDD);
        mpfr_mul(arg, pi_lo, r, MPFR_RNDD);
        mpfr_sin(lo, arg, MPFR_RNDD);
        mpfr_mul_2ui(lo, lo, 1, MPFR_RNDD);

        mpfr_set_q(r, t.get_mpq_t(), MPFR_RNDU);
        mpfr_mul(arg, pi_hi, r, MPFR_RNDU);
        mpfr_sin(hi, arg, MPFR_RNDU);
        mpfr_mul_2ui(hi, hi, 1, MPFR_RNDU);
    } else {
        mpq_class s = mpq_class(1, 2) - t;  // in [0, 1/4)
        mpfr_set_q(r, s.get_mpq_t(), MPFR_RNDU);
        mpfr_mul(arg, pi_hi, r, MPFR_RNDU);
        mpfr_cos(lo, arg, MPFR_RNDD);
        mpfr_mul_2ui(lo, lo, 1, MPFR_RNDD);

        mpfr_set_q(r, s.get_mpq_t(), MPFR_RNDD);
        mpfr_mul(arg, pi_lo, r, MPFR_RNDD);
        mpfr_cos(hi, arg, MPFR_RNDU);
        mpfr_mul_2ui(hi, hi, 1, MPFR_RNDU);
    }
}

// Directed bound of c * pi * t for rational t >= 0 and small integer c.
void pi_multiple_bound_mp(const mpq_class& t, unsigned long c, bool upper, mpfr_ptr v) {
    Mp pi(mpfr_get_prec(v)), r(mpfr_get_prec(v));
    mpfr_rnd_t rnd = upper ? MPFR_RNDU : MPFR_RNDD;
    mpfr_const_pi(pi, rnd);
    mpfr_set_q(r, t.get_mpq_t(), rnd);
    mpfr_mul(v, pi, r, rnd);
    if (c != 1) mpfr_mul_ui(v, v, c, rnd);
}

constexpr mpfr_prec_t kStartPrec = 96;
constexpr mpfr_prec_t kMaxPrec = 1 << 20;

mpfr_prec_t next_prec(mpfr_prec_t p) { return p + p / 2 + 32; }

// TwoSum: s = fl(x + y) and the exact error, used for outward addition
// without smearing exact sums.
double two_sum(double x, double y, double* err) {
    double s = x + y;
    double bb = s - x;
    *err = (x - (s - bb)) + (y - bb);
    return s;
}

double dir_add(double x, double y, bool upper) {
    double err = 0.0;
    double s = two_sum(x, y, &err);
    if (upper) {
        if (err > 0.0) s = std::nextafter(s, std::numeric_limits<double>::infinity());
    } else {
        if (err < 0.0) s = std::nextafter(s, -std::numeric_limits<double>::infinity());
    }
    return s;
}

}  // namespace

mpq_class UnitRational::reduce_mod_one(mpq_class q) {
    q.canonicalize();
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    q -= fl;
    return q;
}

std::string UnitRational::str() const {
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

UnitRational make_unit_rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DomainError("make_unit_rational: zero denominator");
    if (den < 0) throw DomainError("make_unit_rational: denominator must be positive");
    return UnitRational(mpq_class(num, den));
}

UnitRational add_mod_one(const UnitRational& x, const UnitRational& y) {
    return UnitRational(x.value() + y.value());
}

UnitRational neg_mod_one(const UnitRational& x) {
    return UnitRational(-x.value());
}

mpq_class nearest_integer_norm(const UnitRational& x) {
    const mpq_class& v = x.value();
    if (v <= mpq_class(1, 2)) return v;
    return 1 - v;
}

const char* to_string(Ternary t) {
    switch (t) {
        case Ternary::Below: return "Below";
        case Ternary::Above: return "Above";
        case Ternary::Equal: return "Equal";
    }
    return "?";
}

mpq_class default_chord_tolerance() {
    mpz_class d = 1;
    mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), 40);
    return mpq_class(mpz_class(1), d);
}

CertifiedReal chord_length(const UnitRational& x, const mpq_class& tol) {
    if (tol <= 0) throw DomainError("chord_length: tolerance must be positive");
    mpq_class t = nearest_integer_norm(x);
    if (t == 0) return CertifiedReal{0.0, 0.0};

    for (mpfr_prec_t prec = kStartPrec; prec <= kMaxPrec; prec = next_prec(prec)) {
        Mp lo(prec), hi(prec), lower_wall(prec), upper_wall(prec);
        chord_bounds_mp(t, prec, lo, hi);
        // Sandwich containment is certified against outward bounds of pi*t
        // and 2*pi*t at working precision; the double endpoints may then
        // overshoot the true walls by at most one ulp each.  (Near t = 0 the
        // chord hugs 2*pi*t to within (pi*t)^2/6 relative, far below double
        // resolution, so a double-level wall check could never pass.)
        pi_multiple_bound_mp(t, 1, /*upper=*/true, lower_wall);
        pi_multiple_bound_mp(t, 2, /*upper=*/false, upper_wall);
        if (mpfr_cmp(lo, lower_wall) < 0 || mpfr_cmp(hi, upper_wall) > 0) continue;
        double lo_d = dir_get_d(lo, MPFR_RNDD);
        double hi_d = dir_get_d(hi, MPFR_RNDU);
        if (mpq_class(to_rational(hi_d) - to_rational(lo_d)) > tol) continue;
        return CertifiedReal{lo_d, hi_d};
    }
    throw std::logic_error("chord_length: enclosure did not converge");
}

CertifiedReal chord_length(const UnitRational& x) {
    return chord_length(x, default_chord_tolerance());
}

Ternary chord_vs_threshold(const UnitRational& x, const mpq_class& threshold) {
    if (threshold < 0) throw DomainError("chord_vs_threshold: negative threshold");
    mpq_class t = nearest_integer_norm(x);

    // Rational chord values exist only at norms 0, 1/6 and 1/2; decide those
    // by closed form so refinement below never faces a zero-width gap.
    if (t == 0) return threshold == 0 ? Ternary::Equal : Ternary::Below;
    if (t == mpq_class(1, 6)) {
        if (threshold == 1) return Ternary::Equal;
        return threshold < 1 ? Ternary::Above : Ternary::Below;
    }
    if (t == mpq_class(1, 2)) {
        if (threshold == 2) return Ternary::Equal;
        return threshold < 2 ? Ternary::Above : Ternary::Below;
    }

    for (mpfr_prec_t prec = kStartPrec; prec <= kMaxPrec; prec = next_prec(prec)) {
        Mp lo(prec), hi(prec);
        chord_bounds_mp(t, prec, lo, hi);
        if (mpfr_cmp_q(hi, threshold.get_mpq_t()) < 0) return Ternary::Below;
        if (mpfr_cmp_q(lo, threshold.get_mpq_t()) > 0) return Ternary::Above;
    }
    throw std::logic_error("chord_vs_threshold: refinement did not separate");
}

int compare_pi_multiple(const mpq_class& coeff, const mpq_class& rhs) {
    if (coeff == 0) return rhs == 0 ? 0 : (rhs > 0 ? -1 : 1);
    for (mpfr_prec_t prec = kStartPrec; prec <= kMaxPrec; prec = next_prec(prec)) {
        Mp pi(prec), c(prec), v(prec);
        mpfr_const_pi(pi, MPFR_RNDD);
        mpfr_set_q(c, coeff.get_mpq_t(), coeff > 0 ? MPFR_RNDD : MPFR_RNDU);
        mpfr_mul(v, pi, c, MPFR_RNDD);
        if (mpfr_cmp_q(v, rhs.get_mpq_t()) > 0) return 1;
        mpfr_const_pi(pi, MPFR_RNDU);
        mpfr_set_q(c, coeff.get_mpq_t(), coeff > 0 ? MPFR_RNDU : MPFR_RNDD);
        mpfr_mul(v, pi, c, MPFR_RNDU);
        if (mpfr_cmp_q(v, rhs.get_mpq_t()) < 0) return -1;
    }
    throw std::logic_error("compare_pi_multiple: refinement did not separate");
}

mpz_class floor_quotient_by_pi(const mpq_class& k) {
    if (k < 0) throw DomainError("floor_quotient_by_pi: negative argument");
    if (k == 0) return 0;
    for (mpfr_prec_t prec = kStartPrec; prec <= kMaxPrec; prec = next_prec(prec)) {
        Mp pi(prec), c(prec), v(prec), fl(prec);
        mpz_class lo, hi;
        mpfr_const_pi(pi, MPFR_RNDU);
        mpfr_set_q(c, k.get_mpq_t(), MPFR_RNDD);
        mpfr_div(v, c, pi, MPFR_RNDD);
        mpfr_floor(fl, v);
        mpfr_get_z(lo.get_mpz_t(), fl, MPFR_RNDZ);
        mpfr_const_pi(pi, MPFR_RNDD);
        mpfr_set_q(c, k.get_mpq_t(), MPFR_RNDU);
        mpfr_div(v, c, pi, MPFR_RNDU);
        mpfr_floor(fl, v);
        mpfr_get_z(hi.get_mpz_t(), fl, MPFR_RNDZ);
        if (lo == hi) return lo;
    }
    throw std::logic_error("floor_quotient_by_pi: refinement did not separate");
}

CertifiedReal quotient_by_pi(const mpq_class& coeff, const mpq_class& tol) {
    if (tol <= 0) throw DomainError("quotient_by_pi: tolerance must be positive");
    if (coeff == 0) return CertifiedReal{0.0, 0.0};
    for (mpfr_prec_t prec = kStartPrec; prec <= kMaxPrec; prec = next_prec(prec)) {
        Mp pi(prec), c(prec), v(prec);
        bool pos = coeff > 0;
        mpfr_const_pi(pi, pos ? MPFR_RNDU : MPFR_RNDD);
        mpfr_set_q(c, coeff.get_mpq_t(), MPFR_RNDD);
        mpfr_div(v, c, pi, MPFR_RNDD);
        double lo = dir_get_d(v, MPFR_RNDD);
        mpfr_const_pi(pi, pos ? MPFR_RNDD : MPFR_RNDU);
        mpfr_set_q(c, coeff.get_mpq_t(), MPFR_RNDU);
        mpfr_div(v, c, pi, MPFR_RNDU);
        double hi = dir_get_d(v, MPFR_RNDU);
        if (mpq_class(to_rational(hi) - to_rational(lo)) <= tol) return CertifiedReal{lo, hi};
    }
    throw std::logic_error("quotient_by_pi: enclosure did not converge");
}

CertifiedReal quotient_by_pi(const mpq_class& coeff, const mpz_class& shift,
                             const mpq_class& tol) {
    if (tol <= 0) throw DomainError("quotient_by_pi: tolerance must be positive");
    for (mpfr_prec_t prec = kStartPrec; prec <= kMaxPrec; prec = next_prec(prec)) {
        Mp pi(prec), c(prec), v(prec);
        bool pos = coeff > 0;
        mpfr_const_pi(pi, pos ? MPFR_RNDU : MPFR_RNDD);
        mpfr_set_q(c, coeff.get_mpq_t(), MPFR_RNDD);
        mpfr_div(v, c, pi, MPFR_RNDD);
        mpfr_sub_z(v, v, shift.get_mpz_t(), MPFR_RNDD);
        double lo = dir_get_d(v, MPFR_RNDD);
        mpfr_const_pi(pi, pos ? MPFR_RNDD : MPFR_RNDU);
        mpfr_set_q(c, coeff.get_mpq_t(), MPFR_RNDU);
        mpfr_div(v, c, pi, MPFR_RNDU);
        mpfr_sub_z(v, v, shift.get_mpz_t(), MPFR_RNDU);
        double hi = dir_get_d(v, MPFR_RNDU);
        if (mpq_class(to_rational(hi) - to_rational(lo)) <= tol) return CertifiedReal{lo, hi};
    }
    throw std::logic_error("quotient_by_pi: enclosure did not converge");
}

mpq_class to_rational(double d) {
    mpq_class q;
    mpq_set_d(q.get_mpq_t(), d);
    return q;
}

CertifiedReal interval_exact(const mpq_class& v) {
    // mpq_get_d truncates toward zero; widen one ulp on the far side
    // unless the conversion was exact.
    double a = mpq_get_d(v.get_mpq_t());
    if (to_rational(a) == v) return CertifiedReal{a, a};
    if (v >= 0) return CertifiedReal{a, std::nextafter(a, std::numeric_limits<double>::infinity())};
    return CertifiedReal{std::nextafter(a, -std::numeric_limits<double>::infinity()), a};
}

CertifiedReal interval_add(const CertifiedReal& a, const CertifiedReal& b) {
    return CertifiedReal{dir_add(a.lo, b.lo, false), dir_add(a.hi, b.hi, true)};
}

CertifiedReal interval_add_exact(const CertifiedReal& a, const mpq_class& q) {
    return interval_add(a, interval_exact(q));
}

CertifiedReal interval_max(const CertifiedReal& a, const CertifiedReal& b) {
    return CertifiedReal{a.lo > b.lo ? a.lo : b.lo, a.hi > b.hi ? a.hi : b.hi};
}

bool interval_certainly_below(const CertifiedReal& a, const mpq_class& q) {
    return to_rational(a.hi) < q;
}

bool interval_certainly_at_least(const CertifiedReal& a, const mpq_class& q) {
    return to_rational(a.lo) >= q;
}

mpq_class interval_width_exact(const CertifiedReal& a) {
    return to_rational(a.hi) - to_rational(a.lo);
}

}  // namespace charseq
