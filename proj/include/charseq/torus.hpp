#pragma once

#include <gmpxx.h>

#include <string>

#include "charseq/error.hpp"

namespace charseq {

// A point of the rational circle Q/Z held as the reduced fraction num/den
// with 0 <= num < den.  All group arithmetic on these values is exact;
// no floating point is involved anywhere on this path.
class UnitRational {
public:
    UnitRational() : v_(0) {}
    explicit UnitRational(const mpq_class& q) : v_(reduce_mod_one(q)) {}

    const mpq_class& value() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }
    bool is_zero() const { return v_ == 0; }
    std::string str() const;

    friend bool operator==(const UnitRational& a, const UnitRational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const UnitRational& a, const UnitRational& b) { return a.v_ != b.v_; }

private:
    static mpq_class reduce_mod_one(mpq_class q);
    mpq_class v_;
};

UnitRational make_unit_rational(const mpz_class& num, const mpz_class& den);
UnitRational add_mod_one(const UnitRational& x, const UnitRational& y);
UnitRational neg_mod_one(const UnitRational& x);

// Distance to the nearest integer: min(x, 1-x), exact, in [0, 1/2].
mpq_class nearest_integer_norm(const UnitRational& x);

// A closed interval [lo, hi] of doubles enclosing a real value, endpoints
// rounded outward.  lo == hi is allowed and means the value is exact.
struct CertifiedReal {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

enum class Ternary { Below, Above, Equal };

const char* to_string(Ternary t);

// Default tolerance for chord enclosures: 2^-40.
mpq_class default_chord_tolerance();

// Encloses |1 - e^{2 pi i x}| = 2 sin(pi * ||x||) in an interval of width
// at most tol.  The enclosed value always lies inside the linear sandwich
// [pi*||x||, 2*pi*||x||] (degenerate [0,0] when x == 0); the double
// endpoints may overshoot those walls by one ulp each.
CertifiedReal chord_length(const UnitRational& x, const mpq_class& tol);
CertifiedReal chord_length(const UnitRational& x);

// Exact decision of 2 sin(pi * ||x||) against a rational threshold.
// The only rational chord values are 0, 1 and 2 (at ||x|| = 0, 1/6, 1/2),
// so Equal is decided by closed form and everything else terminates by
// interval refinement.
Ternary chord_vs_threshold(const UnitRational& x, const mpq_class& threshold);

// Sign of coeff*pi - rhs, decided exactly by refining an enclosure of pi.
// Returns 0 only for coeff == rhs == 0.
int compare_pi_multiple(const mpq_class& coeff, const mpq_class& rhs);

// floor(k / pi) for rational k >= 0, decided exactly.
mpz_class floor_quotient_by_pi(const mpq_class& k);

// Enclosure of coeff / pi, width at most tol.
CertifiedReal quotient_by_pi(const mpq_class& coeff, const mpq_class& tol);

// Enclosure of coeff / pi - shift, width at most tol.  The shift is applied
// before rounding, so fractional parts of large quotients stay certifiable.
CertifiedReal quotient_by_pi(const mpq_class& coeff, const mpz_class& shift,
                             const mpq_class& tol);

// Outward interval helpers.  These keep exact endpoints exact: adding
// [0,0] to [0,0] yields [0,0], not a 1-ulp smear.
CertifiedReal interval_exact(const mpq_class& v);
CertifiedReal interval_add(const CertifiedReal& a, const CertifiedReal& b);
CertifiedReal interval_add_exact(const CertifiedReal& a, const mpq_class& q);
CertifiedReal interval_max(const CertifiedReal& a, const CertifiedReal& b);
bool interval_certainly_below(const CertifiedReal& a, const mpq_class& q);  // a.hi <  q
bool interval_certainly_at_least(const CertifiedReal& a, const mpq_class& q);  // a.lo >= q
mpq_class interval_width_exact(const CertifiedReal& a);
mpq_class to_rational(double d);

}  // namespace charseq
