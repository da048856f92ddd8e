#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "charseq/certificate.hpp"
#include "charseq/prufer.hpp"
#include "charseq/torus.hpp"

namespace charseq::dsum {

using prufer::Membership;

// Coordinate orders b_1 <= b_2 <= ..., each at least 2.  Explicit sequences
// stop at their prefix; Linear and Geometric extend it without bound.
enum class OrderRule { Explicit, Linear, Geometric };

class OrderSequence {
public:
    static OrderSequence explicit_seq(std::vector<mpz_class> orders);
    static OrderSequence linear(std::vector<mpz_class> prefix, long slope);
    static OrderSequence geometric(std::vector<mpz_class> prefix, long ratio);

    OrderRule rule() const { return rule_; }
    bool unbounded() const { return rule_ != OrderRule::Explicit; }
    long horizon() const { return static_cast<long>(prefix_.size()); }
    const std::vector<mpz_class>& prefix() const { return prefix_; }
    long slope() const { return slope_; }
    long ratio() const { return ratio_; }

    // 1-indexed coordinate order; HorizonError past an explicit horizon.
    mpz_class b(long n) const;

private:
    OrderSequence() = default;
    std::vector<mpz_class> prefix_;
    OrderRule rule_ = OrderRule::Explicit;
    long slope_ = 0;
    long ratio_ = 0;
};

// One coordinate formula of a stream tail, evaluated against the order b_n.
enum class ValueKind { Const, FloorRatio, OrderMinus };

struct ValueFormula {
    ValueKind kind = ValueKind::Const;
    mpz_class c;  // Const value, or the OrderMinus offset (>= 1)
    mpz_class u;  // FloorRatio numerator, reduced, 0 < u < v
    mpz_class v;  // FloorRatio denominator

    static ValueFormula constant(const mpz_class& value);
    static ValueFormula floor_ratio(const mpz_class& num, const mpz_class& den);
    static ValueFormula order_minus(const mpz_class& offset);

    mpz_class value_at(const mpz_class& b) const;

    friend bool operator==(const ValueFormula& a, const ValueFormula& b) {
        return a.kind == b.kind && a.c == b.c && a.u == b.u && a.v == b.v;
    }
};

// A point of the product group: explicit values on a finite prefix, then a
// tail rule.  Zero and Constant tails are the common cases; Table cycles
// through a list of formulas.  Value bounds against the orders are enforced
// where values are read, since the same stream may be paired with different
// order sequences.
enum class DSTail { Zero, Constant, Table };

class DSStream {
public:
    static DSStream zero_tail(std::vector<mpz_class> prefix);
    static DSStream constant_tail(std::vector<mpz_class> prefix, const mpz_class& c);
    static DSStream table(std::vector<mpz_class> prefix, std::vector<ValueFormula> formulas);

    DSTail tail() const { return tail_; }
    const std::vector<mpz_class>& prefix() const { return prefix_; }
    long prefix_len() const { return static_cast<long>(prefix_.size()); }
    long period() const;
    // The formula governing coordinate n (> prefix length).
    const ValueFormula& formula_at(long n) const;
    // Coordinate value, 1-indexed, validated against the order.
    mpz_class value(long n, const OrderSequence& orders) const;

private:
    DSStream() = default;
    std::vector<mpz_class> prefix_;
    DSTail tail_ = DSTail::Zero;
    std::vector<ValueFormula> table_;
};

// An element of the direct sum: finitely many nonzero coordinates.
struct DSElement {
    std::map<long, mpz_class> support;  // index -> value, zeros never stored
};

DSElement make_ds_element(const std::map<long, mpz_class>& support,
                          const OrderSequence& orders);
DSElement basis_element(long n, const OrderSequence& orders);
DSElement add_ds(const DSElement& x, const DSElement& y, const OrderSequence& orders);
DSStream to_stream(const DSElement& x);

// Pairing of a finite-support element against a stream of the product:
// sum of x_n * w_n / b_n mod 1, exact.
UnitRational pair_ds(const DSElement& x, const DSStream& w, const OrderSequence& orders);

struct DSMembershipVerdict {
    Membership verdict = Membership::Inconclusive;
    // (coordinate, exact distance of a_n/b_n to the nearest integer).
    std::vector<std::pair<long, mpq_class>> evidence;
    // NonMember only: the limit the distances approach along the offending
    // coordinates; the chord is eventually at least pi times this value.
    std::optional<mpq_class> witness_bound;
};

// Decides whether the coordinate ratios a_n/b_n approach an integer.  For
// unbounded orders the tail rules make the limit computable; explicit orders
// yield Inconclusive unless the stream has finite support.
DSMembershipVerdict membership_ds(const DSStream& w, const OrderSequence& orders, long K);

// Metric certificate between two points of the product group: distance part
// 2^{-n} at the first differing coordinate plus the supremum of coordinate
// chords.  Converged certificates require every coordinate difference to
// vanish in the limit; otherwise the supremum keeps a survey lower bound and
// upper bound 2 with converged == false.
MetricCertificate rho_ds(const DSStream& x, const DSStream& y,
                         const OrderSequence& orders, const mpq_class& tol);
mpq_class canonical_distance_ds(const DSStream& x, const DSStream& y,
                                const OrderSequence& orders);

// First m coordinates of the stream as a finite-support element.
DSElement truncate(const DSStream& w, long m, const OrderSequence& orders);

struct DenseApproximation {
    long m = 0;
    MetricCertificate cert;
};

// Picks m so that the truncation is certifiably within eps of the stream.
DenseApproximation approximate_dense(const DSStream& w, const OrderSequence& orders,
                                     const mpq_class& eps);

// Arithmetic subsequence filter n = start, start + stride, ...; only
// coordinates with positive values participate.
struct IndexRule {
    long start = 1;
    long stride = 1;
};

enum class LambdaKind { FiniteSupport, Zero, One, Interior, Inconclusive };

const char* to_string(LambdaKind k);

struct LambdaClass {
    LambdaKind kind = LambdaKind::Inconclusive;
    mpq_class limit;  // limit of c_n/b_n along the subsequence (when it exists)
    mpq_class alpha;  // Interior only: certified bound 0 < alpha < ||limit||
};

// Symbolic limit of c_n/b_n along the positive coordinates selected by the
// index rule.  Mixed formula limits are reported Inconclusive rather than
// guessed; a narrower index rule can then pick one convergent class.
LambdaClass classify_lambda(const DSStream& chi, const OrderSequence& orders,
                            const std::optional<IndexRule>& subseq = std::nullopt);

enum class DSCase { Interior, LambdaZero, LambdaOne };

const char* to_string(DSCase c);

struct DSCoordinate {
    long n = 0;
    mpz_class a;          // witness value at coordinate n
    CertifiedReal eps_l;  // fractional part discarded by the floor, in [0, 1)
};

struct DSWitness {
    DSElement omega;
    long M = 0;
    DSCase case_tag = DSCase::Interior;
    mpq_class alpha;               // Interior: bound below the coordinate norm
    std::vector<DSCoordinate> coords;
    mpq_class sum;                 // exact sandwich-checked pairing magnitude
    UnitRational chord_arg;        // exact argument of the pairing
    Ternary chord_decision = Ternary::Below;
    mpq_class chord_threshold;     // eps (Interior) or 1/25 (LambdaZero/One)
    MetricCertificate neighborhood;  // rho(0, omega) certificate, < 1/M
};

enum class DSOutcome { Found, Continuous };

const char* to_string(DSOutcome o);

struct DSRefutation {
    DSOutcome outcome = DSOutcome::Continuous;
    std::optional<DSWitness> witness;
};

// Builds a witness element deep in the 1/M-ball on which the candidate
// character chi moves the circle by more than the case threshold.  Interior
// limits use a single basis coordinate; limits 0 and 1 accumulate M floor
// values whose exact pairing sum is sandwich-checked against certified pi
// multiples.  Finite-support candidates are genuine elements of the sum and
// are reported Continuous.  Requires M > 10; eps < pi*alpha for Interior,
// eps < 1/100 otherwise.
DSRefutation refute_ds_character(const DSStream& chi, const OrderSequence& orders,
                                 long M, const mpq_class& eps,
                                 const std::optional<IndexRule>& subseq = std::nullopt);

}  // namespace charseq::dsum
