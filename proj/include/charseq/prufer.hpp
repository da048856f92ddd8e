#pragma once

#include <gmpxx.h>

#include <optional>
#include <utility>
#include <vector>

#include "charseq/error.hpp"
#include "charseq/torus.hpp"

namespace charseq::prufer {

bool is_prime(long p);

enum class TailKind { Zero, MaxDigit, Periodic };

const char* to_string(TailKind t);

// An eventually periodic base-p digit stream a_0, a_1, … with 0 <= a_i < p.
// Canonical form: minimal period, constant patterns folded into Zero/MaxDigit,
// and trailing prefix digits absorbed into the tail, so structural equality
// coincides with digitwise equality.
class PadicDigits {
public:
    PadicDigits(long p, std::vector<int> prefix, TailKind tail, std::vector<int> pattern = {});

    long p() const { return p_; }
    const std::vector<int>& prefix() const { return prefix_; }
    TailKind tail() const { return tail_; }
    const std::vector<int>& pattern() const { return pattern_; }

    // Index of the first tail-governed digit.
    long tail_start() const { return static_cast<long>(prefix_.size()); }
    long period() const;

    int digit(long i) const;
    int digit(const mpz_class& i) const;
    bool is_zero() const { return prefix_.empty() && tail_ == TailKind::Zero; }

    friend bool operator==(const PadicDigits& a, const PadicDigits& b) {
        return a.p_ == b.p_ && a.prefix_ == b.prefix_ && a.tail_ == b.tail_ &&
               a.pattern_ == b.pattern_;
    }
    friend bool operator!=(const PadicDigits& a, const PadicDigits& b) { return !(a == b); }

private:
    long p_;
    std::vector<int> prefix_;
    TailKind tail_;
    std::vector<int> pattern_;
};

PadicDigits generator_omega0(long p);
PadicDigits power_of_generator(const mpz_class& q, long p);
// Digitwise difference a − b in the p-adic integers (borrow carried upward).
PadicDigits sub_digits(const PadicDigits& a, const PadicDigits& b);
// 2^{−n} with n the first index where the streams disagree; 0 if equal.
mpq_class canonical_distance(const PadicDigits& a, const PadicDigits& b);

enum class GapRule { Explicit, ArithmeticGap };

// Strictly increasing indices n_1 < n_2 < … defining u_k = 1/p^{n_k+1}.
// ArithmeticGap extends the prefix with gaps start, start+step, … measured
// from position 2, which makes the gap sequence strictly increasing and
// unbounded; Explicit sequences end at their horizon.
class TSequence {
public:
    static TSequence explicit_seq(long p, std::vector<mpz_class> indices);
    static TSequence arithmetic(long p, std::vector<mpz_class> prefix, const mpz_class& start,
                                const mpz_class& step);

    long p() const { return p_; }
    bool divergent() const { return rule_ == GapRule::ArithmeticGap; }
    GapRule rule() const { return rule_; }
    const std::vector<mpz_class>& prefix() const { return prefix_; }
    const mpz_class& start() const { return start_; }
    const mpz_class& step() const { return step_; }
    // Number of available indices for Explicit sequences.
    long horizon() const { return static_cast<long>(prefix_.size()); }

    mpz_class n(long k) const;                      // 1-indexed
    mpz_class gap(long k) const;                    // n_k − n_{k−1}, k >= 2

private:
    TSequence(long p, std::vector<mpz_class> prefix, GapRule rule, mpz_class start,
              mpz_class step);

    long p_;
    std::vector<mpz_class> prefix_;
    GapRule rule_;
    mpz_class start_;
    mpz_class step_;
};

// num/p^exponent mod 1 with 0 <= num < p^exponent and p ∤ num unless num = 0.
struct PruferElement {
    long p = 2;
    mpz_class num;
    long exponent = 0;

    UnitRational value() const;
};

PruferElement make_prufer_element(long p, const mpz_class& num, long exponent);
PruferElement u_element(const TSequence& t, long k);

// (u, ω) as the exact rational (num·Σ_{l<e} a_l p^l)/p^e mod 1.
UnitRational pair(const PruferElement& u, const PadicDigits& w);

enum class RunCase { ZeroRun, MaxRun, Interior };

const char* to_string(RunCase c);

// Terminal-run statistics of ω below index n_k: d is the least j such that
// the digits on (j, n_k] are constantly 0 or constantly p−1 (−1 when the run
// reaches a_0), m = max(d, n_{k−1}) and gap = n_k − m.
struct RunAnalysis {
    long k = 0;
    mpz_class d;
    mpz_class m;
    mpz_class gap;
    RunCase tag = RunCase::ZeroRun;
};

RunAnalysis run_analysis(const PadicDigits& w, const TSequence& t, long k);

// Closed form of pair(u_k, ω) from the run statistics; equal to pair exactly.
UnitRational arg_reduced(const PadicDigits& w, const TSequence& t, long k);

enum class Membership { Member, NonMember, Inconclusive };

const char* to_string(Membership m);

// witness_bound is stored as the coefficient q of π: the recurring chord
// values are at least π·q, compared exactly as rationals.
struct MembershipVerdict {
    Membership verdict = Membership::Inconclusive;
    std::vector<std::pair<long, mpz_class>> evidence;  // (k, gap at k)
    std::optional<mpq_class> witness_bound;
};

// Decides ω ∈ s_u via gap → ∞: constant tails over a divergent sequence are
// members, nonconstant periodic tails recur with bounded gaps, and explicit
// finite sequences only yield evidence up to K.
MembershipVerdict classify_membership(const PadicDigits& w, const TSequence& t, long K);

}  // namespace charseq::prufer
