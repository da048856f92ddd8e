#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "charseq/certificate.hpp"
#include "charseq/metric.hpp"
#include "charseq/prufer.hpp"

namespace charseq::prufer {

// Which construction produced the witness exponent.
//   InteriorDigit: a digit strictly between 0 and p-1 pins the argument a
//     whole 1/p away from both ends of the circle.
//   DescentPair:   a (p-1, 0) digit pair pins it within 1/p of 1.
//   AscentPair:    a (0, p-1) digit pair pins it within 1/p of 0 but at
//     least (p-1)/p^2 away.
//   Accumulated:   windows whose scanned digits are all constant contribute
//     small fixed-scale increments that are summed until the chord test
//     clears the threshold.
//   BruteForce:    direct scan of every admissible single-power exponent.
enum class RefuteItem { InteriorDigit, DescentPair, AscentPair, Accumulated, BruteForce };

const char* to_string(RefuteItem i);

enum class RefuteStatus { Found, NotRefutable, SearchExhausted };

const char* to_string(RefuteStatus s);

struct WindowRecord {
    long k = 0;      // character index whose digit window was scanned
    long band_lo = 0;  // admissible witness exponents (0-indexed digit
    long band_hi = -1; // positions); band_lo > band_hi means none
    int core = -1;   // scanned digit block: 0 all-zero, 1 all-max, -1 other
};

struct RefutationTrace {
    long r0 = 0;  // depth constant: 1/p^r0 below a tenth of delta
    long k0 = 0;  // start constant: 1/2^{n_k0} below a tenth of delta
    bool complemented = false;  // digits were flipped to their complement
    std::vector<WindowRecord> windows;
    long picked_window = 0;   // k of the window that yielded the witness
    long picked_index = 0;    // 1-indexed digit position for the pair/digit items
    std::vector<long> accumulated_exponents;  // exponents summed by Accumulated
};

struct DiscontinuityWitness {
    mpz_class q;                     // the witness element is omega0^q
    RefuteItem item = RefuteItem::BruteForce;
    UnitRational chord_value;        // alpha*q mod 1
    MetricCertificate neighborhood;  // rho(0, omega0^q) certificate, upper bound < delta
};

struct RefutationResult {
    RefuteStatus status = RefuteStatus::SearchExhausted;
    std::optional<DiscontinuityWitness> witness;
    RefutationTrace trace;
};

struct RefuteOptions {
    long max_windows = 48;       // windows scanned beyond k0 (divergent sequences)
    long max_accumulation = 4096;  // cap on exponents summed by Accumulated
};

// Searches for q such that omega0^q lies in the delta-ball around 0 while
// alpha*q mod 1 has chord above eps, certifying that no continuous character
// can send omega0 to e^{2 pi i alpha}. Requires 0 < eps < 1/p^2. When
// alpha's reduced denominator is a power of p the search is vacuous
// (NotRefutable). Both witness checks are re-verified independently of the
// search: the chord by exact threshold comparison, the neighborhood by a
// fresh metric certificate.
RefutationResult refute_character(const UnitRational& alpha, const TSequence& t,
                                  const mpq_class& eps, const mpq_class& delta,
                                  const RefuteOptions& opts = {});

}  // namespace charseq::prufer
