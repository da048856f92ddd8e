#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "charseq/dsum.hpp"
#include "charseq/prufer.hpp"
#include "charseq/torus.hpp"

namespace charseq::oracle {

struct EquivalenceReport {
    std::string suite;
    long cases_run = 0;
    long interior_cases = 0;
    std::vector<std::string> mismatches;
    double elapsed_seconds = 0.0;  // informational; excluded from serialized reports

    bool pass() const { return mismatches.empty(); }
};

// Literal Horner evaluation of the pairing, sharing no code with the main
// implementation; the fraction is reduced by hand.
UnitRational pair_bruteforce(const prufer::PruferElement& u, const prufer::PadicDigits& w);

// Enumerates every digit assignment on indices 0..window_len−1 (Zero tail
// beyond) and compares arg_reduced against pair_bruteforce for every k >= 2
// the prefix supports. CHARSEQ_MAX_CASES caps the enumeration.
EquivalenceReport exhaustive_arg_check(long p, const std::vector<mpz_class>& tseq_prefix,
                                       long window_len);

struct DecayRow {
    long k = 0;
    mpz_class n_k;
    mpz_class d;
    mpz_class m;
    mpz_class gap;
    UnitRational pairing;
    CertifiedReal chord;
};

struct DecayTable {
    std::vector<DecayRow> rows;
};

DecayTable decay_table(const prufer::PadicDigits& w, const prufer::TSequence& t, long K);

struct StreamSpec {
    long p = 2;
    prufer::TailKind tail = prufer::TailKind::Zero;
    long max_prefix_len = 8;
    long max_pattern_len = 6;
};

prufer::PadicDigits seeded_stream(unsigned long long seed, const StreamSpec& spec);

struct DSStreamSpec {
    dsum::DSTail tail = dsum::DSTail::Zero;
    long max_prefix_len = 6;
    long max_table_len = 3;
};

// Deterministic direct-sum stream; every coordinate is valid for the orders.
dsum::DSStream seeded_stream(unsigned long long seed, const DSStreamSpec& spec,
                             const dsum::OrderSequence& orders);

// splitmix64: deterministic across platforms, used for all seeded corpora.
class SeededRng {
public:
    explicit SeededRng(unsigned long long seed) : state_(seed) {}
    unsigned long long next();
    unsigned long long below(unsigned long long bound);

private:
    unsigned long long state_;
};

}  // namespace charseq::oracle
