#include "charseq/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <sstream>

namespace charseq::oracle {

using prufer::PadicDigits;
using prufer::PruferElement;
using prufer::TailKind;
using prufer::TSequence;

unsigned long long SeededRng::next() {
    state_ += 0x9E3779B97F4A7C15ull;
    unsigned long long z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

unsigned long long SeededRng::below(unsigned long long bound) {
    return bound == 0 ? 0 : next() % bound;
}

UnitRational pair_bruteforce(const PruferElement& u, const PadicDigits& w) {
    if (u.p != w.p()) throw DomainError("pair_bruteforce: prime mismatch");
    mpz_class horner = 0;
    for (long l = u.exponent - 1; l >= 0; --l) {
        horner = horner * u.p + w.digit(l);
    }
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(u.p),
                  static_cast<unsigned long>(u.exponent));
    mpz_class num = (u.num * horner) % den;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    num /= g;
    mpz_class d = den / g;
    mpq_class q;
    mpq_set_num(q.get_mpq_t(), num.get_mpz_t());
    mpq_set_den(q.get_mpq_t(), d.get_mpz_t());
    return UnitRational(q);
}

namespace {

long max_cases_cap() {
    const char* env = std::getenv("CHARSEQ_MAX_CASES");
    if (!env) return -1;
    long v = std::atol(env);
    return v > 0 ? v : -1;
}

std::string describe_digits(const std::vector<int>& digits) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < digits.size(); ++i) {
        if (i) os << ",";
        os << digits[i];
    }
    os << ")";
    return os.str();
}

}  // namespace

EquivalenceReport exhaustive_arg_check(long p, const std::vector<mpz_class>& tseq_prefix,
                                       long window_len) {
    if (p != 2 && p != 3 && p != 5)
        throw DomainError("exhaustive_arg_check: p must be one of 2, 3, 5");
    if (window_len < 1 || window_len > 10)
        throw DomainError("exhaustive_arg_check: window length must be in [1, 10]");

    auto t0 = std::chrono::steady_clock::now();
    TSequence t = TSequence::explicit_seq(p, tseq_prefix);
    long K = t.horizon();

    EquivalenceReport report;
    {
        std::ostringstream os;
        os << "arg-equivalence p=" << p << " window=" << window_len;
        report.suite = os.str();
    }

    long cap = max_cases_cap();
    std::vector<int> digits(static_cast<size_t>(window_len), 0);
    bool done = false;
    while (!done) {
        PadicDigits w(p, digits, TailKind::Zero);
        for (long k = 2; k <= K; ++k) {
            UnitRational closed = prufer::arg_reduced(w, t, k);
            UnitRational brute = pair_bruteforce(prufer::u_element(t, k), w);
            ++report.cases_run;
            if (prufer::run_analysis(w, t, k).tag == prufer::RunCase::Interior)
                ++report.interior_cases;
            if (closed != brute) {
                std::ostringstream os;
                os << "p=" << p << " digits=" << describe_digits(digits) << " k=" << k
                   << " closed=" << closed.str() << " brute=" << brute.str();
                report.mismatches.push_back(os.str());
            }
            if (cap > 0 && report.cases_run >= cap) {
                done = true;
                break;
            }
        }
        // odometer over base-p digit assignments
        size_t i = 0;
        for (; i < digits.size(); ++i) {
            if (++digits[i] < p) break;
            digits[i] = 0;
        }
        if (i == digits.size()) done = true;
    }

    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

DecayTable decay_table(const PadicDigits& w, const TSequence& t, long K) {
    if (K < 2) throw DomainError("decay_table: horizon must be at least 2");
    DecayTable table;
    for (long k = 2; k <= K; ++k) {
        prufer::RunAnalysis ra = prufer::run_analysis(w, t, k);
        DecayRow row;
        row.k = k;
        row.n_k = t.n(k);
        row.d = ra.d;
        row.m = ra.m;
        row.gap = ra.gap;
        row.pairing = prufer::pair(prufer::u_element(t, k), w);
        if (row.pairing != prufer::arg_reduced(w, t, k))
            throw std::logic_error("decay_table: closed form disagrees with the pairing");
        row.chord = chord_length(row.pairing);
        table.rows.push_back(std::move(row));
    }
    return table;
}

PadicDigits seeded_stream(unsigned long long seed, const StreamSpec& spec) {
    SeededRng rng(seed);
    long plen = static_cast<long>(rng.below(static_cast<unsigned long long>(spec.max_prefix_len) + 1));
    std::vector<int> prefix;
    for (long i = 0; i < plen; ++i)
        prefix.push_back(static_cast<int>(rng.below(static_cast<unsigned long long>(spec.p))));
    if (spec.tail != TailKind::Periodic) return PadicDigits(spec.p, std::move(prefix), spec.tail);

    long len = 2 + static_cast<long>(rng.below(static_cast<unsigned long long>(
                       std::max(1L, spec.max_pattern_len - 1))));
    std::vector<int> pattern;
    for (long i = 0; i < len; ++i)
        pattern.push_back(static_cast<int>(rng.below(static_cast<unsigned long long>(spec.p))));
    bool constant = std::all_of(pattern.begin(), pattern.end(),
                                [&](int d) { return d == pattern[0]; });
    if (constant) pattern[0] = (pattern[0] + 1) % static_cast<int>(spec.p);
    return PadicDigits(spec.p, std::move(prefix), TailKind::Periodic, std::move(pattern));
}

namespace {

// Uniform value below bound, collapsing huge orders to a drawable range.
mpz_class draw_below(SeededRng& rng, const mpz_class& bound) {
    if (bound <= 1) return 0;
    unsigned long cap = 1UL << 20;
    unsigned long b = bound.fits_ulong_p() && bound.get_ui() < cap
                          ? static_cast<unsigned long>(bound.get_ui())
                          : cap;
    return mpz_class(static_cast<unsigned long>(rng.below(b)));
}

}  // namespace

dsum::DSStream seeded_stream(unsigned long long seed, const DSStreamSpec& spec,
                             const dsum::OrderSequence& orders) {
    SeededRng rng(seed);
    long plen = static_cast<long>(rng.below(static_cast<unsigned long long>(spec.max_prefix_len) + 1));
    if (!orders.unbounded()) plen = std::min(plen, orders.horizon());
    std::vector<mpz_class> prefix;
    for (long n = 1; n <= plen; ++n) prefix.push_back(draw_below(rng, orders.b(n)));
    if (spec.tail == dsum::DSTail::Zero) return dsum::DSStream::zero_tail(std::move(prefix));

    // Everything past the prefix must stay below the smallest order there.
    mpz_class head = orders.unbounded() || plen < orders.horizon() ? orders.b(plen + 1)
                                                                   : mpz_class(2);
    if (spec.tail == dsum::DSTail::Constant) {
        mpz_class c = 1 + draw_below(rng, std::min(mpz_class(head - 1), mpz_class(16)));
        return dsum::DSStream::constant_tail(std::move(prefix), c);
    }
    long len = 1 + static_cast<long>(rng.below(static_cast<unsigned long long>(
                       std::max(1L, spec.max_table_len))));
    std::vector<dsum::ValueFormula> formulas;
    for (long i = 0; i < len; ++i) {
        switch (rng.below(3)) {
            case 0:
                formulas.push_back(dsum::ValueFormula::constant(
                    draw_below(rng, std::min(head, mpz_class(8)))));
                break;
            case 1: {
                mpz_class den = 2 + draw_below(rng, 6);
                mpz_class num = 1 + draw_below(rng, den - 1);
                formulas.push_back(dsum::ValueFormula::floor_ratio(num, den));
                break;
            }
            default:
                formulas.push_back(dsum::ValueFormula::order_minus(
                    1 + draw_below(rng, std::min(mpz_class(head - 1), mpz_class(8)))));
        }
    }
    return dsum::DSStream::table(std::move(prefix), std::move(formulas));
}

}  // namespace charseq::oracle
