#include <doctest.h>
#include <gmpxx.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "charseq/oracle.hpp"
#include "charseq/prufer.hpp"
#include "charseq/torus.hpp"

using namespace charseq;
using namespace charseq::prufer;
using namespace charseq::oracle;

namespace {

std::vector<mpz_class> idx(std::initializer_list<long> v) {
    return std::vector<mpz_class>(v.begin(), v.end());
}

mpz_class ppow(long p, const mpz_class& e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), e.get_ui());
    return r;
}

}  // namespace

TEST_CASE("brute force pairing matches frozen values") {
    PadicDigits w(2, {1, 0, 1}, TailKind::Zero);
    CHECK(pair_bruteforce(make_prufer_element(2, 1, 3), w) == make_unit_rational(5, 8));
    PadicDigits zero(2, {}, TailKind::Zero);
    CHECK(pair_bruteforce(make_prufer_element(2, 3, 5), zero).is_zero());
}

TEST_CASE("pairing routes agree on random inputs") {
    SeededRng rng(0x5EED);
    const long primes[] = {2, 3, 5};
    for (int iter = 0; iter < 20000; ++iter) {
        long p = primes[rng.below(3)];
        StreamSpec spec;
        spec.p = p;
        spec.max_prefix_len = 12;
        spec.max_pattern_len = 5;
        switch (rng.below(3)) {
            case 0: spec.tail = TailKind::Zero; break;
            case 1: spec.tail = TailKind::MaxDigit; break;
            default: spec.tail = TailKind::Periodic; break;
        }
        PadicDigits w = seeded_stream(rng.next(), spec);
        long e = 1 + static_cast<long>(rng.below(30));
        mpz_class span = ppow(p, e) - 1;
        mpz_class num(1);
        if (span != 0) num += mpz_class(static_cast<unsigned long>(rng.next())) % span;
        PruferElement u = make_prufer_element(p, num, e);
        CAPTURE(iter);
        REQUIRE(pair(u, w) == pair_bruteforce(u, w));
    }
}

TEST_CASE("exhaustive window agreement") {
    EquivalenceReport r2 = exhaustive_arg_check(2, idx({2, 5}), 6);
    CHECK(r2.pass());
    CHECK(r2.cases_run == 64);
    CHECK(r2.interior_cases == 0);
    CHECK(r2.mismatches.empty());

    EquivalenceReport r3 = exhaustive_arg_check(3, idx({2, 5}), 6);
    CHECK(r3.pass());
    CHECK(r3.cases_run == 729);
    CHECK(r3.interior_cases > 0);

    CHECK_THROWS_AS(exhaustive_arg_check(7, idx({2, 5}), 6), DomainError);
    CHECK_THROWS_AS(exhaustive_arg_check(2, idx({2, 5}), 0), DomainError);
}

TEST_CASE("decay table") {
    TSequence t = TSequence::arithmetic(2, idx({2, 5, 9}), 3, 1);
    DecayTable tab = decay_table(generator_omega0(2), t, 8);
    REQUIRE(tab.rows.size() == 7);
    CHECK(tab.rows.front().k == 2);
    CHECK(tab.rows.back().k == 8);
    for (size_t i = 0; i + 1 < tab.rows.size(); ++i) {
        CHECK(tab.rows[i + 1].gap > tab.rows[i].gap);
    }
    CHECK(tab.rows[0].gap == 3);
    CHECK(tab.rows[1].gap == 4);

    PadicDigits alt(2, {}, TailKind::Periodic, {1, 0});
    DecayTable bounded = decay_table(alt, t, 8);
    for (const auto& row : bounded.rows) CHECK(row.gap <= 2);

    PadicDigits zero(2, {}, TailKind::Zero);
    DecayTable flat = decay_table(zero, t, 5);
    for (const auto& row : flat.rows) {
        CHECK(row.pairing.is_zero());
        CHECK(row.chord.hi == 0.0);
    }
}

TEST_CASE("seeded streams are deterministic") {
    StreamSpec spec;
    spec.p = 3;
    spec.tail = TailKind::Periodic;
    PadicDigits a = seeded_stream(7, spec);
    PadicDigits b = seeded_stream(7, spec);
    PadicDigits c = seeded_stream(8, spec);
    CHECK(a == b);
    CHECK(a.p() == 3);
    CHECK((a == c) == false);
}

TEST_CASE("membership evidence is numerically sound") {
    TSequence t2 = TSequence::arithmetic(2, idx({2, 5, 9}), 3, 1);
    TSequence t3 = TSequence::arithmetic(3, idx({2, 5, 9}), 3, 1);

    SeededRng rng(0xACE);
    int nonmembers = 0;
    int members = 0;
    for (int iter = 0; iter < 60; ++iter) {
        long p = (iter % 2 == 0) ? 2 : 3;
        const TSequence& t = (p == 2) ? t2 : t3;
        StreamSpec spec;
        spec.p = p;
        spec.max_prefix_len = 6;
        spec.max_pattern_len = 4;
        spec.tail = (iter % 3 == 0)   ? TailKind::Zero
                    : (iter % 3 == 1) ? TailKind::MaxDigit
                                      : TailKind::Periodic;
        PadicDigits w = seeded_stream(rng.next(), spec);
        MembershipVerdict mv = classify_membership(w, t, 24);
        CAPTURE(iter);
        if (mv.verdict == Membership::NonMember) {
            ++nonmembers;
            REQUIRE(mv.witness_bound.has_value());
            mpz_class min_gap = -1;
            for (const auto& [k, gap] : mv.evidence) {
                // unified enclosure: the reduced argument lands in
                // [1/p^(gap+1), 1/p^gap] on the circle, exactly
                mpq_class norm = nearest_integer_norm(pair(u_element(t, k), w));
                mpq_class lo(mpz_class(1), ppow(p, gap + 1));
                mpq_class hi(mpz_class(1), ppow(p, gap));
                REQUIRE(norm >= lo);
                REQUIRE(norm <= hi);
                if (min_gap < 0 || gap < min_gap) min_gap = gap;
            }
            mpq_class expected(mpz_class(1), ppow(p, min_gap + 1));
            REQUIRE(*mv.witness_bound == expected);
            // at least one recurring argument realizes the claimed chord bound
            bool realized = false;
            for (const auto& [k, gap] : mv.evidence) {
                if (gap != min_gap) continue;
                CertifiedReal c = chord_length(pair(u_element(t, k), w));
                if (compare_pi_multiple(*mv.witness_bound, to_rational(c.lo)) < 0) {
                    realized = true;
                    break;
                }
            }
            REQUIRE(realized);
        } else if (mv.verdict == Membership::Member) {
            ++members;
            long k = 2;
            while (t.gap(k) < 14) ++k;
            if (w.is_zero()) continue;
            CertifiedReal c = chord_length(pair(u_element(t, k), w));
            REQUIRE(interval_certainly_below(c, mpq_class(1, 1000)));
        }
    }
    CHECK(nonmembers > 0);
    CHECK(members > 0);
}
