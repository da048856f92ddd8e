#include <doctest.h>

#include <gmpxx.h>

#include "charseq/error.hpp"
#include "charseq/refute.hpp"
#include "charseq/torus.hpp"

using namespace charseq;
using namespace charseq::prufer;

namespace {

TSequence standard_t(long p) { return TSequence::arithmetic(p, {2, 5, 9}, 3, 1); }

mpz_class zpow(long base, long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base),
                  static_cast<unsigned long>(e));
    return r;
}

UnitRational frac(long num, long den) { return make_unit_rational(num, den); }

void check_witness_invariants(const RefutationResult& res, const mpq_class& eps,
                              const mpq_class& delta) {
    REQUIRE(res.status == RefuteStatus::Found);
    REQUIRE(res.witness.has_value());
    const DiscontinuityWitness& w = *res.witness;
    CHECK(w.q >= 1);
    CHECK(chord_vs_threshold(w.chord_value, eps) == Ternary::Above);
    CHECK(w.neighborhood.converged);
    CHECK(interval_certainly_below(w.neighborhood.total, delta));
}

}  // namespace

TEST_CASE("base 2 witnesses land on the first wide enough window") {
    const mpq_class eps(1, 100);
    const mpq_class delta(1, 10);
    TSequence t = standard_t(2);

    SUBCASE("1/3") {
        RefutationResult res = refute_character(frac(1, 3), t, eps, delta);
        check_witness_invariants(res, eps, delta);
        CHECK(res.witness->item == RefuteItem::AscentPair);
        CHECK(res.witness->q == zpow(2, 36));
        CHECK(res.witness->chord_value == frac(1, 3));
        CHECK(res.trace.r0 == 7);
        CHECK(res.trace.k0 == 3);
        CHECK(res.trace.picked_window == 8);
        CHECK(res.trace.picked_index == 38);
        CHECK_FALSE(res.trace.complemented);
        REQUIRE(res.trace.windows.size() == 5);
        CHECK(res.trace.windows.front().k == 4);
        CHECK(res.trace.windows.front().band_lo > res.trace.windows.front().band_hi);
        CHECK(res.trace.windows.back().band_lo == 36);
        CHECK(res.trace.windows.back().band_hi == 36);
    }
    SUBCASE("1/5") {
        RefutationResult res = refute_character(frac(1, 5), t, eps, delta);
        check_witness_invariants(res, eps, delta);
        CHECK(res.witness->item == RefuteItem::AscentPair);
        CHECK(res.witness->q == zpow(2, 45));
        CHECK(res.witness->chord_value == frac(2, 5));
        CHECK(res.trace.picked_window == 9);
        CHECK(res.trace.picked_index == 47);
        CHECK(res.trace.windows.size() == 6);
    }
    SUBCASE("2/7") {
        RefutationResult res = refute_character(frac(2, 7), t, eps, delta);
        check_witness_invariants(res, eps, delta);
        CHECK(res.witness->item == RefuteItem::AscentPair);
        CHECK(res.witness->q == zpow(2, 36));
        CHECK(res.witness->chord_value == frac(2, 7));
        CHECK(res.trace.picked_window == 8);
        CHECK(res.trace.picked_index == 38);
    }
}

TEST_CASE("base 3 witnesses use the single digit and descent constructions") {
    const mpq_class eps(1, 100);
    const mpq_class delta(1, 10);
    TSequence t = standard_t(3);

    SUBCASE("1/2 has every digit interior") {
        RefutationResult res = refute_character(frac(1, 2), t, eps, delta);
        check_witness_invariants(res, eps, delta);
        CHECK(res.witness->item == RefuteItem::InteriorDigit);
        CHECK(res.witness->q == zpow(3, 21));
        CHECK(res.witness->chord_value == frac(1, 2));
        CHECK(res.trace.r0 == 5);
        CHECK(res.trace.k0 == 3);
        CHECK(res.trace.picked_window == 6);
        CHECK(res.trace.picked_index == 22);
        CHECK(res.trace.windows.size() == 3);
    }
    SUBCASE("1/5") {
        RefutationResult res = refute_character(frac(1, 5), t, eps, delta);
        check_witness_invariants(res, eps, delta);
        CHECK(res.witness->item == RefuteItem::InteriorDigit);
        CHECK(res.witness->q == zpow(3, 21));
        CHECK(res.witness->chord_value == frac(3, 5));
        CHECK(res.trace.picked_window == 6);
        CHECK(res.trace.picked_index == 22);
    }
    SUBCASE("2/7 hits a max digit followed by a zero") {
        RefutationResult res = refute_character(frac(2, 7), t, eps, delta);
        check_witness_invariants(res, eps, delta);
        CHECK(res.witness->item == RefuteItem::DescentPair);
        CHECK(res.witness->q == zpow(3, 21));
        CHECK(res.witness->chord_value == frac(5, 7));
        CHECK(res.trace.picked_window == 6);
        CHECK(res.trace.picked_index == 22);
    }
}

TEST_CASE("interior digits win immediately at larger primes") {
    TSequence t = TSequence::arithmetic(5, {2, 5, 9}, 3, 1);
    RefutationResult res = refute_character(frac(1, 2), t, mpq_class(1, 100), mpq_class(1, 10));
    check_witness_invariants(res, mpq_class(1, 100), mpq_class(1, 10));
    CHECK(res.witness->item == RefuteItem::InteriorDigit);
    CHECK(res.witness->q == zpow(5, 10));
    CHECK(res.witness->chord_value == frac(1, 2));
    CHECK(res.trace.r0 == 3);
    CHECK(res.trace.picked_window == 4);
    CHECK(res.trace.windows.size() == 1);
}

TEST_CASE("arguments of p power order cannot be refuted") {
    TSequence t2 = standard_t(2);
    TSequence t3 = standard_t(3);
    const mpq_class eps(1, 100);
    const mpq_class delta(1, 10);
    for (const UnitRational& a : {frac(1, 2), frac(1, 8), UnitRational()}) {
        RefutationResult res = refute_character(a, t2, eps, delta);
        CHECK(res.status == RefuteStatus::NotRefutable);
        CHECK_FALSE(res.witness.has_value());
    }
    for (const UnitRational& a : {frac(1, 9), frac(1, 3)}) {
        RefutationResult res = refute_character(a, t3, eps, delta);
        CHECK(res.status == RefuteStatus::NotRefutable);
        CHECK_FALSE(res.witness.has_value());
    }
    // The same argument is a valid target at the other prime.
    RefutationResult res = refute_character(frac(1, 3), t2, eps, delta);
    CHECK(res.status == RefuteStatus::Found);
}

TEST_CASE("parameter validation") {
    TSequence t = standard_t(2);
    CHECK_THROWS_AS(refute_character(frac(1, 3), t, mpq_class(1, 4), mpq_class(1, 10)),
                    DomainError);
    CHECK_THROWS_AS(refute_character(frac(1, 3), t, mpq_class(0), mpq_class(1, 10)),
                    DomainError);
    CHECK_THROWS_AS(refute_character(frac(1, 3), t, mpq_class(1, 100), mpq_class(0)),
                    DomainError);
    TSequence t3 = TSequence::arithmetic(3, {2, 5, 9}, 3, 1);
    CHECK_THROWS_AS(refute_character(frac(1, 2), t3, mpq_class(1, 9), mpq_class(1, 10)),
                    DomainError);
    // Explicit sequence too short to anchor the search depth.
    TSequence shallow = TSequence::explicit_seq(2, {2, 5});
    CHECK_THROWS_AS(refute_character(frac(1, 3), shallow, mpq_class(1, 100), mpq_class(1, 10)),
                    HorizonError);
}

TEST_CASE("window budget exhaustion is reported honestly") {
    RefuteOptions opts;
    opts.max_windows = 3;  // all scanned windows are still too narrow
    RefutationResult res =
        refute_character(frac(1, 3), standard_t(2), mpq_class(1, 100), mpq_class(1, 10), opts);
    CHECK(res.status == RefuteStatus::SearchExhausted);
    CHECK_FALSE(res.witness.has_value());
    REQUIRE(res.trace.windows.size() == 3);
    for (const WindowRecord& w : res.trace.windows) CHECK(w.band_lo > w.band_hi);
}

// An explicit sequence with gaps pinned to the minimum width, paired with an
// argument whose digits are zero throughout every scanned window.  The first
// nonzero digit sits where no pair construction may reach it, so the search
// has to fall through to the accumulation and single-power phases.
TEST_CASE("narrow explicit windows exercise the fallback phases") {
    TSequence t = TSequence::explicit_seq(2, {2, 5, 8, 11});
    const mpq_class eps(1, 5);
    const mpq_class delta(10);

    SUBCASE("a reachable single power clears the threshold") {
        // digits: 1 at position 13, then alternating from 15 on.
        UnitRational alpha = make_unit_rational(7, 49152);
        RefutationResult res = refute_character(alpha, t, eps, delta);
        check_witness_invariants(res, eps, delta);
        CHECK(res.witness->item == RefuteItem::BruteForce);
        CHECK(res.witness->q == 512);
        CHECK(res.witness->chord_value == frac(7, 96));
        CHECK(res.trace.r0 == 1);
        CHECK(res.trace.k0 == 1);
        CHECK(res.trace.picked_window == 4);
        CHECK(res.trace.picked_index == 10);
        REQUIRE(res.trace.windows.size() == 3);
        for (const WindowRecord& w : res.trace.windows) CHECK(w.core == 0);
        // One accumulation term was tried before the fallback fired.
        REQUIRE(res.trace.accumulated_exponents.size() == 1);
        CHECK(res.trace.accumulated_exponents[0] == 6);
    }
    SUBCASE("no admissible exponent clears the threshold") {
        UnitRational alpha = make_unit_rational(1, 49152);
        RefutationResult res = refute_character(alpha, t, eps, delta);
        CHECK(res.status == RefuteStatus::SearchExhausted);
        CHECK_FALSE(res.witness.has_value());
        REQUIRE(res.trace.windows.size() == 3);
        REQUIRE(res.trace.accumulated_exponents.size() == 1);
        CHECK(res.trace.accumulated_exponents[0] == 9);
    }
}

// Wider explicit windows whose only nonzero digits sit just above each
// window: every window contributes one small increment and the running sum
// needs five of them before the chord clears the threshold.
TEST_CASE("constant windows accumulate until the chord test clears") {
    TSequence t = TSequence::explicit_seq(2, {2, 9, 17, 26, 36, 47});
    const mpq_class eps(1, 5);
    const mpq_class delta(10);
    mpq_class v(0);
    for (long j : {10L, 18L, 27L, 37L, 48L}) v += mpq_class(mpz_class(1), mpz_class(1) << j);
    v += mpq_class(1, 3) / (mpz_class(1) << 53);

    SUBCASE("plain digits") {
        UnitRational alpha(v);
        RefutationResult res = refute_character(alpha, t, eps, delta);
        check_witness_invariants(res, eps, delta);
        CHECK(res.witness->item == RefuteItem::Accumulated);
        CHECK_FALSE(res.trace.complemented);
        CHECK(res.trace.picked_window == 6);
        CHECK(res.trace.accumulated_exponents == std::vector<long>{3, 11, 20, 30, 41});
        mpz_class q(0);
        for (long e : {3L, 11L, 20L, 30L, 41L}) q += zpow(2, e);
        CHECK(res.witness->q == q);
        REQUIRE(res.trace.windows.size() == 5);
        for (const WindowRecord& w : res.trace.windows) CHECK(w.core == 0);
    }
    SUBCASE("complemented digits") {
        UnitRational alpha(mpq_class(1 - v));
        RefutationResult res = refute_character(alpha, t, eps, delta);
        check_witness_invariants(res, eps, delta);
        CHECK(res.witness->item == RefuteItem::Accumulated);
        CHECK(res.trace.complemented);
        CHECK(res.trace.picked_window == 6);
        CHECK(res.trace.accumulated_exponents == std::vector<long>{3, 11, 20, 30, 41});
        for (const WindowRecord& w : res.trace.windows) CHECK(w.core == 1);
    }
}
