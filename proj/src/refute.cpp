#include "charseq/refute.hpp"

#include <stdexcept>
#include <string>

#include "charseq/error.hpp"
#include "charseq/torus.hpp"

namespace charseq::prufer {

namespace {

long to_long(const mpz_class& v, const char* what) {
    if (!v.fits_slong_p()) throw HorizonError(std::string(what) + ": index out of range");
    return v.get_si();
}

// Base-p digits of alpha after the point, 1-indexed, generated on demand.
class AlphaDigits {
public:
    AlphaDigits(const UnitRational& a, long p) : p_(p), rem_(a.num()), den_(a.den()) {}

    int at(long i) {
        while (static_cast<long>(cache_.size()) < i) {
            rem_ *= p_;
            mpz_class d = rem_ / den_;
            rem_ %= den_;
            cache_.push_back(static_cast<int>(d.get_si()));
        }
        return cache_[static_cast<size_t>(i - 1)];
    }

private:
    long p_;
    mpz_class rem_;
    mpz_class den_;
    std::vector<int> cache_;
};

bool denominator_is_p_power(const mpz_class& den, long p) {
    mpz_class d = den;
    while (d % p == 0) d /= p;
    return d == 1;
}

mpz_class pow_p(long p, long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(e));
    return r;
}

}  // namespace

const char* to_string(RefuteItem i) {
    switch (i) {
        case RefuteItem::InteriorDigit: return "interior-digit";
        case RefuteItem::DescentPair: return "descent-pair";
        case RefuteItem::AscentPair: return "ascent-pair";
        case RefuteItem::Accumulated: return "accumulated";
        case RefuteItem::BruteForce: return "brute-force";
    }
    return "?";
}

const char* to_string(RefuteStatus s) {
    switch (s) {
        case RefuteStatus::Found: return "found";
        case RefuteStatus::NotRefutable: return "not-refutable";
        case RefuteStatus::SearchExhausted: return "search-exhausted";
    }
    return "?";
}

RefutationResult refute_character(const UnitRational& alpha, const TSequence& t,
                                  const mpq_class& eps, const mpq_class& delta,
                                  const RefuteOptions& opts) {
    const long p = t.p();
    if (eps <= 0 || eps * p * p >= 1)
        throw DomainError("refute_character: eps must lie in (0, 1/p^2)");
    if (delta <= 0) throw DomainError("refute_character: delta must be positive");
    if (opts.max_windows < 1 || opts.max_accumulation < 1)
        throw DomainError("refute_character: search bounds must be positive");

    RefutationResult res;

    if (denominator_is_p_power(alpha.den(), p)) {
        res.status = RefuteStatus::NotRefutable;
        return res;
    }

    const mpq_class margin = delta / 10;

    long r0 = 0;
    for (mpq_class v(1); v >= margin; v /= p) ++r0;
    res.trace.r0 = r0;

    long k0 = 0;
    for (long k = 1;; ++k) {
        if (!t.divergent() && k > t.horizon())
            throw HorizonError("refute_character: horizon too short to anchor the search");
        mpq_class v(1);
        mpq_div_2exp(v.get_mpq_t(), v.get_mpq_t(),
                     static_cast<unsigned long>(to_long(t.n(k), "refute_character")));
        if (v < margin) {
            k0 = k;
            break;
        }
    }
    res.trace.k0 = k0;

    const long k_end = t.divergent() ? k0 + opts.max_windows
                                     : std::min(t.horizon(), k0 + opts.max_windows);

    AlphaDigits digits(alpha, p);

    // Completes a candidate exponent into a verified witness. Both checks are
    // re-derived from scratch; the search only ever proposes.
    auto finish = [&](RefuteItem item, const mpz_class& q) {
        DiscontinuityWitness w;
        w.q = q;
        w.item = item;
        w.chord_value = UnitRational(mpq_class(alpha.value() * q));
        if (chord_vs_threshold(w.chord_value, eps) != Ternary::Above)
            throw std::logic_error("refute_character: chord re-verification failed");
        PadicDigits zero(p, {}, TailKind::Zero);
        w.neighborhood = rho(zero, power_of_generator(q, p), t, mpq_class(delta / 16));
        if (!interval_certainly_below(w.neighborhood.total, delta))
            throw std::logic_error("refute_character: neighborhood re-verification failed");
        res.status = RefuteStatus::Found;
        res.witness = std::move(w);
        return res;
    };

    // Pass over the digit windows: a window k covers digit positions
    // (n_{k-1}+1, n_k+1] and admits witness exponents e with
    // n_{k-1}+1 <= e <= n_k - r0 - 1, which keeps omega0^{p^e} deep inside
    // the delta-ball regardless of which window produced it.
    for (long k = k0 + 1; k <= k_end; ++k) {
        WindowRecord rec;
        rec.k = k;
        const long n_prev = to_long(t.n(k - 1), "refute_character");
        const long n_cur = to_long(t.n(k), "refute_character");
        rec.band_lo = n_prev + 1;
        rec.band_hi = n_cur - r0 - 1;
        if (rec.band_lo <= rec.band_hi) {
            bool all_zero = true;
            bool all_max = true;
            for (long i = rec.band_lo + 1; i <= rec.band_hi + 1; ++i) {
                int b = digits.at(i);
                all_zero = all_zero && b == 0;
                all_max = all_max && b == p - 1;
            }
            rec.core = all_zero ? 0 : (all_max ? 1 : -1);
        }
        res.trace.windows.push_back(rec);
        if (rec.band_lo > rec.band_hi) continue;

        if (p > 2) {
            for (long i = rec.band_lo + 1; i <= rec.band_hi + 1; ++i) {
                int b = digits.at(i);
                if (b > 0 && b < p - 1) {
                    res.trace.picked_window = k;
                    res.trace.picked_index = i;
                    return finish(RefuteItem::InteriorDigit, pow_p(p, i - 1));
                }
            }
        }
        for (long i = rec.band_lo + 1; i <= rec.band_hi + 1; ++i) {
            if (digits.at(i) == p - 1 && digits.at(i + 1) == 0) {
                res.trace.picked_window = k;
                res.trace.picked_index = i;
                return finish(RefuteItem::DescentPair, pow_p(p, i - 1));
            }
        }
        for (long i = rec.band_lo + 2; i <= rec.band_hi + 2; ++i) {
            if (digits.at(i - 1) == 0 && digits.at(i) == p - 1) {
                res.trace.picked_window = k;
                res.trace.picked_index = i;
                return finish(RefuteItem::AscentPair, pow_p(p, i - 2));
            }
        }
    }

    // Accumulation pass: windows whose scanned digits are constant contribute
    // one exponent each, placed r0+6 positions below the first digit that
    // breaks the constant run above the window. Each contribution shifts the
    // argument by a fixed-scale positive step, so the running chord test must
    // eventually clear the threshold if enough such windows exist. All-max
    // windows are handled by flipping every digit (the chord of alpha*q is
    // unchanged when alpha is replaced by 1-alpha).
    std::vector<long> attempted;
    for (int flip = 0; flip <= 1; ++flip) {
        const int want_core = flip ? 1 : 0;
        auto eff = [&](long i) {
            int b = digits.at(i);
            return flip ? static_cast<int>(p - 1) - b : b;
        };
        mpz_class q(0);
        std::vector<long> exps;
        for (const WindowRecord& rec : res.trace.windows) {
            if (rec.core != want_core) continue;
            if (static_cast<long>(exps.size()) >= opts.max_accumulation) break;
            const long n_cur = rec.band_hi + r0 + 1;
            long l = 0;
            for (long i = rec.band_hi + 2; i <= n_cur + 5; ++i) {
                if (eff(i) > 0) {
                    l = i;
                    break;
                }
            }
            if (l == 0) continue;
            const long e = l - r0 - 6;
            if (e < rec.band_lo || e > rec.band_hi) continue;
            q += pow_p(p, e);
            exps.push_back(e);
            UnitRational arg(mpq_class(alpha.value() * q));
            if (chord_vs_threshold(arg, eps) == Ternary::Above) {
                res.trace.complemented = flip != 0;
                res.trace.picked_window = rec.k;
                res.trace.accumulated_exponents = std::move(exps);
                return finish(RefuteItem::Accumulated, q);
            }
        }
        if (exps.size() > attempted.size()) attempted = std::move(exps);
    }
    res.trace.accumulated_exponents = std::move(attempted);

    // Fallback: test every admissible single-power exponent directly.
    for (const WindowRecord& rec : res.trace.windows) {
        for (long e = rec.band_lo; e <= rec.band_hi; ++e) {
            mpz_class q = pow_p(p, e);
            UnitRational arg(mpq_class(alpha.value() * q));
            if (chord_vs_threshold(arg, eps) == Ternary::Above) {
                res.trace.picked_window = rec.k;
                res.trace.picked_index = e + 1;
                return finish(RefuteItem::BruteForce, q);
            }
        }
    }

    res.status = RefuteStatus::SearchExhausted;
    return res;
}

}  // namespace charseq::prufer
