#include "charseq/metric.hpp"

#include <algorithm>

namespace charseq::prufer {

namespace {

constexpr long kMaxConvergeK = 4096;
constexpr long kSurveyK = 12;

long first_nonzero_index(const PadicDigits& z) {
    for (long i = 0; i < z.tail_start(); ++i)
        if (z.digit(i) != 0) return i;
    if (z.tail() == TailKind::MaxDigit) return z.tail_start();
    for (long j = 0; j < z.period(); ++j)
        if (z.tail() == TailKind::Periodic && z.pattern()[static_cast<size_t>(j)] != 0)
            return z.tail_start() + j;
    throw std::logic_error("first_nonzero_index: zero stream not folded");
}

mpq_class dyadic(const mpz_class& n) {  // 2^{-n}
    if (!n.fits_ulong_p()) throw DomainError("dyadic: exponent out of range");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, n.get_ui());
    return mpq_class(mpz_class(1), den);
}

mpq_class inv_p_pow(long p, const mpz_class& e) {  // p^{-e}
    if (!e.fits_ulong_p()) throw DomainError("inv_p_pow: exponent out of range");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(p), e.get_ui());
    return mpq_class(mpz_class(1), den);
}

}  // namespace

MetricCertificate rho(const PadicDigits& w1, const PadicDigits& w2, const TSequence& t,
                      const mpq_class& tol) {
    if (tol <= 0) throw DomainError("rho: tolerance must be positive");
    if (w1.p() != w2.p() || w1.p() != t.p()) throw DomainError("rho: prime mismatch");

    PadicDigits z = sub_digits(w1, w2);
    MetricCertificate cert;
    if (z.is_zero()) {
        cert.converged = true;
        return cert;
    }
    cert.d_part = dyadic(first_nonzero_index(z));
    mpq_class term_tol = tol / 2;
    auto term = [&](long k) { return chord_length(pair(u_element(t, k), z), term_tol); };

    if (!t.divergent()) {
        CertifiedReal sup{0.0, 0.0};
        for (long k = 1; k <= t.horizon(); ++k) sup = interval_max(sup, term(k));
        cert.sup_part = sup;
        cert.horizon = t.horizon();
        cert.converged = true;
    } else if (z.tail() == TailKind::Periodic) {
        // recurring terms never die out; certify a floor and flag
        double floor = 0.0;
        for (long k = 1; k <= kSurveyK; ++k) floor = std::max(floor, term(k).lo);
        cert.sup_part = CertifiedReal{floor, 2.0};
        cert.horizon = kSurveyK;
        cert.converged = false;
    } else {
        long ts = z.tail_start();
        CertifiedReal sup{0.0, 0.0};
        long k = 1;
        for (; k <= kMaxConvergeK; ++k) {
            sup = interval_max(sup, term(k));
            if (t.n(k) < ts) continue;
            // every later term is at most 2π/p^{gap(k+1)}
            mpq_class coeff = 2 * inv_p_pow(t.p(), t.gap(k + 1));
            if (compare_pi_multiple(coeff, to_rational(sup.lo)) <= 0) break;
        }
        if (k > kMaxConvergeK) throw HorizonError("rho: sup enclosure did not stabilize");
        cert.sup_part = sup;
        cert.horizon = k;
        cert.converged = true;
    }
    cert.total = interval_add_exact(cert.sup_part, cert.d_part);
    return cert;
}

GeneratorApproximation approximate_by_generator(const PadicDigits& w, const TSequence& t,
                                                const mpq_class& eps) {
    if (eps <= 0) throw DomainError("approximate_by_generator: epsilon must be positive");
    if (w.p() != t.p()) throw DomainError("approximate_by_generator: prime mismatch");
    if (w.tail() == TailKind::Periodic)
        throw DomainError("approximate_by_generator: stream is not in the subgroup");

    long p = w.p();
    mpq_class margin = eps / 10;
    long r = 0;
    for (mpq_class v(1); v >= margin; v /= p) ++r;  // least r with p^{-r} < ε/10

    long D = w.tail_start();
    long k0 = 2;
    while (true) {
        if (!t.divergent() && k0 > t.horizon())
            throw HorizonError("approximate_by_generator: explicit horizon too short");
        if (t.n(k0 - 1) >= D && t.gap(k0) >= r + 2 && dyadic(t.n(k0 - 1)) < margin) break;
        ++k0;
    }

    RunAnalysis ra = run_analysis(w, t, k0);
    mpz_class q = 0, place = 1;
    long m = ra.m.get_si();
    for (long l = 0; l <= m; ++l) {
        q += w.digit(l) * place;
        place *= p;
    }

    GeneratorApproximation out;
    out.q = q;
    out.cert = rho(w, power_of_generator(q, p), t, eps / 20);
    if (!interval_certainly_below(out.cert.total, eps))
        throw std::logic_error("approximate_by_generator: certificate misses its target");
    return out;
}

Cert3 in_delta_neighborhood(const PadicDigits& w, const TSequence& t, const mpq_class& delta) {
    if (delta <= 0) throw DomainError("in_delta_neighborhood: delta must be positive");
    PadicDigits zero(w.p(), {}, TailKind::Zero);
    for (int attempt = 0; attempt < 3; ++attempt) {
        mpq_class tol = delta / (1 << (4 + 6 * attempt));
        MetricCertificate c;
        try {
            c = rho(zero, w, t, tol);
        } catch (const HorizonError&) {
            return Cert3::Unknown;
        }
        if (interval_certainly_below(c.total, delta)) return Cert3::True;
        if (to_rational(c.total.lo) >= delta) return Cert3::False;
        if (!c.converged) return Cert3::Unknown;  // refinement cannot move the interval
    }
    return Cert3::Unknown;
}

}  // namespace charseq::prufer
