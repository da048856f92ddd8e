#pragma once

#include <gmpxx.h>

#include "charseq/certificate.hpp"
#include "charseq/prufer.hpp"

namespace charseq::prufer {

// Certified evaluation of ρ(ω1, ω2) = d(ω1, ω2) + sup_k chord(pair(u_k, ω1 − ω2)).
//
// The d-part is exact. The sup is evaluated term by term; over a divergent
// sequence with a constant-tail difference the terms eventually fall under
// 2π/p^{gap}, so the scan stops once that tail bound drops below the best
// chord already certified (converged = true, total width ≤ tol). A
// nonconstant periodic difference keeps recurring terms alive forever; the
// certificate then carries a sound floor and the trivial ceiling 2 with
// converged = false. Explicit sequences have finitely many characters, so
// their sup is an exact finite maximum.
MetricCertificate rho(const PadicDigits& w1, const PadicDigits& w2, const TSequence& t,
                      const mpq_class& tol);

struct GeneratorApproximation {
    mpz_class q;  // the approximant is power_of_generator(q, p)
    MetricCertificate cert;
};

// Picks q truncating ω's digits at m = n_{k0−1} for the first k0 with the
// whole prefix below n_{k0−1}, gap(k0) ≥ r+2 and 2^{−n_{k0−1}} < ε/10, where
// p^{−r} < ε/10; the returned certificate proves ρ(ω, ω0^q) < ε.
GeneratorApproximation approximate_by_generator(const PadicDigits& w, const TSequence& t,
                                                const mpq_class& eps);

// Decides ρ(0, ω) < δ; Unknown only when the certificate interval still
// straddles δ at the final refinement level.
Cert3 in_delta_neighborhood(const PadicDigits& w, const TSequence& t, const mpq_class& delta);

}  // namespace charseq::prufer
