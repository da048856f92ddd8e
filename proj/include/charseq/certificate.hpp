#pragma once

#include <gmpxx.h>

#include "charseq/torus.hpp"

namespace charseq {

// Three-valued answer for questions a finite computation may not settle.
enum class Cert3 { True, False, Unknown };

inline const char* to_string(Cert3 c) {
    switch (c) {
        case Cert3::True: return "True";
        case Cert3::False: return "False";
        case Cert3::Unknown: return "Unknown";
    }
    return "?";
}

// Certified evaluation of the translation-invariant metric
//   rho(x, y) = d(x, y) + sup_k |chi_k(x) - chi_k(y)|.
// d_part is exact; sup_part and total are outward double enclosures.
// horizon reports how many characters were evaluated directly before the
// tail was either certified (converged = true) or given up on, in which
// case total.hi is a crude but sound upper bound.
struct MetricCertificate {
    mpq_class d_part;
    CertifiedReal sup_part;
    CertifiedReal total;
    long horizon = 0;
    bool converged = false;
};

}  // namespace charseq
