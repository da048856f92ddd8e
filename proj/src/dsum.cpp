#include "charseq/dsum.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "charseq/error.hpp"

namespace charseq::dsum {

namespace {

constexpr long kSupLoopCap = 1 << 20;
constexpr long kSearchCap = 1 << 22;
constexpr long kSurveyExtra = 12;

mpq_class dyadic(long n) {
    mpq_class v(1);
    mpq_div_2exp(v.get_mpq_t(), v.get_mpq_t(), static_cast<unsigned long>(n));
    return v;
}

mpq_class ratio_of(const mpz_class& num, const mpz_class& den) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

// Distance of a nonnegative rational to the nearest integer.
mpq_class norm_of(const mpq_class& x) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    mpq_class r = x - mpq_class(fl);
    return std::min(r, mpq_class(1 - r));
}

mpz_class ceil_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

}  // namespace

// ---------------------------------------------------------------- orders

OrderSequence OrderSequence::explicit_seq(std::vector<mpz_class> orders) {
    OrderSequence s;
    s.prefix_ = std::move(orders);
    s.rule_ = OrderRule::Explicit;
    if (s.prefix_.empty()) throw DomainError("OrderSequence: empty order list");
    for (size_t i = 0; i < s.prefix_.size(); ++i) {
        if (s.prefix_[i] < 2) throw DomainError("OrderSequence: orders must be at least 2");
        if (i > 0 && s.prefix_[i] < s.prefix_[i - 1])
            throw DomainError("OrderSequence: orders must be nondecreasing");
    }
    return s;
}

OrderSequence OrderSequence::linear(std::vector<mpz_class> prefix, long slope) {
    OrderSequence s = explicit_seq(std::move(prefix));
    if (slope < 1) throw DomainError("OrderSequence: linear slope must be at least 1");
    s.rule_ = OrderRule::Linear;
    s.slope_ = slope;
    return s;
}

OrderSequence OrderSequence::geometric(std::vector<mpz_class> prefix, long ratio) {
    OrderSequence s = explicit_seq(std::move(prefix));
    if (ratio < 2) throw DomainError("OrderSequence: geometric ratio must be at least 2");
    s.rule_ = OrderRule::Geometric;
    s.ratio_ = ratio;
    return s;
}

mpz_class OrderSequence::b(long n) const {
    if (n < 1) throw DomainError("OrderSequence: coordinates are indexed from 1");
    const long len = horizon();
    if (n <= len) return prefix_[static_cast<size_t>(n - 1)];
    switch (rule_) {
        case OrderRule::Explicit:
            throw HorizonError("OrderSequence: coordinate beyond explicit horizon");
        case OrderRule::Linear:
            return prefix_.back() + mpz_class(slope_) * (n - len);
        case OrderRule::Geometric: {
            mpz_class r;
            mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(ratio_),
                          static_cast<unsigned long>(n - len));
            return prefix_.back() * r;
        }
    }
    throw std::logic_error("OrderSequence: bad rule");
}

// ---------------------------------------------------------------- formulas

ValueFormula ValueFormula::constant(const mpz_class& value) {
    if (value < 0) throw DomainError("ValueFormula: constant must be nonnegative");
    ValueFormula f;
    f.kind = ValueKind::Const;
    f.c = value;
    return f;
}

ValueFormula ValueFormula::floor_ratio(const mpz_class& num, const mpz_class& den) {
    if (den < 1 || num < 0 || num >= den)
        throw DomainError("ValueFormula: ratio must satisfy 0 <= num < den");
    if (num == 0) return constant(0);
    ValueFormula f;
    f.kind = ValueKind::FloorRatio;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    f.u = num / g;
    f.v = den / g;
    return f;
}

ValueFormula ValueFormula::order_minus(const mpz_class& offset) {
    if (offset < 1) throw DomainError("ValueFormula: offset must be at least 1");
    ValueFormula f;
    f.kind = ValueKind::OrderMinus;
    f.c = offset;
    return f;
}

mpz_class ValueFormula::value_at(const mpz_class& b) const {
    switch (kind) {
        case ValueKind::Const: return c;
        case ValueKind::FloorRatio: {
            mpz_class q;
            mpz_class prod = b * u;
            mpz_fdiv_q(q.get_mpz_t(), prod.get_mpz_t(), v.get_mpz_t());
            return q;
        }
        case ValueKind::OrderMinus: return b - c;
    }
    throw std::logic_error("ValueFormula: bad kind");
}

// ---------------------------------------------------------------- streams

namespace {

void check_prefix(const std::vector<mpz_class>& prefix) {
    for (const mpz_class& v : prefix)
        if (v < 0) throw DomainError("DSStream: coordinate values must be nonnegative");
}

// Shrinks a formula table to its minimal period.
std::vector<ValueFormula> minimal_table(std::vector<ValueFormula> t) {
    const size_t L = t.size();
    for (size_t d = 1; d < L; ++d) {
        if (L % d != 0) continue;
        bool ok = true;
        for (size_t i = d; i < L && ok; ++i) ok = t[i] == t[i % d];
        if (ok) {
            t.resize(d);
            return t;
        }
    }
    return t;
}

}  // namespace

DSStream DSStream::zero_tail(std::vector<mpz_class> prefix) {
    check_prefix(prefix);
    DSStream s;
    s.prefix_ = std::move(prefix);
    s.tail_ = DSTail::Zero;
    s.table_ = {ValueFormula::constant(0)};
    return s;
}

DSStream DSStream::constant_tail(std::vector<mpz_class> prefix, const mpz_class& c) {
    if (c < 0) throw DomainError("DSStream: constant tail must be nonnegative");
    if (c == 0) return zero_tail(std::move(prefix));
    check_prefix(prefix);
    DSStream s;
    s.prefix_ = std::move(prefix);
    s.tail_ = DSTail::Constant;
    s.table_ = {ValueFormula::constant(c)};
    return s;
}

DSStream DSStream::table(std::vector<mpz_class> prefix, std::vector<ValueFormula> formulas) {
    if (formulas.empty()) throw DomainError("DSStream: empty formula table");
    check_prefix(prefix);
    formulas = minimal_table(std::move(formulas));
    if (formulas.size() == 1 && formulas[0].kind == ValueKind::Const) {
        if (formulas[0].c == 0) return zero_tail(std::move(prefix));
        return constant_tail(std::move(prefix), formulas[0].c);
    }
    DSStream s;
    s.prefix_ = std::move(prefix);
    s.tail_ = DSTail::Table;
    s.table_ = std::move(formulas);
    return s;
}

long DSStream::period() const { return static_cast<long>(table_.size()); }

const ValueFormula& DSStream::formula_at(long n) const {
    if (n <= prefix_len()) throw std::logic_error("DSStream: formula_at inside prefix");
    return table_[static_cast<size_t>((n - prefix_len() - 1) % period())];
}

mpz_class DSStream::value(long n, const OrderSequence& orders) const {
    if (n < 1) throw DomainError("DSStream: coordinates are indexed from 1");
    mpz_class b = orders.b(n);
    mpz_class v = n <= prefix_len() ? prefix_[static_cast<size_t>(n - 1)]
                                    : formula_at(n).value_at(b);
    if (v < 0 || v >= b) throw DomainError("DSStream: coordinate value out of range");
    return v;
}

// ---------------------------------------------------------------- elements

DSElement make_ds_element(const std::map<long, mpz_class>& support,
                          const OrderSequence& orders) {
    DSElement x;
    for (const auto& [n, v] : support) {
        if (n < 1) throw DomainError("DSElement: coordinates are indexed from 1");
        if (v < 0 || v >= orders.b(n)) throw DomainError("DSElement: value out of range");
        if (v != 0) x.support.emplace(n, v);
    }
    return x;
}

DSElement basis_element(long n, const OrderSequence& orders) {
    return make_ds_element({{n, mpz_class(1)}}, orders);
}

DSElement add_ds(const DSElement& x, const DSElement& y, const OrderSequence& orders) {
    std::map<long, mpz_class> sum = x.support;
    for (const auto& [n, v] : y.support) sum[n] += v;
    for (auto& [n, v] : sum) v %= orders.b(n);
    return make_ds_element(sum, orders);
}

DSStream to_stream(const DSElement& x) {
    long top = x.support.empty() ? 0 : x.support.rbegin()->first;
    std::vector<mpz_class> prefix(static_cast<size_t>(top), mpz_class(0));
    for (const auto& [n, v] : x.support) prefix[static_cast<size_t>(n - 1)] = v;
    return DSStream::zero_tail(std::move(prefix));
}

UnitRational pair_ds(const DSElement& x, const DSStream& w, const OrderSequence& orders) {
    mpq_class acc(0);
    for (const auto& [n, v] : x.support) {
        mpz_class b = orders.b(n);
        if (v < 0 || v >= b) throw DomainError("pair_ds: element value out of range");
        acc += ratio_of(v * w.value(n, orders), b);
    }
    return UnitRational(acc);
}

// ------------------------------------------------------ difference analysis

namespace {

// How the values of two aligned tail formulas relate as the order grows.
struct PairClass {
    bool equal = false;
    bool limit_zero = true;
    mpz_class bound;       // ||diff/b|| <= bound/b for vanishing differences
    mpq_class limit_norm;  // limit of ||diff/b|| when it does not vanish
    mpz_class threshold;   // orders past this force the values apart
};

PairClass classify_pair(ValueFormula f, ValueFormula g) {
    PairClass pc;
    if (f == g) {
        pc.equal = true;
        return pc;
    }
    if (f.kind > g.kind) std::swap(f, g);
    if (f.kind == ValueKind::Const && g.kind == ValueKind::Const) {
        pc.bound = abs(f.c - g.c);
        pc.threshold = 0;
    } else if (f.kind == ValueKind::Const && g.kind == ValueKind::OrderMinus) {
        pc.bound = f.c + g.c;
        pc.threshold = f.c + g.c;
    } else if (f.kind == ValueKind::OrderMinus && g.kind == ValueKind::OrderMinus) {
        pc.bound = abs(f.c - g.c);
        pc.threshold = 0;
    } else if (f.kind == ValueKind::Const && g.kind == ValueKind::FloorRatio) {
        pc.limit_zero = false;
        pc.limit_norm = norm_of(ratio_of(g.u, g.v));
        pc.threshold = ceil_div((f.c + 1) * g.v, g.u);
    } else if (f.kind == ValueKind::FloorRatio && g.kind == ValueKind::OrderMinus) {
        pc.limit_zero = false;
        pc.limit_norm = norm_of(ratio_of(f.u, f.v));
        pc.threshold = ceil_div(g.c * f.v, f.v - f.u) + 1;
    } else {  // FloorRatio vs FloorRatio, distinct reduced ratios
        pc.limit_zero = false;
        pc.limit_norm = norm_of(mpq_class(ratio_of(f.u, f.v) - ratio_of(g.u, g.v)));
        pc.threshold = 2 * f.v * g.v;
    }
    return pc;
}

struct DiffInfo {
    bool equal = false;
    long first = 0;  // first differing coordinate when not equal
    long stable = 0; // prefix length plus one aligned period
    bool any_nonzero_limit = false;
    mpz_class c_bound;  // largest vanishing-difference numerator
};

mpz_class diff_mod(const DSStream& x, const DSStream& y, long n, const OrderSequence& orders) {
    mpz_class d = (x.value(n, orders) - y.value(n, orders)) % orders.b(n);
    if (d < 0) d += orders.b(n);
    return d;
}

// Locates the first differing coordinate of two streams over unbounded
// orders and classifies every aligned tail formula pair.
DiffInfo analyze_diff(const DSStream& x, const DSStream& y, const OrderSequence& orders) {
    DiffInfo info;
    const long P = std::max(x.prefix_len(), y.prefix_len());
    const long L = std::lcm(x.period(), y.period());
    info.stable = P + L;
    bool all_equal = true;
    mpz_class max_threshold(0);
    for (long o = 0; o < L; ++o) {
        PairClass pc = classify_pair(x.formula_at(P + 1 + o), y.formula_at(P + 1 + o));
        if (pc.equal) continue;
        all_equal = false;
        if (pc.limit_zero) {
            info.c_bound = std::max(info.c_bound, pc.bound);
        } else {
            info.any_nonzero_limit = true;
        }
        max_threshold = std::max(max_threshold, pc.threshold);
    }
    for (long n = 1; n <= P + L; ++n) {
        if (diff_mod(x, y, n, orders) != 0) {
            info.first = n;
            return info;
        }
    }
    if (all_equal) {
        info.equal = true;
        return info;
    }
    // Identical values so far despite differing formulas: the orders grow
    // strictly past the prefix, so the classified thresholds bound the scan.
    for (long n = P + L + 1;; ++n) {
        if (diff_mod(x, y, n, orders) != 0) {
            info.first = n;
            return info;
        }
        if (orders.b(n) > max_threshold)
            throw std::logic_error("rho_ds: differing formulas never separated");
    }
}

}  // namespace

MetricCertificate rho_ds(const DSStream& x, const DSStream& y,
                         const OrderSequence& orders, const mpq_class& tol) {
    if (tol <= 0) throw DomainError("rho_ds: tolerance must be positive");
    const mpq_class term_tol = tol / 2;
    MetricCertificate cert;

    auto term = [&](long n) {
        return chord_length(UnitRational(ratio_of(diff_mod(x, y, n, orders), orders.b(n))),
                            term_tol);
    };

    if (!orders.unbounded()) {
        const long H = orders.horizon();
        long first = 0;
        CertifiedReal sup{0.0, 0.0};
        for (long n = 1; n <= H; ++n) {
            if (first == 0 && diff_mod(x, y, n, orders) != 0) first = n;
            sup = interval_max(sup, term(n));
        }
        cert.horizon = H;
        cert.converged = true;
        cert.sup_part = sup;
        cert.d_part = first == 0 ? mpq_class(0) : dyadic(first);
        cert.total = interval_add_exact(cert.sup_part, cert.d_part);
        return cert;
    }

    DiffInfo info = analyze_diff(x, y, orders);
    if (info.equal) {
        cert.converged = true;
        return cert;
    }
    cert.d_part = dyadic(info.first);

    if (info.any_nonzero_limit) {
        const long end = std::max(info.stable, info.first) + kSurveyExtra;
        CertifiedReal sup{0.0, 0.0};
        for (long n = 1; n <= end; ++n) sup = interval_max(sup, term(n));
        cert.horizon = end;
        cert.converged = false;
        cert.sup_part = CertifiedReal{sup.lo, 2.0};
        cert.total = interval_add_exact(cert.sup_part, cert.d_part);
        return cert;
    }

    CertifiedReal sup{0.0, 0.0};
    const long gate = std::max(info.stable, info.first);
    for (long n = 1; n <= kSupLoopCap; ++n) {
        sup = interval_max(sup, term(n));
        if (n < gate) continue;
        if (info.c_bound == 0) {  // differences vanish identically past the prefix
            cert.horizon = n;
            cert.converged = true;
            cert.sup_part = sup;
            cert.total = interval_add_exact(sup, cert.d_part);
            return cert;
        }
        mpq_class coeff = 2 * ratio_of(info.c_bound, orders.b(n + 1));
        if (compare_pi_multiple(coeff, to_rational(sup.lo)) <= 0) {
            cert.horizon = n;
            cert.converged = true;
            cert.sup_part = sup;
            cert.total = interval_add_exact(sup, cert.d_part);
            return cert;
        }
    }
    throw HorizonError("rho_ds: sup enclosure did not stabilize");
}

mpq_class canonical_distance_ds(const DSStream& x, const DSStream& y,
                                const OrderSequence& orders) {
    if (!orders.unbounded()) {
        for (long n = 1; n <= orders.horizon(); ++n)
            if (diff_mod(x, y, n, orders) != 0) return dyadic(n);
        return mpq_class(0);
    }
    DiffInfo info = analyze_diff(x, y, orders);
    return info.equal ? mpq_class(0) : dyadic(info.first);
}

// ---------------------------------------------------------------- members

DSMembershipVerdict membership_ds(const DSStream& w, const OrderSequence& orders, long K) {
    if (K < 1) throw DomainError("membership_ds: horizon must be at least 1");
    DSMembershipVerdict out;
    const long upto = orders.unbounded() ? K : std::min(K, orders.horizon());
    for (long n = 1; n <= upto; ++n)
        out.evidence.emplace_back(n, norm_of(ratio_of(w.value(n, orders), orders.b(n))));

    if (w.tail() == DSTail::Zero) {
        out.verdict = Membership::Member;
        return out;
    }
    if (!orders.unbounded()) {
        out.verdict = Membership::Inconclusive;
        return out;
    }
    mpq_class worst(0);
    for (long o = 0; o < w.period(); ++o) {
        const ValueFormula& f = w.formula_at(w.prefix_len() + 1 + o);
        if (f.kind == ValueKind::FloorRatio) worst = std::max(worst, norm_of(ratio_of(f.u, f.v)));
    }
    if (worst > 0) {
        out.verdict = Membership::NonMember;
        out.witness_bound = worst;
    } else {
        out.verdict = Membership::Member;
    }
    return out;
}

DSElement truncate(const DSStream& w, long m, const OrderSequence& orders) {
    if (m < 0) throw DomainError("truncate: length must be nonnegative");
    if (!orders.unbounded() && m > orders.horizon())
        throw HorizonError("truncate: length beyond explicit horizon");
    std::map<long, mpz_class> support;
    for (long n = 1; n <= m; ++n) {
        mpz_class v = w.value(n, orders);
        if (v != 0) support.emplace(n, v);
    }
    return make_ds_element(support, orders);
}

DenseApproximation approximate_dense(const DSStream& w, const OrderSequence& orders,
                                     const mpq_class& eps) {
    if (eps <= 0) throw DomainError("approximate_dense: eps must be positive");
    if (membership_ds(w, orders, 1).verdict != Membership::Member)
        throw DomainError("approximate_dense: stream is not in the subgroup");

    long m = 0;
    if (w.tail() == DSTail::Zero) {
        for (long n = w.prefix_len(); n >= 1; --n) {
            if (w.prefix()[static_cast<size_t>(n - 1)] != 0) {
                m = n;
                break;
            }
        }
    } else {
        const mpq_class margin = eps / 10;
        mpz_class C(0);
        for (long o = 0; o < w.period(); ++o) {
            const ValueFormula& f = w.formula_at(w.prefix_len() + 1 + o);
            C = std::max(C, f.c);  // Const value or OrderMinus offset
        }
        long n0 = w.prefix_len() + 1;
        while (compare_pi_multiple(2 * ratio_of(C, orders.b(n0)), margin) >= 0) {
            if (++n0 > kSearchCap)
                throw HorizonError("approximate_dense: coordinate bound never met");
        }
        long md = 0;
        for (mpq_class v(1); v >= margin; v /= 2) ++md;
        m = std::max({n0, md, w.prefix_len()});
    }

    DenseApproximation out;
    out.m = m;
    out.cert = rho_ds(w, to_stream(truncate(w, m, orders)), orders, mpq_class(eps / 20));
    if (!interval_certainly_below(out.cert.total, eps))
        throw std::logic_error("approximate_dense: certificate missed the margin");
    return out;
}

// ------------------------------------------------------------ classification

const char* to_string(LambdaKind k) {
    switch (k) {
        case LambdaKind::FiniteSupport: return "finite-support";
        case LambdaKind::Zero: return "zero";
        case LambdaKind::One: return "one";
        case LambdaKind::Interior: return "interior";
        case LambdaKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

// Tail formula slots reachable by the index rule, excluding always-zero ones.
std::vector<ValueFormula> participating_slots(const DSStream& chi, const IndexRule& r) {
    std::vector<ValueFormula> slots;
    const long P = chi.prefix_len();
    const long L = chi.period();
    std::vector<bool> seen(static_cast<size_t>(L), false);
    long n = r.start;
    while (n <= P) n += r.stride;
    for (long j = 0; j < 2 * L; ++j, n += r.stride) {
        size_t o = static_cast<size_t>((n - P - 1) % L);
        if (seen[o]) continue;
        seen[o] = true;
        const ValueFormula& f = chi.formula_at(P + 1 + static_cast<long>(o));
        if (f.kind == ValueKind::Const && f.c == 0) continue;
        slots.push_back(f);
    }
    return slots;
}

}  // namespace

LambdaClass classify_lambda(const DSStream& chi, const OrderSequence& orders,
                            const std::optional<IndexRule>& subseq) {
    IndexRule r = subseq.value_or(IndexRule{});
    if (r.start < 1 || r.stride < 1)
        throw DomainError("classify_lambda: index rule must have positive start and stride");

    LambdaClass out;
    if (chi.tail() == DSTail::Zero) {
        out.kind = LambdaKind::FiniteSupport;
        return out;
    }
    if (!orders.unbounded()) {
        out.kind = LambdaKind::Inconclusive;
        return out;
    }
    std::vector<ValueFormula> slots = participating_slots(chi, r);
    if (slots.empty()) {
        out.kind = LambdaKind::FiniteSupport;
        return out;
    }
    bool first = true;
    mpq_class limit;
    for (const ValueFormula& f : slots) {
        mpq_class l;
        switch (f.kind) {
            case ValueKind::Const: l = 0; break;
            case ValueKind::OrderMinus: l = 1; break;
            case ValueKind::FloorRatio: l = ratio_of(f.u, f.v); break;
        }
        if (first) {
            limit = l;
            first = false;
        } else if (limit != l) {
            out.kind = LambdaKind::Inconclusive;
            return out;
        }
    }
    out.limit = limit;
    if (limit == 0) {
        out.kind = LambdaKind::Zero;
    } else if (limit == 1) {
        out.kind = LambdaKind::One;
    } else {
        out.kind = LambdaKind::Interior;
        out.alpha = mpq_class(2 * norm_of(limit) / 3);
    }
    return out;
}

// ---------------------------------------------------------------- refuter

const char* to_string(DSCase c) {
    switch (c) {
        case DSCase::Interior: return "interior";
        case DSCase::LambdaZero: return "lambda-zero";
        case DSCase::LambdaOne: return "lambda-one";
    }
    return "?";
}

const char* to_string(DSOutcome o) {
    switch (o) {
        case DSOutcome::Found: return "found";
        case DSOutcome::Continuous: return "continuous";
    }
    return "?";
}

namespace {

// First index of the rule, at or after `from`, whose coordinate is positive.
long next_positive(const DSStream& chi, const OrderSequence& orders, const IndexRule& r,
                   long from) {
    long n = r.start;
    if (n < from) n += ((from - n + r.stride - 1) / r.stride) * r.stride;
    for (long steps = 0; steps <= kSearchCap; ++steps, n += r.stride) {
        if (!orders.unbounded() && n > orders.horizon())
            throw HorizonError("refute_ds_character: ran out of coordinates");
        if (chi.value(n, orders) > 0) return n;
    }
    throw HorizonError("refute_ds_character: no positive coordinate found");
}

void verify_ds_witness(DSWitness& w, const OrderSequence& orders) {
    w.chord_decision = chord_vs_threshold(w.chord_arg, w.chord_threshold);
    if (w.chord_decision != Ternary::Above)
        throw std::logic_error("refute_ds_character: chord re-verification failed");
    const mpq_class bound(1, w.M);
    w.neighborhood =
        rho_ds(DSStream::zero_tail({}), to_stream(w.omega), orders, mpq_class(bound / 16));
    if (!interval_certainly_below(w.neighborhood.total, bound))
        throw std::logic_error("refute_ds_character: neighborhood re-verification failed");
}

}  // namespace

DSRefutation refute_ds_character(const DSStream& chi, const OrderSequence& orders,
                                 long M, const mpq_class& eps,
                                 const std::optional<IndexRule>& subseq) {
    if (M <= 10) throw DomainError("refute_ds_character: M must exceed 10");
    if (eps <= 0) throw DomainError("refute_ds_character: eps must be positive");
    const IndexRule rule = subseq.value_or(IndexRule{});

    LambdaClass cls = classify_lambda(chi, orders, subseq);
    DSRefutation res;
    if (cls.kind == LambdaKind::FiniteSupport) {
        res.outcome = DSOutcome::Continuous;
        return res;
    }
    if (cls.kind == LambdaKind::Inconclusive)
        throw DomainError("refute_ds_character: coordinate ratio limit is not computable");

    DSWitness w;
    w.M = M;
    const mpq_class deep(3, 10 * M);

    if (cls.kind == LambdaKind::Interior) {
        if (compare_pi_multiple(cls.alpha, eps) <= 0)
            throw DomainError("refute_ds_character: eps too large for the interior bound");
        w.case_tag = DSCase::Interior;
        w.alpha = cls.alpha;
        long n = next_positive(chi, orders, rule, 1);
        for (long guard = 0;; ++guard) {
            if (guard > kSearchCap)
                throw HorizonError("refute_ds_character: interior witness search stalled");
            mpq_class nrm = norm_of(ratio_of(chi.value(n, orders), orders.b(n)));
            if (orders.b(n) > 10 * M && dyadic(n) < deep && nrm > cls.alpha) break;
            n = next_positive(chi, orders, rule, n + rule.stride);
        }
        mpz_class c = chi.value(n, orders);
        w.omega = basis_element(n, orders);
        w.coords.push_back({n, mpz_class(1), CertifiedReal{0.0, 0.0}});
        w.sum = ratio_of(c, orders.b(n));
        w.chord_arg = UnitRational(w.sum);
        w.chord_threshold = eps;
        verify_ds_witness(w, orders);
        res.outcome = DSOutcome::Found;
        res.witness = std::move(w);
        return res;
    }

    // Limits 0 and 1 share one construction: work with the coordinate values
    // for limit 0 and with their complements against the orders for limit 1.
    if (eps >= mpq_class(1, 100))
        throw DomainError("refute_ds_character: eps must be below 1/100 for boundary limits");
    const bool mirrored = cls.kind == LambdaKind::One;
    w.case_tag = mirrored ? DSCase::LambdaOne : DSCase::LambdaZero;
    auto small_part = [&](long n) {
        mpz_class c = chi.value(n, orders);
        return mirrored ? mpz_class(orders.b(n) - c) : c;
    };

    // Largest numerator the tail formulas can produce for the small part.
    mpz_class cmax(0);
    for (long o = 0; o < chi.period(); ++o) {
        const ValueFormula& f = chi.formula_at(chi.prefix_len() + 1 + o);
        if (f.kind != ValueKind::Const && f.kind != ValueKind::OrderMinus) continue;
        cmax = std::max(cmax, f.c);
    }

    const mpz_class m3 = mpz_class(M) * M * M;
    long start = next_positive(chi, orders, rule, chi.prefix_len() + 1);
    for (long guard = 0;; ++guard) {
        if (guard > kSearchCap)
            throw HorizonError("refute_ds_character: depth condition search stalled");
        if (dyadic(start) < deep &&
            compare_pi_multiple(20 * m3 * mpq_class(cmax), mpq_class(orders.b(start))) < 0)
            break;
        start = next_positive(chi, orders, rule, start + rule.stride);
    }

    std::map<long, mpz_class> support;
    mpq_class sum(0);
    mpq_class pairing(0);
    long n = start;
    for (long l = 0; l < M; ++l) {
        if (l > 0) n = next_positive(chi, orders, rule, n + rule.stride);
        mpz_class b = orders.b(n);
        mpz_class small = small_part(n);
        if (small <= 0) throw std::logic_error("refute_ds_character: small part vanished");
        if (compare_pi_multiple(20 * m3 * mpq_class(small), mpq_class(b)) >= 0)
            throw std::logic_error("refute_ds_character: depth condition regressed");
        mpq_class quotient = ratio_of(b, 20 * M * small);
        mpz_class a = floor_quotient_by_pi(quotient);
        if (a <= M) throw std::logic_error("refute_ds_character: floor value too small");
        support.emplace(n, a);
        w.coords.push_back({n, a, quotient_by_pi(quotient, a, default_chord_tolerance())});
        sum += mpq_class(a) * ratio_of(small, b);
        pairing += mpq_class(a) * ratio_of(chi.value(n, orders), b);
    }

    // Exact sandwich: 0.9/(20 pi) < sum < 1/(20 pi).
    if (compare_pi_multiple(20 * sum, mpq_class(9, 10)) <= 0 ||
        compare_pi_multiple(20 * sum, mpq_class(1)) >= 0)
        throw std::logic_error("refute_ds_character: sum escaped the sandwich");

    w.omega = make_ds_element(support, orders);
    w.sum = sum;
    w.chord_arg = UnitRational(pairing);
    w.chord_threshold = mpq_class(1, 25);
    verify_ds_witness(w, orders);
    res.outcome = DSOutcome::Found;
    res.witness = std::move(w);
    return res;
}

}  // namespace charseq::dsum
