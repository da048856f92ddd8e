#include "charseq/prufer.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace charseq::prufer {

namespace {

long to_long_index(const mpz_class& v, const char* what) {
    if (!v.fits_slong_p()) throw DomainError(std::string(what) + ": index exceeds long range");
    return v.get_si();
}

mpz_class pow_p(long p, long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
    return r;
}

void check_prime(long p, const char* what) {
    if (!is_prime(p)) throw DomainError(std::string(what) + ": p must be prime");
}

// Length of the maximal constant-c run ending at position n (0 if a_n != c).
// Runs inside a nonconstant periodic tail are shorter than the period, so the
// walk is bounded; constant tails matching c extend through the whole tail.
mpz_class run_ending_at(const PadicDigits& w, const mpz_class& n, int c) {
    if (w.digit(n) != c) return 0;
    long ts = w.tail_start();
    long L = w.period();
    if (n >= ts) {
        if (w.tail() != TailKind::Periodic) {
            mpz_class len = n - ts + 1;
            for (long i = ts - 1; i >= 0 && w.prefix()[static_cast<size_t>(i)] == c; --i) ++len;
            return len;
        }
        if (n - ts >= L) {
            mpz_class len = 0;
            mpz_class i = n;
            while (len <= L && w.digit(i) == c) {
                ++len;
                --i;
            }
            if (len > L) throw std::logic_error("run_ending_at: constant pattern not folded");
            return len;
        }
    }
    mpz_class len = 0;
    long i = to_long_index(n, "run_ending_at");
    while (i >= 0 && w.digit(i) == c) {
        ++len;
        --i;
    }
    return len;
}

}  // namespace

bool is_prime(long p) {
    if (p < 2) return false;
    mpz_class v(p);
    return mpz_probab_prime_p(v.get_mpz_t(), 30) > 0;
}

const char* to_string(TailKind t) {
    switch (t) {
        case TailKind::Zero: return "zero";
        case TailKind::MaxDigit: return "max";
        case TailKind::Periodic: return "periodic";
    }
    return "?";
}

PadicDigits::PadicDigits(long p, std::vector<int> prefix, TailKind tail, std::vector<int> pattern)
    : p_(p), prefix_(std::move(prefix)), tail_(tail), pattern_(std::move(pattern)) {
    check_prime(p_, "PadicDigits");
    auto check_digits = [this](const std::vector<int>& v) {
        for (int d : v)
            if (d < 0 || d >= p_) throw DomainError("PadicDigits: digit out of range");
    };
    check_digits(prefix_);
    if (tail_ == TailKind::Periodic) {
        if (pattern_.empty()) throw DomainError("PadicDigits: periodic pattern must be nonempty");
        check_digits(pattern_);
        // minimal period
        size_t L = pattern_.size();
        for (size_t d = 1; d < L; ++d) {
            if (L % d != 0) continue;
            bool ok = true;
            for (size_t i = d; i < L && ok; ++i) ok = pattern_[i] == pattern_[i % d];
            if (ok) {
                pattern_.resize(d);
                break;
            }
        }
        // constant patterns fold into the named tails
        if (pattern_.size() == 1) {
            if (pattern_[0] == 0) {
                tail_ = TailKind::Zero;
                pattern_.clear();
            } else if (pattern_[0] == p_ - 1) {
                tail_ = TailKind::MaxDigit;
                pattern_.clear();
            }
        }
    } else if (!pattern_.empty()) {
        throw DomainError("PadicDigits: pattern given for a constant tail");
    }
    // absorb trailing prefix digits into the tail
    if (tail_ == TailKind::Periodic) {
        while (!prefix_.empty() && prefix_.back() == pattern_.back()) {
            prefix_.pop_back();
            std::rotate(pattern_.begin(), pattern_.end() - 1, pattern_.end());
        }
    } else {
        int c = tail_ == TailKind::Zero ? 0 : p_ - 1;
        while (!prefix_.empty() && prefix_.back() == c) prefix_.pop_back();
    }
}

long PadicDigits::period() const {
    return tail_ == TailKind::Periodic ? static_cast<long>(pattern_.size()) : 1;
}

int PadicDigits::digit(long i) const {
    if (i < 0) throw DomainError("PadicDigits: negative index");
    if (i < tail_start()) return prefix_[static_cast<size_t>(i)];
    switch (tail_) {
        case TailKind::Zero: return 0;
        case TailKind::MaxDigit: return static_cast<int>(p_ - 1);
        case TailKind::Periodic: {
            long off = (i - tail_start()) % period();
            return pattern_[static_cast<size_t>(off)];
        }
    }
    return 0;
}

int PadicDigits::digit(const mpz_class& i) const {
    if (i < 0) throw DomainError("PadicDigits: negative index");
    if (i < tail_start()) return prefix_[i.get_ui()];
    if (tail_ == TailKind::Zero) return 0;
    if (tail_ == TailKind::MaxDigit) return static_cast<int>(p_ - 1);
    mpz_class off = (i - tail_start()) % period();
    return pattern_[off.get_ui()];
}

PadicDigits generator_omega0(long p) {
    check_prime(p, "generator_omega0");
    return PadicDigits(p, {1}, TailKind::Zero);
}

PadicDigits power_of_generator(const mpz_class& q, long p) {
    check_prime(p, "power_of_generator");
    if (q < 0) throw DomainError("power_of_generator: exponent must be nonnegative");
    std::vector<int> digits;
    mpz_class v = q;
    while (v > 0) {
        mpz_class d = v % p;
        digits.push_back(static_cast<int>(d.get_si()));
        v /= p;
    }
    return PadicDigits(p, std::move(digits), TailKind::Zero);
}

PadicDigits sub_digits(const PadicDigits& a, const PadicDigits& b) {
    if (a.p() != b.p()) throw DomainError("sub_digits: prime mismatch");
    long p = a.p();
    long P = std::max(a.tail_start(), b.tail_start());
    long L = std::lcm(a.period(), b.period());

    std::vector<int> digits;
    int borrow = 0;
    auto emit = [&](long i) {
        int d = a.digit(i) - b.digit(i) - borrow;
        if (d < 0) {
            d += static_cast<int>(p);
            borrow = 1;
        } else {
            borrow = 0;
        }
        digits.push_back(d);
    };
    for (long i = 0; i < P; ++i) emit(i);

    std::map<std::pair<long, int>, size_t> seen;
    long i = P;
    size_t cycle_begin = 0;
    while (true) {
        std::pair<long, int> key{(i - P) % L, borrow};
        auto it = seen.find(key);
        if (it != seen.end()) {
            cycle_begin = it->second;
            break;
        }
        seen.emplace(key, digits.size());
        emit(i);
        ++i;
    }
    std::vector<int> head(digits.begin(), digits.begin() + static_cast<long>(cycle_begin));
    std::vector<int> cycle(digits.begin() + static_cast<long>(cycle_begin), digits.end());
    return PadicDigits(p, std::move(head), TailKind::Periodic, std::move(cycle));
}

mpq_class canonical_distance(const PadicDigits& a, const PadicDigits& b) {
    if (a.p() != b.p()) throw DomainError("canonical_distance: prime mismatch");
    if (a == b) return 0;
    long bound = std::max(a.tail_start(), b.tail_start()) + std::lcm(a.period(), b.period()) + 1;
    for (long i = 0; i < bound; ++i) {
        if (a.digit(i) != b.digit(i)) {
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(i));
            return mpq_class(mpz_class(1), den);
        }
    }
    throw std::logic_error("canonical_distance: canonical forms disagree without a witness");
}

TSequence::TSequence(long p, std::vector<mpz_class> prefix, GapRule rule, mpz_class start,
                     mpz_class step)
    : p_(p), prefix_(std::move(prefix)), rule_(rule), start_(std::move(start)),
      step_(std::move(step)) {}

TSequence TSequence::explicit_seq(long p, std::vector<mpz_class> indices) {
    check_prime(p, "TSequence");
    if (indices.empty()) throw DomainError("TSequence: at least one index required");
    if (indices.front() < 0) throw DomainError("TSequence: indices must be nonnegative");
    for (size_t i = 1; i < indices.size(); ++i)
        if (indices[i] <= indices[i - 1])
            throw DomainError("TSequence: indices must be strictly increasing");
    return TSequence(p, std::move(indices), GapRule::Explicit, 0, 0);
}

TSequence TSequence::arithmetic(long p, std::vector<mpz_class> prefix, const mpz_class& start,
                                const mpz_class& step) {
    TSequence base = explicit_seq(p, std::move(prefix));
    if (start < 1 || step < 1) throw DomainError("TSequence: gap rule needs start, step >= 1");
    const auto& pre = base.prefix_;
    long m = static_cast<long>(pre.size());
    for (long j = 2; j < m; ++j) {
        if (pre[j] - pre[j - 1] <= pre[j - 1] - pre[j - 2])
            throw DomainError("TSequence: prefix gaps must be strictly increasing");
    }
    if (m >= 2) {
        mpz_class first_generated = start + (m - 1) * step;
        if (first_generated <= pre[m - 1] - pre[m - 2])
            throw DomainError("TSequence: generated gaps must exceed the prefix gaps");
    }
    return TSequence(base.p_, base.prefix_, GapRule::ArithmeticGap, start, step);
}

mpz_class TSequence::n(long k) const {
    if (k < 1) throw DomainError("TSequence: k must be at least 1");
    long m = static_cast<long>(prefix_.size());
    if (k <= m) return prefix_[static_cast<size_t>(k - 1)];
    if (rule_ == GapRule::Explicit)
        throw HorizonError("TSequence: index beyond explicit horizon");
    // gap j (= n_j − n_{j−1}) equals start + (j−2)·step from position 2 on
    mpz_class kk(k), mm(m);
    mpz_class tri = (kk - 2) * (kk - 1) / 2 - (mm - 2) * (mm - 1) / 2;
    return prefix_.back() + (kk - mm) * start_ + step_ * tri;
}

mpz_class TSequence::gap(long k) const {
    if (k < 2) throw DomainError("TSequence: gap defined for k >= 2");
    return n(k) - n(k - 1);
}

PruferElement make_prufer_element(long p, const mpz_class& num, long exponent) {
    check_prime(p, "PruferElement");
    if (exponent < 0) throw DomainError("PruferElement: exponent must be nonnegative");
    if (num < 0) throw DomainError("PruferElement: numerator must be nonnegative");
    PruferElement e;
    e.p = p;
    e.exponent = exponent;
    e.num = num % pow_p(p, exponent);
    while (e.num != 0 && mpz_divisible_ui_p(e.num.get_mpz_t(), static_cast<unsigned long>(p))) {
        e.num /= p;
        --e.exponent;
    }
    if (e.num == 0) e.exponent = 0;
    return e;
}

PruferElement u_element(const TSequence& t, long k) {
    long nk = to_long_index(t.n(k), "u_element");
    return make_prufer_element(t.p(), 1, nk + 1);
}

UnitRational PruferElement::value() const {
    return UnitRational(mpq_class(num, pow_p(p, exponent)));
}

UnitRational pair(const PruferElement& u, const PadicDigits& w) {
    if (u.p != w.p()) throw DomainError("pair: prime mismatch");
    mpz_class acc = 0, place = 1;
    for (long l = 0; l < u.exponent; ++l) {
        acc += w.digit(l) * place;
        place *= u.p;
    }
    return UnitRational(mpq_class(u.num * acc, place));
}

const char* to_string(RunCase c) {
    switch (c) {
        case RunCase::ZeroRun: return "ZeroRun";
        case RunCase::MaxRun: return "MaxRun";
        case RunCase::Interior: return "Interior";
    }
    return "?";
}

RunAnalysis run_analysis(const PadicDigits& w, const TSequence& t, long k) {
    if (k < 2) throw DomainError("run_analysis: k must be at least 2");
    if (w.p() != t.p()) throw DomainError("run_analysis: prime mismatch");
    mpz_class nk = t.n(k);
    mpz_class nk_prev = t.n(k - 1);
    mpz_class zero_run = run_ending_at(w, nk, 0);
    mpz_class max_run = run_ending_at(w, nk, static_cast<int>(w.p() - 1));
    RunAnalysis ra;
    ra.k = k;
    ra.d = nk - std::max(zero_run, max_run);
    ra.m = std::max(ra.d, nk_prev);
    ra.gap = nk - ra.m;
    int top = w.digit(nk);
    ra.tag = top == 0             ? RunCase::ZeroRun
             : top == w.p() - 1   ? RunCase::MaxRun
                                  : RunCase::Interior;
    return ra;
}

UnitRational arg_reduced(const PadicDigits& w, const TSequence& t, long k) {
    RunAnalysis ra = run_analysis(w, t, k);
    long nk = to_long_index(t.n(k), "arg_reduced");
    long m = to_long_index(ra.m, "arg_reduced");
    mpz_class sum = 0, place = 1;
    for (long l = 0; l <= m; ++l) {
        sum += w.digit(l) * place;
        place *= w.p();
    }
    if (ra.tag == RunCase::MaxRun) sum -= place;  // place = p^{m+1}
    return UnitRational(mpq_class(sum, pow_p(w.p(), nk + 1)));
}

const char* to_string(Membership m) {
    switch (m) {
        case Membership::Member: return "Member";
        case Membership::NonMember: return "NonMember";
        case Membership::Inconclusive: return "Inconclusive";
    }
    return "?";
}

MembershipVerdict classify_membership(const PadicDigits& w, const TSequence& t, long K) {
    if (K < 2) throw DomainError("classify_membership: horizon must be at least 2");
    if (w.p() != t.p()) throw DomainError("classify_membership: prime mismatch");
    MembershipVerdict v;

    if (!t.divergent()) {
        long top = std::min(K, t.horizon());
        for (long k = 2; k <= top; ++k) v.evidence.emplace_back(k, run_analysis(w, t, k).gap);
        v.verdict = Membership::Inconclusive;
        return v;
    }

    if (w.tail() != TailKind::Periodic) {
        v.verdict = Membership::Member;
        for (long k = 2; k <= std::min(K, 8L); ++k)
            v.evidence.emplace_back(k, run_analysis(w, t, k).gap);
        return v;
    }

    // Nonconstant periodic tail: terminal runs are shorter than the period,
    // so gaps recur boundedly while n_k − n_{k−1} grows. The pair
    // (n_k offset in the pattern, next gap mod period) evolves on a finite
    // state space; one full cycle certifies the recurring gap values.
    long L = w.period();
    long ts = w.tail_start();
    long k = 2;
    while (!(t.gap(k) >= L + 2 && t.n(k - 1) >= ts + L)) ++k;

    std::map<std::pair<long, long>, long> seen;
    long cycle_start = k;
    while (true) {
        long off = mpz_class((t.n(k) - ts) % L).get_si();
        long gmod = mpz_class(t.gap(k + 1) % L).get_si();
        auto key = std::make_pair(off, gmod);
        auto it = seen.find(key);
        if (it != seen.end()) {
            cycle_start = it->second;
            break;
        }
        seen.emplace(key, k);
        ++k;
    }

    mpz_class r_min(-1);
    for (long kk = cycle_start; kk < k; ++kk) {
        RunAnalysis ra = run_analysis(w, t, kk);
        v.evidence.emplace_back(kk, ra.gap);
        if (r_min < 0 || ra.gap < r_min) r_min = ra.gap;
    }
    v.verdict = Membership::NonMember;
    long r = to_long_index(r_min, "classify_membership");
    v.witness_bound = mpq_class(mpz_class(1), pow_p(w.p(), r + 1));
    return v;
}

}  // namespace charseq::prufer
