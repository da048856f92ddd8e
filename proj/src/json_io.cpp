#include "charseq/json_io.hpp"

#include <sstream>

#include "charseq/error.hpp"

namespace charseq::io {

namespace {

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw DomainError(std::string("config: missing field '") + key + "'");
    return *it;
}

long field_long(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) throw DomainError(std::string("config: '") + key + "' must be an integer");
    return v.get<long>();
}

std::string field_string(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_string()) throw DomainError(std::string("config: '") + key + "' must be a string");
    return v.get<std::string>();
}

const json& field_array(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_array()) throw DomainError(std::string("config: '") + key + "' must be an array");
    return v;
}

mpz_class parse_decimal(const std::string& s) {
    if (s.empty()) throw DomainError("config: empty integer literal");
    try {
        return mpz_class(s, 10);
    } catch (const std::invalid_argument&) {
        throw DomainError("config: malformed integer literal '" + s + "'");
    }
}

std::vector<mpz_class> integer_vector(const json& arr) {
    std::vector<mpz_class> out;
    out.reserve(arr.size());
    for (const json& e : arr) out.push_back(parse_integer(e));
    return out;
}

json integer_array(const std::vector<mpz_class>& v) {
    json arr = json::array();
    for (const mpz_class& z : v) arr.push_back(integer_json(z));
    return arr;
}

json formula_json(const dsum::ValueFormula& f) {
    switch (f.kind) {
        case dsum::ValueKind::Const:
            return json{{"kind", "const"}, {"value", integer_json(f.c)}};
        case dsum::ValueKind::FloorRatio:
            return json{{"kind", "floor-ratio"}, {"num", integer_json(f.u)}, {"den", integer_json(f.v)}};
        case dsum::ValueKind::OrderMinus:
            return json{{"kind", "order-minus"}, {"offset", integer_json(f.c)}};
    }
    throw std::logic_error("formula_json: bad kind");
}

dsum::ValueFormula parse_formula(const json& j) {
    std::string kind = field_string(j, "kind");
    if (kind == "const") return dsum::ValueFormula::constant(parse_integer(field(j, "value")));
    if (kind == "floor-ratio")
        return dsum::ValueFormula::floor_ratio(parse_integer(field(j, "num")),
                                               parse_integer(field(j, "den")));
    if (kind == "order-minus")
        return dsum::ValueFormula::order_minus(parse_integer(field(j, "offset")));
    throw DomainError("config: unknown formula kind '" + kind + "'");
}

}  // namespace

mpq_class parse_rational(const std::string& s) {
    auto slash = s.find('/');
    mpz_class num, den;
    if (slash == std::string::npos) {
        num = parse_decimal(s);
        den = 1;
    } else {
        num = parse_decimal(s.substr(0, slash));
        den = parse_decimal(s.substr(slash + 1));
    }
    if (den <= 0) throw DomainError("config: rational denominator must be positive");
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

std::string rational_str(const mpq_class& q) {
    mpq_class r = q;
    r.canonicalize();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string rational_str(const UnitRational& x) { return rational_str(x.value()); }

json integer_json(const mpz_class& z) {
    if (z.fits_slong_p()) return json(z.get_si());
    return json(z.get_str());
}

mpz_class parse_integer(const json& j) {
    if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
    if (j.is_string()) return parse_decimal(j.get<std::string>());
    throw DomainError("config: expected an integer or a decimal string");
}

json digits_json(const prufer::PadicDigits& w) {
    json tail{{"kind", prufer::to_string(w.tail())}};
    if (w.tail() == prufer::TailKind::Periodic) tail["pattern"] = w.pattern();
    return json{{"p", w.p()}, {"prefix", w.prefix()}, {"tail", tail}};
}

prufer::PadicDigits parse_digits(const json& j) {
    long p = field_long(j, "p");
    std::vector<int> prefix;
    for (const json& e : field_array(j, "prefix")) {
        if (!e.is_number_integer()) throw DomainError("config: digits must be integers");
        prefix.push_back(e.get<int>());
    }
    const json& tail = field(j, "tail");
    std::string kind = field_string(tail, "kind");
    if (kind == "zero") return prufer::PadicDigits(p, prefix, prufer::TailKind::Zero);
    if (kind == "max") return prufer::PadicDigits(p, prefix, prufer::TailKind::MaxDigit);
    if (kind == "periodic") {
        std::vector<int> pattern;
        for (const json& e : field_array(tail, "pattern")) {
            if (!e.is_number_integer()) throw DomainError("config: digits must be integers");
            pattern.push_back(e.get<int>());
        }
        return prufer::PadicDigits(p, prefix, prufer::TailKind::Periodic, pattern);
    }
    throw DomainError("config: unknown tail kind '" + kind + "'");
}

json tseq_json(const prufer::TSequence& t) {
    json rule;
    if (t.rule() == prufer::GapRule::Explicit) {
        rule = json{{"kind", "explicit"}};
    } else {
        rule = json{{"kind", "arithmetic"},
                    {"start", integer_json(t.start())},
                    {"step", integer_json(t.step())}};
    }
    return json{{"p", t.p()}, {"prefix", integer_array(t.prefix())}, {"gap_rule", rule}};
}

prufer::TSequence parse_tseq(const json& j) {
    long p = field_long(j, "p");
    std::vector<mpz_class> prefix = integer_vector(field_array(j, "prefix"));
    const json& rule = field(j, "gap_rule");
    std::string kind = field_string(rule, "kind");
    if (kind == "explicit") return prufer::TSequence::explicit_seq(p, prefix);
    if (kind == "arithmetic")
        return prufer::TSequence::arithmetic(p, prefix, parse_integer(field(rule, "start")),
                                             parse_integer(field(rule, "step")));
    throw DomainError("config: unknown gap rule '" + kind + "'");
}

json orders_json(const dsum::OrderSequence& b) {
    json rule;
    switch (b.rule()) {
        case dsum::OrderRule::Explicit: rule = json{{"kind", "explicit"}}; break;
        case dsum::OrderRule::Linear:
            rule = json{{"kind", "linear"}, {"slope", b.slope()}};
            break;
        case dsum::OrderRule::Geometric:
            rule = json{{"kind", "geometric"}, {"ratio", b.ratio()}};
            break;
    }
    return json{{"prefix", integer_array(b.prefix())}, {"rule", rule}};
}

dsum::OrderSequence parse_orders(const json& j) {
    std::vector<mpz_class> prefix = integer_vector(field_array(j, "prefix"));
    const json& rule = field(j, "rule");
    std::string kind = field_string(rule, "kind");
    if (kind == "explicit") return dsum::OrderSequence::explicit_seq(prefix);
    if (kind == "linear") return dsum::OrderSequence::linear(prefix, field_long(rule, "slope"));
    if (kind == "geometric")
        return dsum::OrderSequence::geometric(prefix, field_long(rule, "ratio"));
    throw DomainError("config: unknown order rule '" + kind + "'");
}

json ds_stream_json(const dsum::DSStream& w) {
    json tail;
    switch (w.tail()) {
        case dsum::DSTail::Zero: tail = json{{"kind", "zero"}}; break;
        case dsum::DSTail::Constant:
            tail = json{{"kind", "constant"},
                        {"value", integer_json(w.formula_at(w.prefix_len() + 1).c)}};
            break;
        case dsum::DSTail::Table: {
            json formulas = json::array();
            for (long o = 0; o < w.period(); ++o)
                formulas.push_back(formula_json(w.formula_at(w.prefix_len() + 1 + o)));
            tail = json{{"kind", "table"}, {"formulas", formulas}};
            break;
        }
    }
    return json{{"prefix", integer_array(w.prefix())}, {"tail", tail}};
}

dsum::DSStream parse_ds_stream(const json& j) {
    std::vector<mpz_class> prefix = integer_vector(field_array(j, "prefix"));
    const json& tail = field(j, "tail");
    std::string kind = field_string(tail, "kind");
    if (kind == "zero") return dsum::DSStream::zero_tail(prefix);
    if (kind == "constant")
        return dsum::DSStream::constant_tail(prefix, parse_integer(field(tail, "value")));
    if (kind == "table") {
        std::vector<dsum::ValueFormula> formulas;
        for (const json& e : field_array(tail, "formulas")) formulas.push_back(parse_formula(e));
        return dsum::DSStream::table(prefix, formulas);
    }
    throw DomainError("config: unknown tail kind '" + kind + "'");
}

json interval_json(const CertifiedReal& c) { return json{{"lo", c.lo}, {"hi", c.hi}}; }

json certificate_json(const MetricCertificate& c) {
    return json{{"d_part", rational_str(c.d_part)},
                {"sup", interval_json(c.sup_part)},
                {"total", interval_json(c.total)},
                {"horizon", c.horizon},
                {"converged", c.converged}};
}

json membership_json(const prufer::MembershipVerdict& v) {
    json evidence = json::array();
    for (const auto& [k, gap] : v.evidence)
        evidence.push_back(json{{"k", k}, {"gap", integer_json(gap)}});
    json out{{"verdict", prufer::to_string(v.verdict)}, {"evidence", evidence}};
    if (v.witness_bound) out["witness_bound_pi"] = rational_str(*v.witness_bound);
    return out;
}

json ds_membership_json(const dsum::DSMembershipVerdict& v) {
    json evidence = json::array();
    for (const auto& [n, norm] : v.evidence)
        evidence.push_back(json{{"n", n}, {"norm", rational_str(norm)}});
    json out{{"verdict", prufer::to_string(v.verdict)}, {"evidence", evidence}};
    if (v.witness_bound) out["witness_bound"] = rational_str(*v.witness_bound);
    return out;
}

json approximation_json(const prufer::GeneratorApproximation& a) {
    return json{{"q", integer_json(a.q)}, {"certificate", certificate_json(a.cert)}};
}

json dense_json(const dsum::DenseApproximation& a) {
    return json{{"m", a.m}, {"certificate", certificate_json(a.cert)}};
}

json refutation_json(const prufer::RefutationResult& r) {
    json windows = json::array();
    for (const prufer::WindowRecord& w : r.trace.windows)
        windows.push_back(
            json{{"k", w.k}, {"band_lo", w.band_lo}, {"band_hi", w.band_hi}, {"core", w.core}});
    json out{{"status", prufer::to_string(r.status)},
             {"trace", json{{"r0", r.trace.r0},
                            {"k0", r.trace.k0},
                            {"complemented", r.trace.complemented},
                            {"picked_window", r.trace.picked_window},
                            {"picked_index", r.trace.picked_index},
                            {"windows", windows},
                            {"accumulated_exponents", r.trace.accumulated_exponents}}}};
    if (r.witness) {
        out["witness"] = json{{"q", integer_json(r.witness->q)},
                              {"item", prufer::to_string(r.witness->item)},
                              {"chord_value", rational_str(r.witness->chord_value)},
                              {"neighborhood", certificate_json(r.witness->neighborhood)}};
    }
    return out;
}

json ds_refutation_json(const dsum::DSRefutation& r) {
    json out{{"outcome", dsum::to_string(r.outcome)}};
    if (r.witness) {
        const dsum::DSWitness& w = *r.witness;
        json support = json::array();
        for (const auto& [n, v] : w.omega.support)
            support.push_back(json{{"n", n}, {"value", integer_json(v)}});
        json coords = json::array();
        for (const dsum::DSCoordinate& c : w.coords)
            coords.push_back(
                json{{"n", c.n}, {"a", integer_json(c.a)}, {"eps", interval_json(c.eps_l)}});
        out["witness"] = json{{"M", w.M},
                              {"case", dsum::to_string(w.case_tag)},
                              {"alpha", rational_str(w.alpha)},
                              {"omega", support},
                              {"coords", coords},
                              {"sum", rational_str(w.sum)},
                              {"chord_arg", rational_str(w.chord_arg)},
                              {"chord_decision", to_string(w.chord_decision)},
                              {"chord_threshold", rational_str(w.chord_threshold)},
                              {"neighborhood", certificate_json(w.neighborhood)}};
    }
    return out;
}

json report_json(const oracle::EquivalenceReport& r) {
    return json{{"suite", r.suite},
                {"cases", r.cases_run},
                {"interior_cases", r.interior_cases},
                {"mismatches", r.mismatches},
                {"pass", r.pass()}};
}

json decay_json(const oracle::DecayTable& t) {
    json rows = json::array();
    for (const oracle::DecayRow& r : t.rows)
        rows.push_back(json{{"k", r.k},
                            {"n_k", integer_json(r.n_k)},
                            {"d", integer_json(r.d)},
                            {"m", integer_json(r.m)},
                            {"gap", integer_json(r.gap)},
                            {"pairing", rational_str(r.pairing)},
                            {"chord", interval_json(r.chord)}});
    return json{{"rows", rows}};
}

std::string decay_csv(const oracle::DecayTable& t) {
    std::ostringstream out;
    out << "k,n_k,d_k,m_k,gap,pairing,chord_lo,chord_hi\n";
    for (const oracle::DecayRow& r : t.rows) {
        out << r.k << ',' << r.n_k.get_str() << ',' << r.d.get_str() << ',' << r.m.get_str()
            << ',' << r.gap.get_str() << ',' << rational_str(r.pairing) << ','
            << json(r.chord.lo).dump() << ',' << json(r.chord.hi).dump() << '\n';
    }
    return out.str();
}

}  // namespace charseq::io
