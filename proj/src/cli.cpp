#include "charseq/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "charseq/dsum.hpp"
#include "charseq/error.hpp"
#include "charseq/json_io.hpp"
#include "charseq/metric.hpp"
#include "charseq/oracle.hpp"
#include "charseq/refute.hpp"
#include "charseq/svg.hpp"

namespace charseq::cli {

namespace {

using io::json;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kUndecided = 2;

struct Options {
    std::string config_path;
    std::string csv_path;
    std::string svg_path;
    std::string suite;
    std::string eps, delta, tol, alpha;  // empty = not given
    long K = -1;
    long M = -1;
    long p = 0;
    long long seed = -1;
};

void attach_common(CLI::App* sub, Options& opt) {
    sub->add_option("-c,--config", opt.config_path, "Experiment config (JSON)");
    sub->add_option("-K", opt.K, "Index horizon");
    sub->add_option("--eps", opt.eps, "Accuracy target, rational \"p/q\"");
    sub->add_option("--delta", opt.delta, "Neighborhood radius, rational \"p/q\"");
    sub->add_option("--M", opt.M, "Separation parameter, integer > 10");
    sub->add_option("--tol", opt.tol, "Certificate tolerance, rational \"p/q\"");
    sub->add_option("--alpha", opt.alpha, "Circle point, rational \"p/q\"");
    sub->add_option("--p", opt.p, "Prime base");
    sub->add_option("--seed", opt.seed, "Deterministic corpus seed");
    sub->add_option("--csv", opt.csv_path, "Write table CSV here");
    sub->add_option("--svg", opt.svg_path, "Write decay chart here");
}

// Parameters resolved from the config file's "params" object, overridden by
// command-line flags.
struct Params {
    std::optional<mpq_class> eps, delta, tol, alpha;
    std::optional<long> K, M;
    std::optional<unsigned long long> seed;
    std::optional<dsum::IndexRule> subseq;
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) throw DomainError("config: cannot read '" + path + "'");
    json j = json::parse(f, nullptr, false);
    if (j.is_discarded()) throw DomainError("config: '" + path + "' is not valid JSON");
    if (!j.is_object()) throw DomainError("config: top level must be an object");
    return j;
}

Params resolve_params(const json& cfg, const Options& opt) {
    Params p;
    if (cfg.contains("params")) {
        const json& pj = cfg.at("params");
        if (!pj.is_object()) throw DomainError("config: 'params' must be an object");
        auto rat = [&](const char* key) -> std::optional<mpq_class> {
            if (!pj.contains(key)) return std::nullopt;
            const json& v = pj.at(key);
            if (v.is_string()) return io::parse_rational(v.get<std::string>());
            if (v.is_number_integer()) return mpq_class(v.get<long>());
            throw DomainError(std::string("config: param '") + key + "' must be \"p/q\"");
        };
        auto integer = [&](const char* key) -> std::optional<long> {
            if (!pj.contains(key)) return std::nullopt;
            const json& v = pj.at(key);
            if (!v.is_number_integer())
                throw DomainError(std::string("config: param '") + key + "' must be an integer");
            return v.get<long>();
        };
        p.eps = rat("eps");
        p.delta = rat("delta");
        p.tol = rat("tol");
        p.alpha = rat("alpha");
        p.K = integer("K");
        p.M = integer("M");
        if (auto s = integer("seed")) p.seed = static_cast<unsigned long long>(*s);
        if (pj.contains("subseq")) {
            const json& sj = pj.at("subseq");
            dsum::IndexRule r;
            if (sj.contains("start")) r.start = sj.at("start").get<long>();
            if (sj.contains("stride")) r.stride = sj.at("stride").get<long>();
            p.subseq = r;
        }
    }
    if (!opt.eps.empty()) p.eps = io::parse_rational(opt.eps);
    if (!opt.delta.empty()) p.delta = io::parse_rational(opt.delta);
    if (!opt.tol.empty()) p.tol = io::parse_rational(opt.tol);
    if (!opt.alpha.empty()) p.alpha = io::parse_rational(opt.alpha);
    if (opt.K >= 0) p.K = opt.K;
    if (opt.M >= 0) p.M = opt.M;
    if (opt.seed >= 0) p.seed = static_cast<unsigned long long>(opt.seed);
    return p;
}

mpq_class require_rational(const std::optional<mpq_class>& v, const char* name) {
    if (!v) throw DomainError(std::string("config: parameter '") + name + "' is required");
    return *v;
}

void expect_case(const json& cfg, const char* want) {
    if (!cfg.contains("case")) throw DomainError("config: missing field 'case'");
    std::string got = cfg.at("case").get<std::string>();
    if (got != want)
        throw DomainError(std::string("config: case '") + got + "' does not match the '" +
                          want + "' subcommand");
}

prufer::TSequence structure_tseq(const json& cfg, const Options& opt) {
    if (cfg.contains("structure")) {
        expect_case(cfg, "prufer");
        prufer::TSequence t = io::parse_tseq(cfg.at("structure"));
        if (opt.p != 0 && opt.p != t.p())
            throw DomainError("config: --p disagrees with the configured structure");
        return t;
    }
    // Default laboratory structure: indices 2, 5, 9 continued arithmetically.
    long p = opt.p != 0 ? opt.p : 2;
    return prufer::TSequence::arithmetic(p, {2, 5, 9}, 3, 1);
}

prufer::PadicDigits subject_digits(const json& cfg) {
    expect_case(cfg, "prufer");
    if (!cfg.contains("subject")) throw DomainError("config: missing field 'subject'");
    return io::parse_digits(cfg.at("subject"));
}

dsum::OrderSequence structure_orders(const json& cfg) {
    expect_case(cfg, "dsum");
    if (!cfg.contains("structure")) throw DomainError("config: missing field 'structure'");
    return io::parse_orders(cfg.at("structure"));
}

dsum::DSStream subject_ds(const json& cfg) {
    expect_case(cfg, "dsum");
    if (!cfg.contains("subject")) throw DomainError("config: missing field 'subject'");
    return io::parse_ds_stream(cfg.at("subject"));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- leaf handlers ------------------------------------------------------

RunResult run_prufer_pair(const Options& opt) {
    json cfg = load_config(opt.config_path);
    Params params = resolve_params(cfg, opt);
    prufer::TSequence t = structure_tseq(cfg, opt);
    prufer::PadicDigits w = subject_digits(cfg);
    long k = params.K.value_or(2);
    prufer::RunAnalysis ra = prufer::run_analysis(w, t, k);
    UnitRational value = prufer::pair(prufer::u_element(t, k), w);
    if (value != prufer::arg_reduced(w, t, k))
        throw std::logic_error("pair: closed form disagrees with the direct sum");
    json out{{"k", k},
             {"pairing", io::rational_str(value)},
             {"chord", io::interval_json(chord_length(value))},
             {"run", json{{"d", io::integer_json(ra.d)},
                          {"m", io::integer_json(ra.m)},
                          {"gap", io::integer_json(ra.gap)},
                          {"case", prufer::to_string(ra.tag)}}}};
    return {kOk, dump(out)};
}

RunResult run_prufer_member(const Options& opt) {
    json cfg = load_config(opt.config_path);
    Params params = resolve_params(cfg, opt);
    prufer::TSequence t = structure_tseq(cfg, opt);
    prufer::PadicDigits w = subject_digits(cfg);
    prufer::MembershipVerdict v = prufer::classify_membership(w, t, params.K.value_or(32));
    int code = v.verdict == prufer::Membership::Inconclusive ? kUndecided : kOk;
    return {code, dump(io::membership_json(v))};
}

RunResult run_prufer_approx(const Options& opt) {
    json cfg = load_config(opt.config_path);
    Params params = resolve_params(cfg, opt);
    prufer::TSequence t = structure_tseq(cfg, opt);
    prufer::PadicDigits w = subject_digits(cfg);
    mpq_class eps = require_rational(params.eps, "eps");
    prufer::GeneratorApproximation a = prufer::approximate_by_generator(w, t, eps);
    return {kOk, dump(io::approximation_json(a))};
}

RunResult run_prufer_refute(const Options& opt) {
    json cfg = load_config(opt.config_path);
    Params params = resolve_params(cfg, opt);
    prufer::TSequence t = structure_tseq(cfg, opt);
    if (!params.alpha && cfg.contains("subject") && cfg.at("subject").is_string())
        params.alpha = io::parse_rational(cfg.at("subject").get<std::string>());
    UnitRational alpha(require_rational(params.alpha, "alpha"));
    mpq_class eps = params.eps.value_or(mpq_class(1, 100));
    mpq_class delta = params.delta.value_or(mpq_class(1, 10));
    prufer::RefutationResult r = prufer::refute_character(alpha, t, eps, delta);
    int code = kOk;
    if (r.status == prufer::RefuteStatus::NotRefutable) code = kError;
    if (r.status == prufer::RefuteStatus::SearchExhausted) code = kUndecided;
    return {code, dump(io::refutation_json(r))};
}

RunResult run_dsum_member(const Options& opt) {
    json cfg = load_config(opt.config_path);
    Params params = resolve_params(cfg, opt);
    dsum::OrderSequence orders = structure_orders(cfg);
    dsum::DSStream w = subject_ds(cfg);
    dsum::DSMembershipVerdict v = dsum::membership_ds(w, orders, params.K.value_or(32));
    int code = v.verdict == prufer::Membership::Inconclusive ? kUndecided : kOk;
    return {code, dump(io::ds_membership_json(v))};
}

RunResult run_dsum_approx(const Options& opt) {
    json cfg = load_config(opt.config_path);
    Params params = resolve_params(cfg, opt);
    dsum::OrderSequence orders = structure_orders(cfg);
    dsum::DSStream w = subject_ds(cfg);
    mpq_class eps = require_rational(params.eps, "eps");
    dsum::DenseApproximation a = dsum::approximate_dense(w, orders, eps);
    return {kOk, dump(io::dense_json(a))};
}

RunResult run_dsum_refute(const Options& opt) {
    json cfg = load_config(opt.config_path);
    Params params = resolve_params(cfg, opt);
    dsum::OrderSequence orders = structure_orders(cfg);
    dsum::DSStream chi = subject_ds(cfg);
    long M = params.M.value_or(11);
    mpq_class eps = params.eps.value_or(mpq_class(1, 200));

    dsum::LambdaClass cls = dsum::classify_lambda(chi, orders, params.subseq);
    json lambda{{"kind", dsum::to_string(cls.kind)},
                {"limit", io::rational_str(cls.limit)},
                {"alpha", io::rational_str(cls.alpha)}};
    if (cls.kind == dsum::LambdaKind::Inconclusive) {
        json out{{"outcome", "inconclusive"}, {"lambda", lambda}};
        return {kUndecided, dump(out)};
    }
    dsum::DSRefutation r = dsum::refute_ds_character(chi, orders, M, eps, params.subseq);
    json out = io::ds_refutation_json(r);
    out["lambda"] = lambda;
    return {kOk, dump(out)};
}

RunResult run_verify(const Options& opt) {
    std::vector<long> primes = opt.p != 0 ? std::vector<long>{opt.p} : std::vector<long>{2, 3};
    unsigned long long seed = opt.seed >= 0 ? static_cast<unsigned long long>(opt.seed) : 1;

    std::vector<oracle::EquivalenceReport> reports;
    for (long p : primes) {
        if (opt.suite.empty() || opt.suite == "arg-equivalence")
            reports.push_back(oracle::exhaustive_arg_check(p, {2, 5}, 6));
        if (opt.suite.empty() || opt.suite == "pairing-random") {
            oracle::EquivalenceReport rep;
            {
                std::ostringstream os;
                os << "pairing-random p=" << p << " seed=" << seed;
                rep.suite = os.str();
            }
            prufer::TSequence t = prufer::TSequence::arithmetic(p, {2, 5, 9}, 3, 1);
            for (unsigned long long i = 0; i < 500; ++i) {
                oracle::StreamSpec spec;
                spec.p = p;
                spec.tail = i % 3 == 0   ? prufer::TailKind::Zero
                            : i % 3 == 1 ? prufer::TailKind::MaxDigit
                                         : prufer::TailKind::Periodic;
                prufer::PadicDigits w = oracle::seeded_stream(seed + i, spec);
                for (long k = 2; k <= 5; ++k) {
                    prufer::PruferElement u = prufer::u_element(t, k);
                    ++rep.cases_run;
                    if (prufer::pair(u, w) != oracle::pair_bruteforce(u, w)) {
                        std::ostringstream os;
                        os << "seed=" << seed + i << " k=" << k;
                        rep.mismatches.push_back(os.str());
                    }
                }
            }
            reports.push_back(std::move(rep));
        }
    }
    if (reports.empty())
        throw DomainError("verify: unknown suite '" + opt.suite +
                          "' (expected arg-equivalence or pairing-random)");
    std::sort(reports.begin(), reports.end(),
              [](const auto& a, const auto& b) { return a.suite < b.suite; });
    json out = json::array();
    bool all_pass = true;
    for (const oracle::EquivalenceReport& r : reports) {
        out.push_back(io::report_json(r));
        all_pass = all_pass && r.pass();
    }
    return {all_pass ? kOk : kError, dump(out)};
}

RunResult run_table(const Options& opt) {
    json cfg = load_config(opt.config_path);
    Params params = resolve_params(cfg, opt);
    prufer::TSequence t = structure_tseq(cfg, opt);
    prufer::PadicDigits w = subject_digits(cfg);
    oracle::DecayTable table = oracle::decay_table(w, t, params.K.value_or(12));
    if (!opt.csv_path.empty()) write_file(opt.csv_path, io::decay_csv(table));
    if (!opt.svg_path.empty()) io::emit_chart(table, opt.svg_path);
    return {kOk, dump(io::decay_json(table))};
}

}  // namespace

RunResult run(const std::vector<std::string>& args) {
    CLI::App app{"Exact experiments with characterized subgroups of compact groups"};
    app.name("charseq");
    Options opt;

    CLI::App* prufer_cmd = app.add_subcommand("prufer", "Digit-stream subgroup operations");
    CLI::App* pp = prufer_cmd->add_subcommand("pair", "Evaluate one character pairing");
    CLI::App* pm = prufer_cmd->add_subcommand("member", "Decide subgroup membership");
    CLI::App* pa = prufer_cmd->add_subcommand("approx", "Approximate by a generator power");
    CLI::App* pr = prufer_cmd->add_subcommand("refute", "Refute continuity at a circle point");
    CLI::App* dsum_cmd = app.add_subcommand("dsum", "Direct-sum subgroup operations");
    CLI::App* dm = dsum_cmd->add_subcommand("member", "Decide subgroup membership");
    CLI::App* da = dsum_cmd->add_subcommand("approx", "Approximate by a finite-support element");
    CLI::App* dr = dsum_cmd->add_subcommand("refute", "Refute continuity of a character");
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run oracle equivalence suites");
    CLI::App* table_cmd = app.add_subcommand("table", "Tabulate pairing decay");

    for (CLI::App* leaf : {pp, pm, pa, pr, dm, da, dr, verify_cmd, table_cmd})
        attach_common(leaf, opt);
    verify_cmd->add_option("--suite", opt.suite, "Suite name filter");
    app.require_subcommand(1);
    prufer_cmd->require_subcommand(1);
    dsum_cmd->require_subcommand(1);

    std::vector<const char*> argv;
    argv.push_back("charseq");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        return {kOk, app.help()};
    } catch (const CLI::ParseError& e) {
        json out{{"error", e.what()}};
        return {kError, dump(out)};
    }

    try {
        if (pp->parsed()) return run_prufer_pair(opt);
        if (pm->parsed()) return run_prufer_member(opt);
        if (pa->parsed()) return run_prufer_approx(opt);
        if (pr->parsed()) return run_prufer_refute(opt);
        if (dm->parsed()) return run_dsum_member(opt);
        if (da->parsed()) return run_dsum_approx(opt);
        if (dr->parsed()) return run_dsum_refute(opt);
        if (verify_cmd->parsed()) return run_verify(opt);
        if (table_cmd->parsed()) return run_table(opt);
        throw DomainError("no subcommand selected");
    } catch (const std::exception& e) {
        json out{{"error", e.what()}};
        return {kError, dump(out)};
    }
}

}  // namespace charseq::cli
