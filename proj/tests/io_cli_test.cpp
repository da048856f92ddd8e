#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "charseq/cli.hpp"
#include "charseq/json_io.hpp"
#include "charseq/oracle.hpp"
#include "charseq/svg.hpp"

using namespace charseq;
using io::json;
using prufer::PadicDigits;
using prufer::TailKind;
using prufer::TSequence;

namespace {

std::vector<mpz_class> zv(std::initializer_list<long> xs) {
    return std::vector<mpz_class>(xs.begin(), xs.end());
}

std::string write_config(const std::string& name, const json& body) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << body.dump(2) << '\n';
    return path.string();
}

json arithmetic_structure(long p) {
    return json{{"p", p},
                {"prefix", {2, 5, 9}},
                {"gap_rule", {{"kind", "arithmetic"}, {"start", 3}, {"step", 1}}}};
}

json prufer_config(const json& subject) {
    return json{{"case", "prufer"}, {"structure", arithmetic_structure(2)}, {"subject", subject}};
}

json dsum_config(const json& subject) {
    return json{
        {"case", "dsum"},
        {"structure", {{"prefix", {2}}, {"rule", {{"kind", "geometric"}, {"ratio", 2}}}}},
        {"subject", subject}};
}

json run_json(const cli::RunResult& r) { return json::parse(r.output); }

}  // namespace

TEST_CASE("rationals travel as fraction strings") {
    CHECK(io::parse_rational("3/4") == mpq_class(3, 4));
    CHECK(io::parse_rational("-2/6") == mpq_class(-1, 3));
    CHECK(io::parse_rational("5") == 5);
    CHECK(io::rational_str(mpq_class(10, 4)) == "5/2");
    CHECK(io::rational_str(UnitRational(mpq_class(7, 3))) == "1/3");

    CHECK_THROWS_AS(io::parse_rational("1/0"), DomainError);
    CHECK_THROWS_AS(io::parse_rational("1/-2"), DomainError);
    CHECK_THROWS_AS(io::parse_rational(""), DomainError);
    CHECK_THROWS_AS(io::parse_rational("x/2"), DomainError);
}

TEST_CASE("integers stay numeric until they outgrow the json range") {
    CHECK(io::integer_json(mpz_class(42)).is_number_integer());
    CHECK(io::parse_integer(io::integer_json(mpz_class(-7))) == -7);

    mpz_class big = mpz_class(1) << 80;
    json j = io::integer_json(big);
    CHECK(j.is_string());
    CHECK(io::parse_integer(j) == big);

    CHECK_THROWS_AS(io::parse_integer(json("12x")), DomainError);
    CHECK_THROWS_AS(io::parse_integer(json(1.5)), DomainError);
}

TEST_CASE("digit streams round-trip through their wire encoding") {
    PadicDigits w0(2, {1, 0, 1}, TailKind::Zero);
    PadicDigits per(3, {0, 1}, TailKind::Periodic, {1, 0, 2});
    PadicDigits mx(2, {1}, TailKind::MaxDigit);
    for (const PadicDigits& w : {w0, per, mx}) {
        json j = io::digits_json(w);
        CHECK(io::parse_digits(j) == w);
    }

    json j = io::digits_json(per);
    CHECK(j["p"] == 3);
    CHECK(j["tail"]["kind"] == "periodic");
    CHECK(j["tail"]["pattern"] == json::array({1, 0, 2}));
}

TEST_CASE("gap structures and order sequences round-trip") {
    json arith = io::tseq_json(TSequence::arithmetic(2, zv({2, 5, 9}), 3, 1));
    CHECK(io::tseq_json(io::parse_tseq(arith)) == arith);
    CHECK(arith["gap_rule"]["kind"] == "arithmetic");

    json ex = io::tseq_json(TSequence::explicit_seq(3, zv({2, 5, 9, 14})));
    CHECK(io::tseq_json(io::parse_tseq(ex)) == ex);
    CHECK(ex["gap_rule"] == json{{"kind", "explicit"}});

    for (const auto& b : {dsum::OrderSequence::explicit_seq(zv({2, 4, 9})),
                          dsum::OrderSequence::linear(zv({2}), 1),
                          dsum::OrderSequence::geometric(zv({2, 4}), 3)}) {
        json j = io::orders_json(b);
        CHECK(io::orders_json(io::parse_orders(j)) == j);
    }
}

TEST_CASE("coordinate streams round-trip with formula tables") {
    dsum::DSStream plain = dsum::DSStream::zero_tail(zv({1, 0, 2}));
    dsum::DSStream ones = dsum::DSStream::constant_tail({}, 1);
    dsum::DSStream mixed = dsum::DSStream::table(
        zv({0, 0}), {dsum::ValueFormula::floor_ratio(1, 2), dsum::ValueFormula::order_minus(1),
                     dsum::ValueFormula::constant(3)});
    for (const auto& w : {plain, ones, mixed}) {
        json j = io::ds_stream_json(w);
        CHECK(io::ds_stream_json(io::parse_ds_stream(j)) == j);
    }

    json j = io::ds_stream_json(mixed);
    REQUIRE(j["tail"]["kind"] == "table");
    REQUIRE(j["tail"]["formulas"].size() == 3);
    CHECK(j["tail"]["formulas"][0] == json{{"kind", "floor-ratio"}, {"num", 1}, {"den", 2}});
    CHECK(j["tail"]["formulas"][1] == json{{"kind", "order-minus"}, {"offset", 1}});
}

TEST_CASE("malformed wire data is rejected by field name") {
    CHECK_THROWS_WITH_AS(io::parse_digits(json{{"prefix", json::array()}}),
                         "config: missing field 'p'", DomainError);
    CHECK_THROWS_AS(io::parse_digits(json{{"p", 2}, {"prefix", {1}}, {"tail", {{"kind", "x"}}}}),
                    DomainError);
    CHECK_THROWS_AS(io::parse_digits(json{{"p", "2"}, {"prefix", {1}}, {"tail", {{"kind", "zero"}}}}),
                    DomainError);
    CHECK_THROWS_AS(io::parse_tseq(json{{"p", 2}, {"prefix", {2}}, {"gap_rule", {{"kind", "?"}}}}),
                    DomainError);
    CHECK_THROWS_AS(io::parse_orders(json{{"prefix", {2}}, {"rule", {{"kind", "cubic"}}}}),
                    DomainError);
    CHECK_THROWS_AS(
        io::parse_ds_stream(json{{"prefix", {1.5}}, {"tail", {{"kind", "zero"}}}}),
        DomainError);
}

TEST_CASE("decay tables export csv with a fixed column order") {
    PadicDigits w(2, {1, 0, 1, 0, 0, 0}, TailKind::Zero);
    oracle::DecayTable t = oracle::decay_table(w, TSequence::arithmetic(2, zv({2, 5, 9}), 3, 1), 5);

    std::string csv = io::decay_csv(t);
    auto eol = csv.find('\n');
    CHECK(csv.substr(0, eol) == "k,n_k,d_k,m_k,gap,pairing,chord_lo,chord_hi");
    CHECK(csv.substr(eol + 1, 12) == "2,5,2,2,3,5/");
    CHECK(csv.back() == '\n');

    json j = io::decay_json(t);
    REQUIRE(j["rows"].size() == 4);
    CHECK(j["rows"][0]["pairing"] == "5/64");
}

TEST_CASE("charts are deterministic byte for byte") {
    PadicDigits w(2, {1, 0, 1}, TailKind::Zero);
    oracle::DecayTable t = oracle::decay_table(w, TSequence::arithmetic(2, zv({2, 5, 9}), 3, 1), 8);

    std::string a = io::decay_chart_svg(t);
    std::string b = io::decay_chart_svg(t);
    CHECK(a == b);
    CHECK(a.substr(0, 4) == "<svg");
    CHECK(a.find("polyline") != std::string::npos);

    CHECK_THROWS_AS(io::decay_chart_svg(oracle::DecayTable{}), DomainError);
}

TEST_CASE("seeded coordinate streams are reproducible and valid") {
    dsum::OrderSequence orders = dsum::OrderSequence::geometric(zv({2}), 2);
    oracle::DSStreamSpec spec;
    spec.tail = dsum::DSTail::Table;

    json first = io::ds_stream_json(oracle::seeded_stream(11, spec, orders));
    CHECK(io::ds_stream_json(oracle::seeded_stream(11, spec, orders)) == first);

    int distinct = 0;
    for (unsigned long long s = 1; s <= 6; ++s) {
        dsum::DSStream w = oracle::seeded_stream(s, spec, orders);
        if (io::ds_stream_json(w) != first) ++distinct;
        for (long n = 1; n <= 12; ++n) w.value(n, orders);  // throws if out of range
    }
    CHECK(distinct >= 2);
}

TEST_CASE("membership commands report verdicts and evidence") {
    std::string member = write_config(
        "cq_member.json",
        prufer_config(json{{"p", 2}, {"prefix", {1, 0, 1}}, {"tail", {{"kind", "zero"}}}}));
    cli::RunResult r = cli::run({"prufer", "member", "-c", member, "-K", "6"});
    REQUIRE(r.exit_code == 0);
    json out = run_json(r);
    CHECK(out["verdict"] == "Member");
    REQUIRE(!out["evidence"].empty());
    CHECK(out["evidence"][0]["gap"] == 3);

    std::string non = write_config(
        "cq_nonmember.json",
        prufer_config(
            json{{"p", 2}, {"prefix", json::array()},
                 {"tail", {{"kind", "periodic"}, {"pattern", {1, 0}}}}}));
    r = cli::run({"prufer", "member", "-c", non});
    REQUIRE(r.exit_code == 0);
    out = run_json(r);
    CHECK(out["verdict"] == "NonMember");
    CHECK(out["witness_bound_pi"] == "1/4");

    json excfg = prufer_config(
        json{{"p", 2}, {"prefix", json::array()},
             {"tail", {{"kind", "periodic"}, {"pattern", {1, 0}}}}});
    excfg["structure"] = json{{"p", 2}, {"prefix", {2, 5, 9}}, {"gap_rule", {{"kind", "explicit"}}}};
    r = cli::run({"prufer", "member", "-c", write_config("cq_inconclusive.json", excfg)});
    CHECK(r.exit_code == 2);
    CHECK(run_json(r)["verdict"] == "Inconclusive");

    std::string ds_member = write_config(
        "cq_ds_member.json",
        dsum_config(json{{"prefix", json::array()}, {"tail", {{"kind", "constant"}, {"value", 1}}}}));
    r = cli::run({"dsum", "member", "-c", ds_member, "-K", "5"});
    REQUIRE(r.exit_code == 0);
    out = run_json(r);
    CHECK(out["verdict"] == "Member");
    CHECK(out["evidence"].size() == 5);

    std::string ds_non = write_config(
        "cq_ds_nonmember.json",
        dsum_config(json{
            {"prefix", json::array()},
            {"tail",
             {{"kind", "table"},
              {"formulas", json::array({json{{"kind", "floor-ratio"}, {"num", 1}, {"den", 2}}})}}}}));
    r = cli::run({"dsum", "member", "-c", ds_non});
    REQUIRE(r.exit_code == 0);
    out = run_json(r);
    CHECK(out["verdict"] == "NonMember");
    CHECK(out["witness_bound"] == "1/2");
}

TEST_CASE("refute commands distinguish the three endings") {
    cli::RunResult r = cli::run({"prufer", "refute", "--alpha", "1/4", "--p", "2"});
    CHECK(r.exit_code == 1);
    CHECK(run_json(r)["status"] == "not-refutable");

    r = cli::run({"prufer", "refute", "--alpha", "1/3", "--p", "2"});
    REQUIRE(r.exit_code == 0);
    json out = run_json(r);
    CHECK(out["status"] == "found");
    CHECK(out["trace"]["r0"] == 7);
    CHECK(out["witness"].contains("q"));
    CHECK(out["witness"].contains("neighborhood"));

    std::string mixed = write_config(
        "cq_ds_mixed.json",
        dsum_config(json{{"prefix", json::array()},
                         {"tail",
                          {{"kind", "table"},
                           {"formulas", json::array({json{{"kind", "const"}, {"value", 1}},
                                                     json{{"kind", "order-minus"}, {"offset", 1}}})}}}}));
    r = cli::run({"dsum", "refute", "-c", mixed});
    CHECK(r.exit_code == 2);
    out = run_json(r);
    CHECK(out["outcome"] == "inconclusive");
    CHECK(out["lambda"]["kind"] == "inconclusive");

    json subcfg = json::parse(std::ifstream(mixed), nullptr, true);
    subcfg["params"] = json{{"subseq", {{"start", 1}, {"stride", 2}}}};
    r = cli::run({"dsum", "refute", "-c", write_config("cq_ds_subseq.json", subcfg)});
    REQUIRE(r.exit_code == 0);
    out = run_json(r);
    CHECK(out["outcome"] == "found");
    CHECK(out["witness"]["case"] == "lambda-zero");
    CHECK(out["witness"]["coords"][0]["n"] == 17);

    std::string finite = write_config(
        "cq_ds_finite.json",
        dsum_config(json{{"prefix", {1, 1}}, {"tail", {{"kind", "zero"}}}}));
    r = cli::run({"dsum", "refute", "-c", finite});
    REQUIRE(r.exit_code == 0);
    out = run_json(r);
    CHECK(out["outcome"] == "continuous");
    CHECK(out["lambda"]["kind"] == "finite-support");
}

TEST_CASE("approximation commands certify the requested tolerance") {
    std::string member = write_config(
        "cq_approx.json",
        prufer_config(json{{"p", 2}, {"prefix", {1, 0, 1}}, {"tail", {{"kind", "zero"}}}}));
    cli::RunResult r = cli::run({"prufer", "approx", "-c", member, "--eps", "1/100"});
    REQUIRE(r.exit_code == 0);
    json out = run_json(r);
    CHECK(out.contains("q"));
    CHECK(out["certificate"]["total"]["hi"].get<double>() < 0.01);

    std::string ds = write_config(
        "cq_ds_approx.json",
        dsum_config(json{{"prefix", json::array()}, {"tail", {{"kind", "constant"}, {"value", 1}}}}));
    r = cli::run({"dsum", "approx", "-c", ds, "--eps", "1/10"});
    REQUIRE(r.exit_code == 0);
    out = run_json(r);
    CHECK(out["m"] == 10);  // first doubling order past 200/pi
    CHECK(out["certificate"]["total"]["hi"].get<double>() < 0.1);

    CHECK(cli::run({"prufer", "approx", "-c", member}).exit_code == 1);
}

TEST_CASE("verify runs named suites and honors the case cap") {
    cli::RunResult r = cli::run({"verify", "--suite", "arg-equivalence", "--p", "2"});
    REQUIRE(r.exit_code == 0);
    json out = run_json(r);
    REQUIRE(out.is_array());
    CHECK(out[0]["pass"] == true);
    CHECK(out[0]["cases"] == 64);

    setenv("CHARSEQ_MAX_CASES", "16", 1);
    r = cli::run({"verify", "--suite", "arg-equivalence", "--p", "2"});
    unsetenv("CHARSEQ_MAX_CASES");
    REQUIRE(r.exit_code == 0);
    CHECK(run_json(r)[0]["cases"] == 16);

    CHECK(cli::run({"verify", "--suite", "no-such-suite"}).exit_code == 1);
}

TEST_CASE("table writes csv and svg artifacts deterministically") {
    std::string cfg = write_config(
        "cq_table.json",
        prufer_config(json{{"p", 2}, {"prefix", {1, 0, 1}}, {"tail", {{"kind", "zero"}}}}));
    auto csv = std::filesystem::temp_directory_path() / "cq_table.csv";
    auto svg = std::filesystem::temp_directory_path() / "cq_table.svg";

    cli::RunResult r = cli::run(
        {"table", "-c", cfg, "-K", "6", "--csv", csv.string(), "--svg", svg.string()});
    REQUIRE(r.exit_code == 0);
    json out = run_json(r);
    REQUIRE(out["rows"].size() == 5);
    CHECK(out["rows"][0]["k"] == 2);
    CHECK(out["rows"][4]["k"] == 6);

    CHECK(std::filesystem::file_size(csv) > 0);
    CHECK(std::filesystem::file_size(svg) > 0);

    cli::RunResult again = cli::run(
        {"table", "-c", cfg, "-K", "6", "--csv", csv.string(), "--svg", svg.string()});
    CHECK(again.output == r.output);
}

TEST_CASE("bad invocations exit with an error payload") {
    cli::RunResult r = cli::run({"prufer", "member", "-c", "/nonexistent/cfg.json"});
    CHECK(r.exit_code == 1);
    CHECK(run_json(r).contains("error"));

    CHECK(cli::run({"frobnicate"}).exit_code == 1);
    CHECK(cli::run({}).exit_code == 1);

    std::string ds = write_config(
        "cq_case_mismatch.json",
        dsum_config(json{{"prefix", json::array()}, {"tail", {{"kind", "constant"}, {"value", 1}}}}));
    r = cli::run({"prufer", "member", "-c", ds});
    CHECK(r.exit_code == 1);
    CHECK(run_json(r)["error"].get<std::string>().find("case") != std::string::npos);

    std::string member = write_config(
        "cq_badk.json",
        prufer_config(json{{"p", 2}, {"prefix", {1, 0, 1}}, {"tail", {{"kind", "zero"}}}}));
    CHECK(cli::run({"prufer", "member", "-c", member, "-K", "1"}).exit_code == 1);
}

TEST_CASE("help requests are not errors") {
    cli::RunResult r = cli::run({"--help"});
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("prufer") != std::string::npos);
    CHECK(r.output.find("dsum") != std::string::npos);
}
