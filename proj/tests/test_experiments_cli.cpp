// Composite experiments, report serialization and the command-line front end.
#include "oracles.hpp"
#include "waring4/cli.hpp"
#include "waring4/experiments.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace waring4;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

Json parse(const std::string& s) { return Json::parse(s); }

std::filesystem::path temp_file(const std::string& name, const std::string& content = "") {
    const auto dir = std::filesystem::temp_directory_path() / "waring4_tests";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    if (!content.empty()) std::ofstream(p) << content;
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Parameters tiny(double p1, double p2, double p3, double p4, double y) {
    return Parameters::make(p1, p2, p3, p4, y, RangeCheck::skip);
}

}  // namespace

// ---------------------------------------------------------------------------
// Reports

TEST(Report, HeaderAndCsv) {
    const Json h = report_header("gaps", 1, Json{{"limit", "100"}});
    EXPECT_EQ(h["schema"], "waring4.gaps/1");
    EXPECT_EQ(h["version"], kVersion);
    EXPECT_EQ(h.begin().key(), "schema");
    Table t{{"a", "b", "c"}, {Json{{"a", 1}, {"b", "x,y"}, {"c", true}}, Json{{"a", nullptr}, {"b", "say \"hi\""}}}};
    std::ostringstream os;
    write_csv(os, t);
    EXPECT_EQ(os.str(), "a,b,c\n1,\"x,y\",true\n,\"say \"\"hi\"\"\",\n");
    EXPECT_EQ(u128_json(kU128Max), "340282366920938463463374607431768211455");
}

TEST(Report, ExperimentEnvelopeSortsRecords) {
    ExperimentReport r;
    r.id = "demo";
    r.key = {"k", "i"};
    r.records.columns = {"k", "i"};
    r.records.rows = {Json{{"k", "b"}, {"i", 2}}, Json{{"k", "a"}, {"i", 9}}, Json{{"k", "b"}, {"i", 1}}};
    r.sort_records();
    EXPECT_EQ(r.records.rows[0]["k"], "a");
    EXPECT_EQ(r.records.rows[1]["i"], 1);
    const Json j = r.to_json();
    EXPECT_EQ(j["schema"], "waring4.experiment/1");
    EXPECT_EQ(j["experiment"], "demo");
    EXPECT_TRUE(j["seed"].is_null());
    EXPECT_EQ(j["records"].size(), 3u);
}

// ---------------------------------------------------------------------------
// Experiments

TEST(Experiments, ExpectedRR) {
    const Parameters P = Parameters::make(16, 8, 5, 4, 2);
    EXPECT_DOUBLE_EQ(expected_RR(65536, P), 2.0 * 8 * 5 * 4 / 32 * std::pow(65536.0, -0.75));
    EXPECT_DOUBLE_EQ(expected_RR_normalized(65536, P),
                     expected_RR(65536, P) * std::pow(65536.0, gamma0().to_double()) / 2);
    EXPECT_THROW(expected_RR(0, P), std::invalid_argument);
}

TEST(Experiments, MeanSquarePointMatchesDirectSum) {
    const Parameters P = choose_parameters(4096, ExactRational(13, 50));
    const MeanSquarePoint m = mean_square_point(P, 0.05, Exec{2});
    EXPECT_TRUE(m.identity());
    long double D = 0;
    const long double c = static_cast<long double>(P.Y()) * P.P(2) * P.P(3) * P.P(4) / 32;
    for (std::int64_t n = 2049; n <= 4096; ++n) {
        const long double d = static_cast<long double>(direct_R(n, P)) - c * std::pow(static_cast<long double>(n), -0.75L);
        D += d * d;
    }
    EXPECT_NEAR(m.D, static_cast<double>(D), 1e-9 * static_cast<double>(D));
    EXPECT_NEAR(m.ratio, static_cast<double>(D) / (P.Y() * std::pow(4096.0, 1 - gamma0().to_double())), 1e-9);
}

TEST(Experiments, MeanSquareLadder) {
    MeanSquareConfig c;
    c.ladder = {4096, 65536};
    const ExperimentReport r = mean_square_experiment(c);
    EXPECT_TRUE(r.pass) << r.to_json().dump(2);
    EXPECT_EQ(r.records.rows.size(), 2u);
    c.envelope = 1e-9;  // an impossible envelope must fail
    EXPECT_FALSE(mean_square_experiment(c).pass);
}

TEST(Experiments, S4MatchesBruteForce) {
    for (double P4 : {4.0, 8.0, 11.0})
        for (double Y : {1.0, 2.0, 32.0, 300.0, 1000.0}) {
            S4Config c{P4, Y};
            const ExperimentReport r = s4_diagonal_experiment(c);
            long long brute = 0;
            const auto xs = oracle::xs(P4);
            const auto ys = oracle::ys(Y);
            for (long long x : xs)
                for (long long xp : xs)
                    for (long long y : ys)
                        for (long long yp : ys)
                            if (oracle::p4(x) + y == oracle::p4(xp) + yp) ++brute;
            EXPECT_EQ(r.summary["count"], std::to_string(brute)) << P4 << " " << Y;
            EXPECT_TRUE(r.pass);
            if (Y <= P4 * P4 * P4 / 2) {
                EXPECT_TRUE(r.summary["diagonal_only"].get<bool>());
            }
        }
}

TEST(Experiments, InductionChainTiny) {
    for (const Parameters& P : {tiny(6, 5, 4, 3.5, 3), tiny(10, 8, 7, 6, 4), Parameters::make(16, 8, 5, 4, 2)}) {
        const ExperimentReport r = induction_chain(P);
        EXPECT_TRUE(r.pass) << r.to_json().dump(2);
        EXPECT_EQ(r.records.rows.size(), 4u);
        EXPECT_EQ(r.records.rows[0]["j"], 1);
    }
}

TEST(Experiments, BesselDefault) {
    const ExperimentReport r = bessel_experiment(choose_parameters(4096, ExactRational(13, 50)));
    EXPECT_TRUE(r.pass) << r.summary.dump();
    EXPECT_LE(r.summary["sum_R1_abs2"].get<double>(), r.summary["S1"].get<double>() * (1 + 1e-9));
}

TEST(Experiments, LemmaSuiteSmall) {
    LemmaConfig c;
    c.density = 500;
    c.g_Y = {1, 7.5, 64};
    c.fnu_X = {8, 16};
    c.fnu_levels = {64, 128};
    c.decay_X = {8};
    c.decay_points = 64;
    c.l2_X = {8, 16};
    c.short_X = {8, 16};
    c.h_X = {16};
    const ExperimentReport r = lemma_bound_suite(choose_parameters(65536, ExactRational(13, 50)), c);
    EXPECT_TRUE(r.pass) << r.summary.dump(2);
    std::set<std::string> names;
    for (const auto& [name, item] : r.summary["items"].items()) names.insert(name);
    for (const char* want : {"g", "f0", "f_minus_nu", "nu_decay", "nu_integrals", "short_f", "short_h", "weyl_h"})
        EXPECT_TRUE(names.count(want)) << want;
    // a vanishing envelope turns a real bound into a failure
    c.envelopes.g = 1e-6;
    EXPECT_FALSE(lemma_bound_suite(choose_parameters(65536, ExactRational(13, 50)), c).pass);
}

// ---------------------------------------------------------------------------
// Command line

TEST(Cli, UsageErrorsExitTwo) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {},
             {"frobnicate"},
             {"kprime", "--n", "abc"},
             {"gamma0", "--h", "1/0"},
             {"weyl-eval", "--sum", "f", "--alpha", "1/0", "--x", "8"},
             {"--threads", "0", "gamma0"},
             {"kprime", "--bogus", "1"},
             {"experiment"},
             {"integrate", "--which", "R", "--rel-tol", "x"}}) {
        const CliRun r = run(args);
        EXPECT_EQ(r.code, 2) << (args.empty() ? "" : args[0]);
        if (!r.err.empty()) {
            const Json e = parse(r.err);
            EXPECT_EQ(e["error"]["kind"], "usage");
            EXPECT_TRUE(e["error"]["message"].is_string());
        }
        EXPECT_TRUE(r.out.empty());
    }
}

TEST(Cli, PreconditionAndBudgetExitOne) {
    CliRun r = run({"kprime", "--n", "7"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(parse(r.err)["error"]["kind"], "precondition");
    r = run({"gamma0", "--k", "2"});
    EXPECT_EQ(r.code, 1);
    r = run({"gaps", "--limit", "100000", "--max-bitmap-bits", "4096", "--window-bits", "8192"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(parse(r.err)["error"]["kind"], "budget");
    r = run({"integrate", "--P", "8,6,5,4", "--Y", "2", "--no-range-check", "--which", "S", "--max-grid", "64"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(parse(r.err)["error"]["kind"], "budget");
    r = run({"params", "--P", "16,4,4,4", "--Y", "2"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, HelpAndVersion) {
    CliRun r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("kprime"), std::string::npos);
    r = run({"--version"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, std::string(kVersion) + "\n");
}

TEST(Cli, Values) {
    EXPECT_EQ(parse(run({"gamma0"}).out)["gamma0"], "4059/16384");
    EXPECT_EQ(parse(run({"gamma0", "--h", "3", "--k", "3"}).out)["gamma0"], "17/108");
    EXPECT_EQ(run({"enumerate", "--limit", "100"}).out, "4\n19\n34\n49\n64\n84\n99\n");
    EXPECT_EQ(parse(run({"kprime", "--n", "100", "--y", "1"}).out)["K_prime"], 47);
    const Json g = parse(run({"gaps", "--limit", "100"}).out);
    EXPECT_EQ(g["count"], 7);
    EXPECT_EQ(g["max_gap"], "20");
    EXPECT_EQ(g["max_gap_location"], "84");
    const Json gr = parse(run({"greedy", "--n", "1000000"}).out);
    EXPECT_EQ(gr["x"], Json::parse("[31,16,10,5]"));
    EXPECT_EQ(gr["remainder"], "318");
    const Json w = parse(run({"weyl-eval", "--sum", "g", "--alpha", "1/2", "--y", "4"}).out);
    EXPECT_EQ(w["value"]["abs"], 0.0);
    EXPECT_EQ(parse(run({"count-r", "--n", "671", "--x", "8"}).out)["value"], 1);
    EXPECT_EQ(parse(run({"kgamma", "--n", "1000", "--gamma", "3/10"}).out)["K_gamma"],
              static_cast<std::uint64_t>(oracle::kgamma(1000, 0.3L)));
    const Json a = parse(run({"arcs", "--N", "65536", "--j", "2", "--classify", "1/3", "--check-disjoint"}).out);
    EXPECT_TRUE(a["disjoint"].get<bool>());
    EXPECT_EQ(a["classification"]["label"], "major(2,q=3,a=1)");
    const Json in = parse(run({"integrate", "--P", "6,5,4,3.5", "--Y", "3", "--no-range-check", "--which", "R", "--n", "1000"}).out);
    EXPECT_NEAR(in["value"]["re"].get<double>(), static_cast<double>(direct_R(1000, tiny(6, 5, 4, 3.5, 3))), 1e-9);
    const Json gk = parse(run({"integrate", "--P", "6,5,4,3.5", "--Y", "3", "--no-range-check", "--which", "R", "--n", "1000",
                               "--arcset", "major", "--engine", "gk", "--rel-tol", "1e-9"})
                               .out);
    const Json sp = parse(run({"integrate", "--P", "6,5,4,3.5", "--Y", "3", "--no-range-check", "--which", "R", "--n", "1000",
                               "--arcset", "major"})
                               .out);
    EXPECT_NEAR(gk["value"]["re"].get<double>(), sp["value"]["re"].get<double>(), 1e-7);
}

TEST(Cli, ConfigEcho) {
    const Json j = parse(run({"kprime", "--n", "100", "--y", "5/2"}).out);
    EXPECT_EQ(j["config"]["n"], "100");
    EXPECT_EQ(j["config"]["y"], "5/2");
    EXPECT_EQ(j["config"]["max-bitmap-bits"], "1073741824");
    EXPECT_FALSE(j["config"].contains("threads"));
}

TEST(Cli, OutAndCsvFiles) {
    const auto out = temp_file("s4.json");
    const auto csv = temp_file("s4.csv");
    const auto cfg = temp_file("s4.ini", "P4 = 8\nY = 32\n");
    const CliRun r = run({"--out", out.string(), "--csv", csv.string(), "experiment", "--name", "s4", "--config", cfg.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const Json j = parse(slurp(out));
    EXPECT_EQ(j["schema"], "waring4.experiment/1");
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["config"]["name"], "s4");
    const std::string rows = slurp(csv);
    EXPECT_EQ(rows.substr(0, rows.find('\n')), [&] {
        std::string h;
        for (const auto& c : j["columns"]) h += (h.empty() ? "" : ",") + c.get<std::string>();
        return h;
    }());
}

TEST(Cli, ExperimentConfigErrors) {
    const auto bad = temp_file("bad.ini", "P4 = 8\ncolour = blue\n");
    EXPECT_EQ(run({"experiment", "--name", "s4", "--config", bad.string()}).code, 2);
    const auto mal = temp_file("mal.ini", "P4 = eight\n");
    EXPECT_EQ(run({"experiment", "--name", "s4", "--config", mal.string()}).code, 2);
    EXPECT_EQ(run({"experiment", "--name", "s4", "--config", "/nonexistent/x.ini"}).code, 2);
    EXPECT_EQ(run({"experiment", "--name", "nope"}).code, 2);
}

TEST(Cli, ShippedConfigsParse) {
    const std::string dir = WARING4_CONFIG_DIR;
    for (const char* name : {"s4", "induction-chain"}) {
        const CliRun r = run({"experiment", "--name", name, "--config", dir + "/" + name + ".ini"});
        EXPECT_EQ(r.code, 0) << name << r.err;
        EXPECT_TRUE(parse(r.out)["pass"].get<bool>()) << name;
    }
}

TEST(Cli, ThreadCountDoesNotChangeBytes) {
    const std::vector<std::vector<std::string>> cases{
        {"gaps", "--limit", "300000"},
        {"kprime", "--n", "100000", "--y", "30"},
        {"weyl-eval", "--sum", "f", "--alpha", "12345/65537", "--x", "5000"},
        {"weyl-eval", "--sum", "nu", "--alpha", "0.1", "--x", "20"},
        {"weyl-eval", "--sum", "H", "--alpha", "1/3", "--x", "500", "--z", "9"},
        {"integrate", "--P", "8,6,5,4", "--Y", "2", "--no-range-check", "--which", "S", "--arcset", "minor", "--j", "1"},
        {"experiment", "--name", "induction-chain"},
        {"experiment", "--name", "s4"}};
    for (const auto& c : cases) {
        std::vector<std::string> one{"--threads", "1"}, four{"--threads", "4"};
        one.insert(one.end(), c.begin(), c.end());
        four.insert(four.end(), c.begin(), c.end());
        const CliRun a = run(one), b = run(four);
        EXPECT_EQ(a.code, 0) << c[0] << a.err;
        EXPECT_EQ(a.out, b.out) << c[0];
    }
}

TEST(Cli, TimingGoesToStderr) {
    const CliRun r = run({"--timing", "gamma0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(parse(r.err).contains("wall_seconds"));
    EXPECT_EQ(r.out, run({"gamma0"}).out);
}
