// Command-line dispatch. Every subcommand writes one JSON report (or, for
// `enumerate`, one integer per line) and optionally a CSV row file.
//
// Exit codes: 0 success; 1 precondition or budget error; 2 invalid usage.
// Errors are reported on stderr as {"error": {"kind": ..., "message": ...}}.
#pragma once

#include "waring4/arcs.hpp"
#include "waring4/counting.hpp"
#include "waring4/enumeration.hpp"
#include "waring4/experiments.hpp"
#include "waring4/integrals.hpp"
#include "waring4/params.hpp"
#include "waring4/quadrature.hpp"
#include "waring4/report.hpp"
#include "waring4/weyl.hpp"

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace waring4::cli {

/// Malformed arguments or configuration: exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Argument parsing

inline ParsedRational parse_exact(const std::string& s, const std::string& what) {
    try {
        return parse_rational(s);
    } catch (const std::exception&) {
        throw UsageError("malformed " + what + " '" + s + "': expected a/b, an integer or a decimal");
    }
}

inline double parse_real(const std::string& s, const std::string& what) {
    return parse_exact(s, what).value.to_double();
}

inline std::int64_t parse_int(const std::string& s, const std::string& what) {
    const ParsedRational p = parse_exact(s, what);
    if (!p.value.is_integer()) throw UsageError(what + " must be an integer, got '" + s + "'");
    const BigInt v = p.value.numerator();
    if (v > BigInt(std::numeric_limits<std::int64_t>::max()) || v < BigInt(std::numeric_limits<std::int64_t>::min()))
        throw UsageError(what + " is out of the 64-bit range");
    return v.convert_to<std::int64_t>();
}

inline u128 parse_unsigned(const std::string& s, const std::string& what) {
    try {
        return parse_u128(s);
    } catch (const std::exception&) {
        throw UsageError("malformed " + what + " '" + s + "': expected a non-negative integer");
    }
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    const u128 v = parse_unsigned(s, what);
    if (v > std::numeric_limits<std::uint64_t>::max()) throw UsageError(what + " is out of the 64-bit range");
    return static_cast<std::uint64_t>(v);
}

inline TorusPoint parse_alpha(const std::string& s) {
    parse_exact(s, "alpha");
    return TorusPoint::parse(s);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

inline std::vector<double> parse_real_list(const std::string& s, const std::string& what) {
    std::vector<double> v;
    for (const std::string& t : split_list(s)) v.push_back(parse_real(t, what));
    return v;
}

inline std::vector<std::uint64_t> parse_u64_list(const std::string& s, const std::string& what) {
    std::vector<std::uint64_t> v;
    for (const std::string& t : split_list(s)) v.push_back(parse_u64(t, what));
    return v;
}

inline bool parse_bool(const std::string& s, const std::string& what) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw UsageError("malformed " + what + " '" + s + "': expected true or false");
}

// ---------------------------------------------------------------------------
// Subcommand plumbing

/// Output sinks and the worker pool size, shared by all subcommands. None of
/// these enter the reports.
struct Runtime {
    unsigned threads = 1;
    std::string out;     // report path, stdout when empty
    std::string csv;     // CSV path, none when empty
    bool timing = false;
};

/// Options of one subcommand, all held as strings with their defaults so the
/// effective configuration can be echoed verbatim.
struct Command {
    CLI::App* app = nullptr;
    std::vector<std::pair<std::string, std::string>> values;  // name -> value
    std::vector<std::pair<std::string, bool>> flags;
    std::vector<std::string> value_help, flag_help;
    std::map<std::string, std::size_t> index;
    std::map<std::string, std::size_t> flag_index;

    void option(const std::string& name, const std::string& def, const std::string& help) {
        index[name] = values.size();
        values.emplace_back(name, def);
        value_help.push_back(help);
    }
    void flag(const std::string& name, const std::string& help) {
        flag_index[name] = flags.size();
        flags.emplace_back(name, false);
        flag_help.push_back(help);
    }
    /// Binds the registered storage to CLI11 (after all registrations, so the
    /// vectors no longer move).
    void bind() {
        for (std::size_t i = 0; i < values.size(); ++i)
            app->add_option("--" + values[i].first, values[i].second, value_help[i])->capture_default_str();
        for (std::size_t i = 0; i < flags.size(); ++i) app->add_flag("--" + flags[i].first, flags[i].second, flag_help[i]);
    }
    const std::string& get(const std::string& name) const { return values.at(index.at(name)).second; }
    bool has(const std::string& name) const { return !get(name).empty(); }
    bool is_set(const std::string& name) const { return flags.at(flag_index.at(name)).second; }

    Json config() const {
        Json j = Json::object();
        for (const auto& [name, value] : values) j[name] = value;
        for (const auto& [name, value] : flags) j[name] = value;
        return j;
    }
};

inline Exec exec_of(const Runtime& rt) { return Exec{rt.threads}; }

inline void add_budget_options(Command& c) {
    c.option("max-grid", std::to_string(kDefaultMaxGrid), "largest FFT grid");
}

inline GridOptions grid_of(const Command& c, const Runtime& rt) {
    GridOptions g;
    g.max_grid = parse_u64(c.get("max-grid"), "max-grid");
    g.exec = exec_of(rt);
    return g;
}

/// Parameters from --N/--gamma or from --P p1,p2,p3,p4 with --Y.
inline void add_parameter_options(Command& c, const std::string& default_N) {
    c.option("N", default_N, "size N; P1 = N^{1/4}");
    c.option("gamma", "13/50", "exponent gamma of Y = N^gamma (a/b or decimal)");
    c.option("P", "", "explicit P1,P2,P3,P4 (overrides --N)");
    c.option("Y", "", "explicit Y (with --P)");
    c.flag("no-range-check", "accept P outside P_j^{3/4} <= P_{j+1} <= P_j");
}

inline Parameters parameters_of(const Command& c) {
    if (c.has("P")) {
        const std::vector<double> p = parse_real_list(c.get("P"), "P");
        if (p.size() != 4) throw UsageError("--P takes four comma-separated values");
        if (!c.has("Y")) throw UsageError("--P requires --Y");
        const double y = parse_real(c.get("Y"), "Y");
        return Parameters::make(p[0], p[1], p[2], p[3], y, c.is_set("no-range-check") ? RangeCheck::skip : RangeCheck::enforce);
    }
    if (c.has("Y")) throw UsageError("--Y requires --P");
    const double N = parse_real(c.get("N"), "N");
    return choose_parameters(N, parse_exact(c.get("gamma"), "gamma").value);
}

inline void emit(const Runtime& rt, std::ostream& out, const Json& report, const Table* table = nullptr) {
    const std::string text = render(report);
    if (rt.out.empty()) {
        out << text;
    } else {
        std::ofstream f(rt.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + rt.out + " for writing");
        f << text;
    }
    if (!rt.csv.empty()) {
        if (!table) throw UsageError("this subcommand has no CSV rows");
        std::ofstream f(rt.csv, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + rt.csv + " for writing");
        write_csv(f, *table);
    }
}

inline double clean_zero(double v) { return v == 0 ? 0.0 : v; }

inline Json value_json(cplx z) { return complex_json({clean_zero(z.real()), clean_zero(z.imag())}); }

// ---------------------------------------------------------------------------
// Experiment configuration files

/// Flat key = value file (INI without sections, or a single section).
inline std::map<std::string, std::string> read_config(const std::string& path) {
    std::map<std::string, std::string> kv;
    if (path.empty()) return kv;
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw UsageError("cannot read config: " + std::string(e.what()));
    }
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            kv[key] = node.data();
        } else {
            for (const auto& [k2, n2] : node) kv[k2] = n2.data();
        }
    }
    return kv;
}

/// Typed access to a config map; rejects keys nobody asked for.
class ConfigReader {
public:
    explicit ConfigReader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    std::optional<std::string> take(const std::string& key) {
        used_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        return it->second;
    }
    void finish() const {
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) throw UsageError("unknown config key '" + k + "'");
    }

    template <class T, class Parse>
    void read(const std::string& key, T& target, Parse&& parse) {
        if (auto v = take(key)) target = parse(*v, key);
    }

    Parameters parameters(const std::string& default_N) {
        const auto P1 = take("P1"), P2 = take("P2"), P3 = take("P3"), P4 = take("P4"), Y = take("Y");
        const auto N = take("N"), gamma = take("gamma"), rc = take("range_check");
        if (P1 || P2 || P3 || P4 || Y) {
            if (!(P1 && P2 && P3 && P4 && Y)) throw UsageError("config: P1, P2, P3, P4 and Y go together");
            if (N || gamma) throw UsageError("config: give either P1..P4, Y or N, gamma");
            const bool check = rc ? parse_bool(*rc, "range_check") : true;
            return Parameters::make(parse_real(*P1, "P1"), parse_real(*P2, "P2"), parse_real(*P3, "P3"),
                                    parse_real(*P4, "P4"), parse_real(*Y, "Y"),
                                    check ? RangeCheck::enforce : RangeCheck::skip);
        }
        if (rc) throw UsageError("config: range_check applies to explicit P1..P4 only");
        return choose_parameters(parse_real(N.value_or(default_N), "N"),
                                 parse_exact(gamma.value_or("13/50"), "gamma").value);
    }

private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> used_;
};

inline ExperimentReport run_experiment(const std::string& name, const std::string& config_path, const GridOptions& grid,
                                       const Exec& exec) {
    ConfigReader cfg(read_config(config_path));
    ExperimentReport rep;
    if (name == "mean-square") {
        MeanSquareConfig c;
        c.exec = exec;
        cfg.read("ladder", c.ladder, parse_real_list);
        if (auto g = cfg.take("gamma")) c.gamma = parse_exact(*g, "gamma").value;
        cfg.read("envelope", c.envelope, parse_real);
        cfg.read("epsilon", c.epsilon, parse_real);
        cfg.finish();
        rep = mean_square_experiment(c);
    } else if (name == "s4") {
        S4Config c;
        cfg.read("P4", c.P4, parse_real);
        cfg.read("Y", c.Y, parse_real);
        cfg.finish();
        rep = s4_diagonal_experiment(c);
    } else if (name == "lemmas") {
        LemmaConfig c;
        c.exec = exec;
        c.grid = grid;
        const Parameters P = cfg.parameters("65536");
        cfg.read("density", c.density, parse_u64);
        cfg.read("g_Y", c.g_Y, parse_real_list);
        cfg.read("fnu_X", c.fnu_X, parse_u64_list);
        cfg.read("fnu_levels", c.fnu_levels, parse_u64_list);
        cfg.read("decay_X", c.decay_X, parse_real_list);
        cfg.read("decay_points", c.decay_points, parse_u64);
        cfg.read("l2_X", c.l2_X, parse_real_list);
        cfg.read("short_X", c.short_X, parse_u64_list);
        cfg.read("h_X", c.h_X, parse_u64_list);
        cfg.finish();
        rep = lemma_bound_suite(P, c);
    } else if (name == "bessel") {
        const Parameters P = cfg.parameters("4096");
        cfg.finish();
        rep = bessel_experiment(P, grid);
    } else if (name == "induction-chain") {
        const Parameters P = cfg.parameters("4096");
        cfg.finish();
        rep = induction_chain(P, grid);
    } else {
        throw UsageError("unknown experiment '" + name + "' (mean-square, s4, lemmas, bessel, induction-chain)");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Dispatch

inline Json error_json(const std::string& kind, const std::string& message) {
    return Json{{"error", Json{{"kind", kind}, {"message", message}}}};
}

/// Runs the command line `args` (without the program name).
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sums of four biquadrates: enumeration, exponential sums and circle-method experiments", "waring4"};
    app.set_help_flag("--help", "print this help and exit");  // -h would clash with gamma0 --h
    app.set_version_flag("--version", std::string(kVersion));
    Runtime rt;
    std::string threads = "1";
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
    app.add_option("--out", rt.out, "write the report here instead of stdout");
    app.add_option("--csv", rt.csv, "also write per-record rows as CSV");
    app.add_flag("--timing", rt.timing, "print wall time to stderr");
    app.require_subcommand(1, 1);

    std::vector<std::unique_ptr<Command>> commands;
    std::map<std::string, std::function<void(const Command&)>> handlers;
    auto command = [&](const std::string& name, const std::string& help) -> Command& {
        commands.push_back(std::make_unique<Command>());
        commands.back()->app = app.add_subcommand(name, help);
        return *commands.back();
    };

    auto enumeration_options = [](Command& c) {
        c.option("max-bitmap-bits", "1073741824", "largest bitmap in bits");
        c.option("window-bits", "1073741824", "window width once the bitmap budget is exceeded");
        c.flag("force-windowed", "always use windows of --window-bits");
    };
    auto enumeration_of = [&](const Command& c) {
        EnumerationOptions o;
        o.max_bitmap_bits = parse_unsigned(c.get("max-bitmap-bits"), "max-bitmap-bits");
        o.window_bits = parse_unsigned(c.get("window-bits"), "window-bits");
        o.force_windowed = c.is_set("force-windowed");
        o.exec = exec_of(rt);
        return o;
    };

    // gamma0 ---------------------------------------------------------------
    {
        Command& c = command("gamma0", "exact exponent gamma0(h, k)");
        c.option("h", "4", "number of diminishing variables");
        c.option("k", "4", "power");
        handlers["gamma0"] = [&](const Command& c) {
            const std::int64_t h = parse_int(c.get("h"), "h"), k = parse_int(c.get("k"), "k");
            const ExactRational g = gamma0_general(h, k);
            Json j = report_header("gamma0", 1, c.config());
            j["gamma0"] = g.str();
            j["decimal"] = g.to_double();
            emit(rt, out, j);
        };
    }
    // params ---------------------------------------------------------------
    {
        Command& c = command("params", "parameter schedule P1..P4, Y");
        add_parameter_options(c, "65536");
        handlers["params"] = [&](const Command& c) {
            const Parameters P = parameters_of(c);
            Json j = report_header("params", 1, c.config());
            j["parameters"] = parameters_json(P);
            Json ranges = Json::array();
            for (int i = 1; i <= 4; ++i)
                ranges.push_back(Json{{"j", i},
                                      {"x_first", P.x_range(i).first()},
                                      {"x_last", P.x_range(i).last()},
                                      {"x_count", P.x_range(i).count()},
                                      {"z_count", P.z_range(i).count()},
                                      {"shift_bound", i <= 3 ? Json(P.shift_bound(i)) : Json(nullptr)}});
            j["ranges"] = ranges;
            j["y_count"] = P.y_count();
            const auto n = static_cast<std::int64_t>(std::floor(P.N()));
            if (n >= 1) {
                j["RR_N"] = expected_RR(n, P);
                j["RR_N_normalized"] = expected_RR_normalized(n, P);
            }
            emit(rt, out, j);
        };
    }
    // enumerate ------------------------------------------------------------
    {
        Command& c = command("enumerate", "stream the representable integers <= limit, one per line");
        c.option("limit", "100", "upper limit (128-bit)");
        enumeration_options(c);
        handlers["enumerate"] = [&](const Command& c) {
            const u128 limit = parse_unsigned(c.get("limit"), "limit");
            std::ofstream file;
            if (!rt.out.empty()) {
                file.open(rt.out, std::ios::binary);
                if (!file) throw std::runtime_error("cannot open " + rt.out + " for writing");
            }
            std::ostream& os = rt.out.empty() ? out : file;
            std::string buf;
            enumerate_representable(limit, enumeration_of(c), [&](u128 n) {
                buf += to_string(n);
                buf += '\n';
                if (buf.size() > (1u << 16)) {
                    os << buf;
                    buf.clear();
                }
            });
            os << buf;
        };
    }
    // gaps -----------------------------------------------------------------
    {
        Command& c = command("gaps", "gap statistics of the representable integers <= limit");
        c.option("limit", "1000000", "upper limit (128-bit)");
        enumeration_options(c);
        handlers["gaps"] = [&](const Command& c) {
            const GapReport g = gap_statistics(parse_unsigned(c.get("limit"), "limit"), enumeration_of(c));
            Json j = report_header("gaps", 1, c.config());
            j["limit"] = u128_json(g.limit);
            j["count"] = g.count;
            j["smallest"] = g.count ? u128_json(g.smallest) : Json(nullptr);
            j["largest"] = g.count ? u128_json(g.largest) : Json(nullptr);
            j["max_gap"] = u128_json(g.max_gap);
            j["max_gap_location"] = g.max_gap_location ? u128_json(*g.max_gap_location) : Json(nullptr);
            Table t{{"gap", "frequency"}, {}};
            Json hist = Json::array();
            for (const auto& [gap, freq] : g.histogram) {
                hist.push_back(Json{{"gap", u128_json(gap)}, {"frequency", freq}});
                t.rows.push_back(hist.back());
            }
            j["histogram"] = hist;
            emit(rt, out, j, &t);
        };
    }
    // kprime ---------------------------------------------------------------
    {
        Command& c = command("kprime", "K'(N, Y): n in (N/2, N] with (n - Y, n] free of representable integers");
        c.option("n", "100", "N");
        c.option("y", "1", "Y (a/b or decimal)");
        enumeration_options(c);
        handlers["kprime"] = [&](const Command& c) {
            const u128 N = parse_unsigned(c.get("n"), "n");
            const ParsedRational y = parse_exact(c.get("y"), "y");
            const std::uint64_t k = count_empty_intervals(N, y.value.to_double(), enumeration_of(c));
            Json j = report_header("kprime", 1, c.config());
            j["N"] = u128_json(N);
            j["Y"] = y.value.to_double();
            j["Y_inexact"] = y.from_decimal;
            j["K_prime"] = k;
            emit(rt, out, j);
        };
    }
    // kgamma ---------------------------------------------------------------
    {
        Command& c = command("kgamma", "K_gamma(N): n <= N with (n - n^gamma, n] free of representable integers");
        c.option("n", "1000", "N");
        c.option("gamma", "3/10", "gamma (a/b or decimal)");
        enumeration_options(c);
        handlers["kgamma"] = [&](const Command& c) {
            const u128 N = parse_unsigned(c.get("n"), "n");
            const ParsedRational g = parse_exact(c.get("gamma"), "gamma");
            const std::uint64_t k = count_empty_intervals_gamma(N, g.value.to_double(), enumeration_of(c));
            Json j = report_header("kgamma", 1, c.config());
            j["N"] = u128_json(N);
            j["gamma"] = g.value.str();
            j["gamma_inexact"] = g.from_decimal;
            j["K_gamma"] = k;
            emit(rt, out, j);
        };
    }
    // greedy ---------------------------------------------------------------
    {
        Command& c = command("greedy", "greedy approximation by four fourth powers");
        c.option("n", "1000000", "n (128-bit)");
        handlers["greedy"] = [&](const Command& c) {
            const GreedyResult g = greedy_approx(parse_unsigned(c.get("n"), "n"));
            Json j = report_header("greedy", 1, c.config());
            j["n"] = u128_json(g.n);
            j["x"] = g.x;
            j["remainder"] = u128_json(g.remainder);
            j["remainder_ratio"] = static_cast<double>(g.remainder) / std::pow(static_cast<double>(g.n), 81.0 / 256.0);
            emit(rt, out, j);
        };
    }
    // weyl-eval ------------------------------------------------------------
    {
        Command& c = command("weyl-eval", "evaluate f, g, nu or H at alpha");
        c.option("sum", "f", "f, g, nu or H");
        c.option("alpha", "0", "alpha (a/q exact, or decimal)");
        c.option("x", "", "X (f, nu, H)");
        c.option("y", "", "Y (g)");
        c.option("z", "", "Z (H)");
        c.option("max-terms", std::to_string(kDefaultTermBudget), "term budget for nu");
        handlers["weyl-eval"] = [&](const Command& c) {
            const std::string sum = c.get("sum");
            const TorusPoint alpha = parse_alpha(c.get("alpha"));
            auto need = [&](const char* k) {
                if (!c.has(k)) throw UsageError("--sum " + sum + " requires --" + k);
                return parse_real(c.get(k), k);
            };
            cplx v;
            if (sum == "f") v = weyl_f(alpha, need("x"), exec_of(rt));
            else if (sum == "g") v = weyl_g(alpha, need("y"));
            else if (sum == "nu") v = mollified_nu(alpha, need("x"), exec_of(rt), parse_u64(c.get("max-terms"), "max-terms"));
            else if (sum == "H") v = diff_sum_H(alpha, need("x"), need("z"), exec_of(rt));
            else throw UsageError("--sum must be one of f, g, nu, H");
            Json j = report_header("weyl-eval", 1, c.config());
            j["sum"] = sum;
            j["alpha"] = alpha.str();
            j["alpha_inexact"] = alpha.inexact();
            j["value"] = value_json(v);
            emit(rt, out, j);
        };
    }
    // arcs -----------------------------------------------------------------
    {
        Command& c = command("arcs", "major/central/minor partition for level j");
        c.option("j", "1", "level 1..3");
        add_parameter_options(c, "65536");
        c.option("classify", "", "also classify this alpha");
        c.flag("check-disjoint", "fail (exit 1) unless the pieces are disjoint with total measure 1");
        handlers["arcs"] = [&](const Command& c) {
            const Parameters P = parameters_of(c);
            const int j = static_cast<int>(parse_int(c.get("j"), "j"));
            const ArcPartition part = build_arcs(j, P);
            Json jr = report_header("arcs", 1, c.config());
            jr["parameters"] = parameters_json(P);
            jr["j"] = j;
            jr["disjoint"] = part.disjoint;
            jr["total_measure"] = part.total_measure.str();
            jr["total_is_one"] = part.total_measure == ExactRational(1);
            jr["major_arc_count"] = part.major_arc_count;
            jr["q_max"] = major_q_max(j, P);
            jr["major_measure_phi"] = part.major_measure_phi.str();
            Table t{{"piece", "lo", "hi", "length", "lo_decimal", "hi_decimal"}, {}};
            Json pieces = Json::array();
            for (const ArcSet* s : part.pieces()) {
                const ExactRational m = s->measure();
                pieces.push_back(Json{{"piece", s->label()},
                                      {"intervals", s->intervals.size()},
                                      {"measure", m.str()},
                                      {"measure_decimal", m.to_double()}});
                for (const Interval& iv : s->intervals)
                    t.rows.push_back(Json{{"piece", s->label()},
                                          {"lo", iv.lo.str()},
                                          {"hi", iv.hi.str()},
                                          {"length", iv.length().str()},
                                          {"lo_decimal", iv.lo.to_double()},
                                          {"hi_decimal", iv.hi.to_double()}});
            }
            jr["pieces"] = pieces;
            if (c.has("classify")) {
                const TorusPoint a = parse_alpha(c.get("classify"));
                const Classification cl = classify_alpha(a, j, P);
                jr["classification"] = Json{{"alpha", a.str()}, {"alpha_inexact", a.inexact()}, {"label", cl.label(j)}};
            }
            emit(rt, out, jr, &t);
            if (c.is_set("check-disjoint") && !(part.disjoint && part.total_measure == ExactRational(1)))
                throw std::domain_error("arc partition check failed: pieces overlap or total measure != 1");
        };
    }
    // integrate ------------------------------------------------------------
    {
        Command& c = command("integrate", "integrals R, U, S, T, V, W over an arc set");
        c.option("which", "R", "R, U, S, T, V or W");
        c.option("arcset", "full", "full, major, central, minor, A0 or A1");
        c.option("j", "1", "level of the arc set");
        c.option("n", "", "frequency n (R and U)");
        c.option("engine", "spectral", "spectral or gk");
        c.option("rel-tol", "1e-8", "Gauss-Kronrod relative tolerance");
        add_parameter_options(c, "4096");
        add_budget_options(c);
        handlers["integrate"] = [&](const Command& c) {
            const Parameters P = parameters_of(c);
            const std::string which = c.get("which");
            const ProductSpec spec = [&] {
                try {
                    return spec_by_name(which, P);
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
            }();
            const int j = static_cast<int>(parse_int(c.get("j"), "j"));
            const ArcSet B = [&] {
                const std::string a = c.get("arcset");
                if (a != "full" && a != "major" && a != "central" && a != "minor" && a != "A0" && a != "A1")
                    throw UsageError("unknown arc set '" + a + "'");
                return arc_set(a, j, P);
            }();
            std::int64_t n = 0;
            if (integral_takes_n(which)) {
                if (!c.has("n")) throw UsageError("--which " + which + " requires --n");
                n = parse_int(c.get("n"), "n");
            } else if (c.has("n")) {
                throw UsageError("--which " + which + " takes no --n");
            }
            QuadOptions q;
            const std::string engine = c.get("engine");
            if (engine == "spectral") q.engine = Engine::spectral;
            else if (engine == "gk" || engine == "gauss-kronrod") q.engine = Engine::gauss_kronrod;
            else throw UsageError("--engine must be spectral or gk");
            q.rel_tol = parse_real(c.get("rel-tol"), "rel-tol");
            q.grid = grid_of(c, rt);
            const IntegralResult r = integrate_product(spec, n, B, q);
            Json j2 = report_header("integrate", 1, c.config());
            j2["parameters"] = parameters_json(P);
            j2["integrand"] = spec.describe();
            j2["arcset"] = B.label();
            j2["arcset_measure"] = B.measure().str();
            j2["n"] = integral_takes_n(which) ? Json(n) : Json(nullptr);
            j2["value"] = value_json(r.value);
            j2["error_estimate"] = r.error_estimate;
            j2["grid_size"] = r.grid_size;
            j2["panels"] = r.panels;
            j2["engine"] = r.engine;
            emit(rt, out, j2);
        };
    }
    // count-r --------------------------------------------------------------
    {
        Command& c = command("count-r", "counting functions r(n, X), r'(n), rho(n)");
        c.option("kind", "r", "r, r-prime or rho");
        c.option("n", "0", "n");
        c.option("x", "8", "X (r)");
        add_parameter_options(c, "4096");
        c.option("max-terms", std::to_string(kDefaultTermBudget), "term budget for rho");
        handlers["count-r"] = [&](const Command& c) {
            const std::string kind = c.get("kind");
            const std::int64_t n = parse_int(c.get("n"), "n");
            Json j = report_header("count-r", 1, c.config());
            j["kind"] = kind;
            j["n"] = n;
            if (kind == "r") {
                const double X = parse_real(c.get("x"), "x");
                j["X"] = X;
                j["value"] = count_r(n, X);
            } else if (kind == "r-prime") {
                const Parameters P = parameters_of(c);
                j["parameters"] = parameters_json(P);
                j["h_max"] = r_prime_h_max(P);
                j["value"] = count_r_prime(n, P);
            } else if (kind == "rho") {
                const Parameters P = parameters_of(c);
                j["parameters"] = parameters_json(P);
                const RhoTable rho(P, exec_of(rt), parse_u64(c.get("max-terms"), "max-terms"));
                j["value"] = rho(n);
                j["support_bound"] = rho.span();
            } else {
                throw UsageError("--kind must be r, r-prime or rho");
            }
            emit(rt, out, j);
        };
    }
    // experiment -----------------------------------------------------------
    {
        Command& c = command("experiment", "run a composite experiment");
        c.option("name", "", "mean-square, s4, lemmas, bessel or induction-chain");
        c.option("config", "", "key = value configuration file");
        add_budget_options(c);
        handlers["experiment"] = [&](const Command& c) {
            if (!c.has("name")) throw UsageError("experiment requires --name");
            const ExperimentReport rep = run_experiment(c.get("name"), c.get("config"), grid_of(c, rt), exec_of(rt));
            Json j = rep.to_json();
            Json cfg = Json::object();
            cfg["name"] = c.get("name");
            cfg["max-grid"] = c.get("max-grid");
            cfg["effective"] = j["config"];
            j["config"] = cfg;
            emit(rt, out, j, &rep.records);
        };
    }

    for (auto& c : commands) c->bind();

    std::vector<std::string> argv_store;
    argv_store.push_back("waring4");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_json("usage", e.what()).dump() << "\n";
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        const std::int64_t t = parse_int(threads, "threads");
        if (t < 1 || t > 1024) throw UsageError("--threads must be in 1..1024");
        rt.threads = static_cast<unsigned>(t);
        for (auto& c : commands)
            if (c->app->parsed()) handlers.at(c->app->get_name())(*c);
    } catch (const UsageError& e) {
        err << error_json("usage", e.what()).dump() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        err << error_json("budget", e.what()).dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << error_json("precondition", e.what()).dump() << "\n";
        return 1;
    }
    if (rt.timing) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        err << Json{{"wall_seconds", s}}.dump() << "\n";
    }
    return 0;
}

}  // namespace waring4::cli
