#pragma once

// Command-line front end. run() does all the work so tests can call it in-process.

#include "cascade.hpp"
#include "diagram.hpp"
#include "euler_log.hpp"
#include "exponent_solver.hpp"
#include "mech_sim.hpp"
#include "root_search.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace geocalc::cli {

enum exit_code { ok = 0, usage = 1, domain = 2 };

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string backend = "construction";
    int digits = 30;
    double tol = 0;
    int cf_depth = 16;
    double cf_tol = 1e-12;
    std::string resolution;  // empty: exact construction
    std::string arm_min = "0.01";
    std::string arm_max = "2";
    std::string method;
    std::int64_t max_n = 1000;
    int sig = 5;
    bool json = false;
    std::string emit_trace;
    std::string diagram;
    std::string x_opt, a_opt;

    bool mech() const { return !resolution.empty(); }

    EngineConfig engine() const
    {
        EngineConfig cfg;
        cfg.precision.working_digits = digits;
        cfg.precision.oracle_digits = std::max(60, 2 * digits);
        cfg.precision.rel_tol_override = tol;
        cfg.mode = backend == "oracle" ? backend::oracle : backend::construction;
        return cfg;
    }

    CfOptions cf() const
    {
        CfOptions o;
        o.max_depth = cf_depth;
        o.cf_tol = cf_tol;
        return o;
    }

    MeasurementModel model() const
    {
        MeasurementModel m;
        m.resolution = Real(resolution);
        m.arm_min = Real(arm_min);
        m.arm_max = Real(arm_max);
        return m;
    }

    void check() const
    {
        if (backend != "construction" && backend != "oracle")
            throw usage_error("--backend must be construction or oracle");
        if (mech() && backend == "oracle")
            throw usage_error("--resolution simulates the device and needs the construction backend");
        if (digits < 15 || digits > 1000)
            throw usage_error("--digits must be in [15, 1000]");
        if (tol < 0 || cf_tol <= 0 || cf_depth < 1 || sig < 1 || sig > 100 || max_n < 1)
            throw usage_error("numeric option out of range");
        for (const std::string* s : {&resolution, &arm_min, &arm_max}) {
            if (s == &resolution && s->empty())
                continue;
            try {
                geocalc::detail::parse_decimal(*s);
            } catch (const calc_error&) {
                throw usage_error("malformed length '" + *s + "'");
            }
        }
        if (mech()) {
            try {
                model().validate();
            } catch (const calc_error& e) {
                throw usage_error(e.what());
            }
        }
        if ((!emit_trace.empty() || !diagram.empty()) && (backend == "oracle" || mech()))
            throw usage_error("traces come only from the construction backend");
    }
};

namespace detail {

using json = nlohmann::ordered_json;

inline std::int64_t to_int(const std::string& s, const char* what)
{
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw usage_error(std::string(what) + " must be an integer, got '" + s + "'");
    return v;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw usage_error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw usage_error("cannot write " + path);
}

inline json cf_json(const ContinuedFraction& cf)
{
    json terms = json::array();
    for (const auto& t : cf.terms)
        terms.push_back(t.convert_to<std::int64_t>());
    return {{"terms", terms}, {"terminated", cf.terminated}, {"text", cf.to_text()},
            {"value", evaluate_cf(cf).to_text()}};
}

struct answer {
    json inputs = json::object();
    std::string result;                 // plain text
    std::optional<json> result_json;    // when the result is not a single number
    std::optional<std::string> bound;
    std::optional<json> cf;
    std::vector<std::string> lines;     // plain output when several lines
};

inline void need(const std::vector<std::string>& ops, std::size_t n, const std::string& name)
{
    if (ops.size() != n)
        throw usage_error(name + " takes " + std::to_string(n) + " operand" + (n == 1 ? "" : "s"));
}

/// Graduation readings without padding: 2.567e-2.
inline std::string reading_text(const Real& v)
{
    std::string s = real_to_text(v, 15);
    auto e = s.find('e');
    if (e == std::string::npos)
        return s;
    auto end = s.find_last_not_of('0', e - 1);
    if (s[end] == '.')
        --end;
    return s.substr(0, end + 1) + s.substr(e);
}

inline json record_json(const ScriptRecord& r, int sig)
{
    json readings = json::array();
    for (const auto& rd : r.result.readings)
        readings.push_back({{"arm", rd.arm}, {"length", reading_text(rd.length)}});
    json j = {{"line", r.command.line},
              {"op", r.command.op},
              {"args", r.command.args},
              {"value", to_text(r.result.value, sig)},
              {"half_width", to_text(r.result.half_width, 2)},
              {"readings", readings}};
    if (r.p)
        j["p"] = cf_json(*r.p);
    if (r.q)
        j["q"] = cf_json(*r.q);
    return j;
}

inline answer compute(const std::string& op, const std::vector<std::string>& ops, const RunConfig& rc,
                      GeometricPrimitiveTrace* trace)
{
    EngineConfig cfg = rc.engine();
    cfg.trace = trace;
    answer a;
    auto num = [](const std::string& s) { return normalize(s); };
    auto measured = [&](const MeasuredResult& r) {
        a.result = to_text(r.value, rc.sig);
        a.bound = to_text(r.half_width, 2);
    };
    auto method_is = [&](std::initializer_list<const char*> allowed) {
        if (rc.method.empty())
            return std::string(*allowed.begin());
        for (const char* m : allowed)
            if (rc.method == m)
                return rc.method;
        throw usage_error("--method '" + rc.method + "' does not apply to " + op);
    };
    auto no_mech = [&] {
        if (rc.mech())
            throw usage_error(op + " has no device script; drop --resolution");
    };
    auto no_method = [&] {
        if (!rc.method.empty())
            throw usage_error(op + " takes no --method");
    };

    if (op == "pow" || op == "root") {
        need(ops, 2, op);
        no_method();
        auto x = num(ops[0]);
        auto n = to_int(ops[1], "n");
        a.inputs = {{"x", ops[0]}, {"n", n}};
        if (rc.mech()) {
            if (n < 1 || n > 1000)
                throw calc_error(errc::domain_error, "device scripts take 1 <= n <= number of arms");
            measured(op == "pow" ? simulate_power(x, static_cast<int>(n), rc.model())
                                 : simulate_root(x, static_cast<int>(n), rc.model()));
        } else {
            a.result = to_text(op == "pow" ? power(x, n, cfg) : nth_root(x, n, cfg), rc.sig);
        }
    } else if (op == "powfrac") {
        need(ops, 3, op);
        no_method();
        no_mech();
        auto m = to_int(ops[1], "m"), n = to_int(ops[2], "n");
        a.inputs = {{"x", ops[0]}, {"m", m}, {"n", n}};
        a.result = to_text(rational_power(num(ops[0]), m, n, power_strategy::split, cfg), rc.sig);
    } else if (op == "recip") {
        need(ops, 1, op);
        a.inputs = {{"x", ops[0]}};
        if (rc.mech()) {
            no_method();
            measured(simulate_divide(SignedScaled::from_real(Real(1)), num(ops[0]), rc.model()));
        } else {
            auto m = method_is({"angle", "unit-perpendicular"});
            a.result = to_text(
                reciprocal(num(ops[0]), m == "angle" ? reciprocal_method::angle : reciprocal_method::unit_perpendicular,
                           cfg),
                rc.sig);
        }
    } else if (op == "mul") {
        need(ops, 2, op);
        no_method();
        no_mech();
        a.inputs = {{"a", ops[0]}, {"b", ops[1]}};
        a.result = to_text(multiply(num(ops[0]), num(ops[1]), cfg), rc.sig);
    } else if (op == "div") {
        need(ops, 2, op);
        a.inputs = {{"a", ops[0]}, {"b", ops[1]}};
        if (rc.mech()) {
            no_method();
            measured(simulate_divide(num(ops[0]), num(ops[1]), rc.model()));
        } else {
            auto m = method_is({"hypotenuse", "similar-triangles"});
            a.result = to_text(divide(num(ops[0]), num(ops[1]),
                                      m == "hypotenuse" ? divide_method::hypotenuse : divide_method::similar_triangles,
                                      cfg),
                               rc.sig);
        }
    } else if (op == "gmean") {
        need(ops, 2, op);
        a.inputs = {{"a", ops[0]}, {"b", ops[1]}};
        if (rc.mech()) {
            no_method();
            measured(simulate_gmean(num(ops[0]), num(ops[1]), rc.model()));
        } else {
            auto m = method_is({"bisect", "rotate"});
            a.result = to_text(
                geometric_mean(num(ops[0]), num(ops[1]), m == "bisect" ? gmean_method::bisect : gmean_method::rotate, cfg),
                rc.sig);
        }
    } else if (op == "ln") {
        need(ops, 1, op);
        no_method();
        no_mech();
        a.inputs = {{"a", ops[0]}};
        a.result = real_to_text(natural_log(num(ops[0]), rc.cf(), cfg), rc.sig);
    } else if (op == "antilog") {
        need(ops, 1, op);
        no_method();
        no_mech();
        a.inputs = {{"y", ops[0]}};
        geocalc::detail::parse_decimal(ops[0]);
        precision_guard g(cfg.precision);
        a.result = to_text(antilog(Real(ops[0]), cfg), rc.sig);
    } else if (op == "euler") {
        need(ops, 1, op);
        no_method();
        no_mech();
        auto n = to_int(ops[0], "n");
        a.inputs = {{"n", n}};
        auto e = approximate_e(n, cfg);
        precision_guard g(cfg.precision);
        a.result = real_to_text(e.value, rc.sig);
        a.bound = real_to_text(e.error_bound, 2);
    } else if (op == "solve-n" || op == "solve-mn") {
        no_method();
        std::string xs = rc.x_opt, as = rc.a_opt;
        if (!ops.empty()) {
            need(ops, 2, op);
            if (!xs.empty() || !as.empty())
                throw usage_error("give x and a either as operands or as --x/--a");
            xs = ops[0];
            as = ops[1];
        }
        if (xs.empty() || as.empty())
            throw usage_error(op + " needs --x and --a");
        a.inputs = {{"x", xs}, {"a", as}};
        auto x = num(xs), av = num(as);
        if (op == "solve-n") {
            no_mech();
            a.result = std::to_string(solve_integer_exponent(x, av, rc.max_n, cfg));
        } else if (rc.mech()) {
            auto r = simulate_cf_recover(x, av, rc.model(), rc.cf_depth);
            measured(r.result);
            a.cf = json{{"p", cf_json(r.p)}, {"q", cf_json(r.q)}};
        } else {
            auto cf = recover_rational_exponent(x, av, rc.cf(), cfg);
            a.cf = cf_json(cf);
            a.result = cf.to_text() + (cf.terminated ? " = " : " ~ ") + evaluate_cf(cf).to_text();
        }
    } else if (op == "simulate") {
        need(ops, 1, op);
        no_method();
        a.inputs = {{"script", ops[0]}};
        MeasurementModel defaults;
        if (rc.mech())
            defaults = rc.model();
        json records = json::array();
        for (const auto& cmd : parse_script(read_file(ops[0]), defaults)) {
            auto rec = run_script(cmd);
            records.push_back(record_json(rec, rc.sig));
            std::string line = "line " + std::to_string(cmd.line) + ": " + cmd.op;
            for (const auto& s : cmd.args)
                line += " " + s;
            line += " = " + to_text(rec.result.value, rc.sig) + " +/- " + to_text(rec.result.half_width, 2);
            for (const auto& rd : rec.result.readings)
                line += (&rd == &rec.result.readings.front() ? " [" : ", ") + rd.arm + "=" + reading_text(rd.length);
            if (!rec.result.readings.empty())
                line += "]";
            a.lines.push_back(line);
        }
        a.result_json = records;
    } else {
        throw usage_error("unknown subcommand " + op);
    }
    return a;
}

}  // namespace detail

/// Runs one command line (without the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    using detail::json;
    static const std::vector<std::string> subcommands{"pow", "root",  "powfrac", "recip",   "mul",     "div",      "gmean",
                                                      "ln",  "antilog", "euler", "solve-n", "solve-mn", "simulate", "diagram"};
    RunConfig rc;
    CLI::App app{"Geometric construction calculator"};
    app.name("geocalc");
    app.require_subcommand(1, 1);
    app.add_option("--backend", rc.backend, "construction or oracle");
    app.add_option("--digits", rc.digits, "working precision in decimal digits");
    app.add_option("--tol", rc.tol, "relative tolerance of searches");
    app.add_option("--cf-depth", rc.cf_depth, "continued fraction depth");
    app.add_option("--cf-tol", rc.cf_tol, "continued fraction termination tolerance");
    app.add_option("--resolution", rc.resolution, "graduation in metres; runs the arm device");
    app.add_option("--arm-min", rc.arm_min, "shortest readable arm, metres");
    app.add_option("--arm-max", rc.arm_max, "longest arm, metres");
    app.add_option("--method", rc.method, "bisect|rotate, hypotenuse|similar-triangles, angle|unit-perpendicular");
    app.add_option("--max-n", rc.max_n, "search limit for solve-n");
    app.add_option("--sig", rc.sig, "significant digits printed");
    app.add_flag("--json", rc.json, "JSON output");
    app.add_option("--emit-trace", rc.emit_trace, "write the construction trace here");
    app.add_option("--diagram", rc.diagram, "write an SVG drawing here");
    app.add_option("--x", rc.x_opt, "base for solve-n/solve-mn");
    app.add_option("--a", rc.a_opt, "value for solve-n/solve-mn");
    std::vector<std::string> operands;
    for (const auto& s : subcommands) {
        auto* sub = app.add_subcommand(s);
        sub->fallthrough();
        sub->add_option("operands", operands);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "geocalc: " << e.what() << "\n";
        return usage;
    }
    std::string op = app.get_subcommands().front()->get_name();

    try {
        rc.check();
        if (op == "diagram") {
            detail::need(operands, 1, op);
            if (!rc.emit_trace.empty() || rc.mech())
                throw usage_error("diagram reads a trace file; it takes only --diagram and --json");
            auto trace = GeometricPrimitiveTrace::parse(detail::read_file(operands[0]));
            std::string svg = render_trace(trace, 640, 480);
            if (!rc.diagram.empty())
                detail::write_file(rc.diagram, svg);
            if (rc.json) {
                json j = {{"op", op}, {"inputs", {{"trace", operands[0]}}}, {"result", rc.diagram.empty() ? svg : rc.diagram}};
                out << j.dump(2) << "\n";
            } else if (rc.diagram.empty()) {
                out << svg;
            } else {
                out << rc.diagram << "\n";
            }
            return ok;
        }

        GeometricPrimitiveTrace trace;
        bool tracing = !rc.emit_trace.empty() || !rc.diagram.empty();
        auto ans = detail::compute(op, operands, rc, tracing ? &trace : nullptr);
        if (!rc.emit_trace.empty())
            detail::write_file(rc.emit_trace, trace.to_text());
        if (!rc.diagram.empty())
            detail::write_file(rc.diagram, render_trace(trace, 640, 480));

        if (rc.json) {
            json j = {{"op", op}, {"inputs", ans.inputs}};
            if (ans.result_json)
                j["result"] = *ans.result_json;
            else
                j["result"] = ans.result;
            if (ans.bound)
                j["error_bound"] = *ans.bound;
            if (ans.cf)
                j["cf"] = *ans.cf;
            if (!rc.emit_trace.empty())
                j["trace_path"] = rc.emit_trace;
            out << j.dump(2) << "\n";
        } else if (!ans.lines.empty() || ans.result_json) {
            for (const auto& l : ans.lines)
                out << l << "\n";
        } else {
            out << ans.result;
            if (ans.bound)
                out << " +/- " << *ans.bound;
            out << "\n";
        }
        return ok;
    } catch (const usage_error& e) {
        err << "geocalc: " << e.what() << "\n";
        return usage;
    } catch (const calc_error& e) {
        err << "geocalc: " << e.what() << "\n";
        return e.code() == errc::parse_error ? usage : domain;
    }
}

}  // namespace geocalc::cli
