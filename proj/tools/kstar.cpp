#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "kstar/graphs.hpp"
#include "kstar/laplace.hpp"
#include "kstar/rational_json.hpp"
#include "kstar/suites.hpp"

using namespace kstar;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int exit_pass = 0, exit_fail = 1, exit_usage = 2;
constexpr const char* output_dir_env = "KSTAR_OUTPUT_DIR";

struct Options {
    std::string model = "flat";
    int dim = 1;
    std::string point = "0";
    int order = 2;
    int depth = 0;
    std::string engine = "oracle";
    std::string f1, f2;
    std::uint64_t seed = 42;
    int trials = -1;
    int max_abs = 3, max_den = 3;
    int panels = 4, angles = 16;
    std::string output;
    std::string operator_out;
    bool json = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<EngineKind> engines_of(const std::string& name)
{
    if (name == "both")
        return {EngineKind::Oracle, EngineKind::Graphs};
    return {parse_engine(name)};
}

ojson coefficient_json(const CRational& c)
{
    ojson j;
    j["value"] = c.str();
    put_crational(j, c);
    return j;
}

ojson series_json(const std::vector<CRational>& v)
{
    ojson a = ojson::array();
    for (size_t k = 0; k < v.size(); ++k) {
        ojson j = coefficient_json(v[k]);
        j["k"] = k;
        a.push_back(j);
    }
    return a;
}

void print_table(std::ostream& os, const std::string& title, const std::vector<CRational>& v)
{
    os << title << "\n";
    for (size_t k = 0; k < v.size(); ++k)
        os << "  hbar^" << k << "  " << v[k].str() << "\n";
}

// One computed object per engine; engine=both adds the diff.
struct Result {
    std::string label;
    std::vector<std::string> engines;
    std::vector<std::vector<CRational>> values;
    ojson extra = ojson::object();

    int first_difference() const
    {
        return values.size() < 2 ? -1 : kstar::first_difference(values[0], values[1]);
    }
};

ojson result_json(const Result& r)
{
    ojson j;
    j["object"] = r.label;
    for (auto& [k, v] : r.extra.items())
        j[k] = v;
    ojson e = ojson::object();
    for (size_t i = 0; i < r.engines.size(); ++i)
        e[r.engines[i]] = series_json(r.values[i]);
    j["engines"] = e;
    if (r.values.size() > 1) {
        ojson diff = ojson::array();
        for (size_t k = 0; k < std::max(r.values[0].size(), r.values[1].size()); ++k) {
            CRational a = k < r.values[0].size() ? r.values[0][k] : CRational(0);
            CRational b = k < r.values[1].size() ? r.values[1][k] : CRational(0);
            if (a != b) {
                ojson d = coefficient_json(a - b);
                d["k"] = k;
                diff.push_back(d);
            }
        }
        j["diff"] = diff;
    }
    return j;
}

void print_result(std::ostream& os, const Result& r)
{
    for (size_t i = 0; i < r.engines.size(); ++i)
        print_table(os, r.label + " [" + r.engines[i] + "]", r.values[i]);
    for (auto& [k, v] : r.extra.items())
        os << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    if (r.values.size() > 1) {
        int d = r.first_difference();
        if (d < 0)
            os << "diff: none\n";
        else
            os << "diff: first differing coefficient at hbar^" << d << ": " << r.values[0][d].str() << " vs "
               << r.values[1][d].str() << "\n";
    }
}

std::optional<std::string> output_path(const Options& o, const std::string& command)
{
    if (!o.output.empty())
        return o.output;
    if (const char* dir = std::getenv(output_dir_env); dir && *dir)
        return std::string(dir) + "/" + command + ".json";
    return std::nullopt;
}

void write_file(const std::string& path, const std::string& text)
{
    std::filesystem::path parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty())
        std::filesystem::create_directories(parent, ec);
    std::ofstream out(path);
    if (!out)
        throw UsageError("cannot write '" + path + "'");
    out << text;
}

void validate(const Options& o)
{
    if (o.order < 0)
        throw UsageError("--order must be non-negative");
    if (o.depth < 0)
        throw UsageError("--depth must be non-negative");
    if (o.dim < 1 || o.dim > 3)
        throw UsageError("--dim must be 1, 2 or 3");
    if (o.max_abs < 1 || o.max_den < 1)
        throw UsageError("--max-abs and --max-den must be positive");
}

RandomSpec random_spec(const Options& o) { return {o.max_abs, o.max_den}; }

struct Case {
    ModelPtr model;
    Point point;
    Polynomial f1, f2;
};

// --model random draws `trials` seeded perturbation contexts; missing
// functions are drawn too.
std::vector<Case> cases(const Options& o)
{
    std::vector<Case> out;
    if (o.model != "random") {
        Case c;
        c.model = parse_model(o.model, o.dim);
        int n = c.model->dim();
        c.point = parse_point(o.point, n);
        c.f1 = o.f1.empty() ? Polynomial::constant(n, CRational(1)) : parse_polynomial(o.f1, n);
        c.f2 = o.f2.empty() ? Polynomial::constant(n, CRational(1)) : parse_polynomial(o.f2, n);
        out.push_back(std::move(c));
        return out;
    }
    Rng rng(o.seed);
    int trials = o.trials < 0 ? 1 : o.trials;
    for (int t = 0; t < trials; ++t) {
        RandomCase rc = random_case(o.dim, rng, random_spec(o));
        Case c{rc.model, rc.point, {}, {}};
        c.f1 = o.f1.empty() ? random_polynomial(o.dim, 0, 3, rng, random_spec(o)) : parse_polynomial(o.f1, o.dim);
        c.f2 = o.f2.empty() ? random_polynomial(o.dim, 0, 3, rng, random_spec(o)) : parse_polynomial(o.f2, o.dim);
        out.push_back(std::move(c));
    }
    return out;
}

ojson case_header(const Case& c)
{
    ojson j;
    j["model"] = c.model->describe();
    j["point"] = point_str(c.point);
    return j;
}

Result compute(const std::string& command, const Options& o, const Case& c)
{
    int K = o.order;
    Result r;
    r.label = command;
    for (EngineKind e : engines_of(o.engine)) {
        HbarSeries<CRational> s;
        if (command == "bullet") {
            Context ctx = build_context(*c.model, c.point, 2 * K + 2);
            auto j1 = c.f1.jet_at(c.point, 2 * K), j2 = c.f2.jet_at(c.point, 2 * K);
            s = e == EngineKind::Graphs ? bullet_via_graphs(ctx, j1, j2, K) : bullet_oracle(ctx, j1, j2, K);
            r.label = "(" + c.f1.str() + ") . (" + c.f2.str() + ")";
        } else if (command == "star") {
            s = normalized_star(*c.model, c.point, c.f1, c.f2, K, e);
            r.label = "(" + c.f1.str() + ") * (" + c.f2.str() + ")";
        } else if (command == "imap") {
            StarAlgebraQ alg = make_star_algebra(*c.model, c.point, K, e);
            s = series_values(alg.i_map(lift(K, function_jet(c.f1, c.point))));
            r.label = "I(" + c.f1.str() + ")";
        } else {
            UnitElement u = unit_element(*c.model, c.point, K, o.depth, e);
            s = HbarSeries<CRational>(K);
            for (int l = 0; l <= K; ++l)
                s[l] = u.e[l].coeff(0);
            r.label = "e";
            if (o.depth > 0 && r.extra.empty()) {
                ojson jets = ojson::array();
                for (int l = 0; l <= K; ++l)
                    jets.push_back(u.e[l].str());
                r.extra["jets"] = jets;
            }
        }
        r.engines.push_back(engine_name(e));
        r.values.push_back(coefficients(s));
    }
    if (command == "unit") {
        Context ctx = build_context(*c.model, c.point, 6);
        r.extra["D"] = vacuum_D(ctx).str();
    }
    return r;
}

int run_compute(const std::string& command, const Options& o)
{
    validate(o);
    ojson doc;
    doc["command"] = command;
    doc["order"] = o.order;
    doc["engine"] = o.engine;
    if (o.model == "random")
        doc["seed"] = o.seed;
    doc["results"] = ojson::array();
    int status = exit_pass;
    std::vector<Case> cs = cases(o);
    for (size_t t = 0; t < cs.size(); ++t) {
        Result r = compute(command, o, cs[t]);
        ojson j = case_header(cs[t]);
        j.update(result_json(r));
        doc["results"].push_back(j);
        if (!o.json) {
            if (cs.size() > 1)
                std::cout << "case " << t << ": ";
            std::cout << "model " << cs[t].model->describe() << " at " << point_str(cs[t].point) << "\n";
            print_result(std::cout, r);
        }
        if (r.first_difference() >= 0)
            status = exit_fail;
    }
    if (command == "bullet" && !o.operator_out.empty()) {
        const Case& c = cs.front();
        Context ctx = build_context(*c.model, c.point, 2 * o.order + 2);
        EngineKind e = engines_of(o.engine).front();
        OperatorSeries<CRational> op = e == EngineKind::Graphs ? graph_operator_series(ctx, o.order)
                                                               : bullet_operator_oracle(ctx, o.order);
        write_file(o.operator_out, operator_series_json(op, {c.model->describe(), c.point, o.order, engine_name(e)}));
    }
    std::string text = doc.dump(2) + "\n";
    if (o.json)
        std::cout << text;
    if (auto path = output_path(o, command))
        write_file(*path, text);
    if (status != exit_pass && !o.json)
        std::cout << "engines disagree\n";
    return status;
}

int run_verify(const std::string& suite, const Options& o)
{
    Options checked = o;
    checked.order = std::max(o.order, 0);
    validate(checked);
    SuiteConfig cfg;
    if (o.model != "random")
        cfg.model = o.model;
    cfg.n = o.dim;
    if (!cfg.model.empty() && !o.point.empty()) {
        ModelPtr m = parse_model(cfg.model, cfg.n);
        cfg.point = parse_point(o.point, m->dim());
    }
    cfg.K = o.order;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.random = random_spec(o);
    cfg.quadrature = {o.panels, o.angles};
    cfg.engine = o.engine == "both" ? EngineKind::Oracle : parse_engine(o.engine);
    SuiteReport r = run_suite(suite, cfg);
    std::string text = r.to_json().dump(2) + "\n";
    if (o.json) {
        std::cout << text;
    } else {
        std::cout << r.suite << ": " << r.passed << "/" << r.trials << " checks passed (order " << r.K << ")\n";
        if (!r.counterexample.empty())
            std::cout << "counterexample: " << r.counterexample << "\n";
        std::cout << (r.ok() ? "PASS" : "FAIL") << "\n";
    }
    if (auto path = output_path(o, "verify-" + suite))
        write_file(*path, text);
    return r.ok() ? exit_pass : exit_fail;
}

void add_common(CLI::App* c, Options& o)
{
    c->add_option("--model", o.model, "flat, fubini-study, hyperbolic, perturbation:<poly>, a jet-table file, or random");
    c->add_option("--dim", o.dim, "complex dimension for flat, perturbation and random models")->capture_default_str();
    c->add_option("--point", o.point, "base point, comma-separated complex rationals")->capture_default_str();
    c->add_option("--order", o.order, "hbar order K")->capture_default_str();
    c->add_option("--engine", o.engine, "oracle, graphs or both")
        ->check(CLI::IsMember({"oracle", "graphs", "both"}))
        ->capture_default_str();
    c->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    c->add_option("--trials", o.trials, "number of random cases");
    c->add_option("--max-abs", o.max_abs, "bound on random numerators")->capture_default_str();
    c->add_option("--max-den", o.max_den, "bound on random denominators")->capture_default_str();
    c->add_option("--output", o.output, std::string("JSON output file (default: $") + output_dir_env + "/<command>.json)");
    c->add_flag("--json", o.json, "print the JSON document instead of tables");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact star products on Kahler manifolds as truncated hbar-series"};
    app.require_subcommand(1);
    Options o;
    std::string suite;

    for (const char* name : {"bullet", "star", "unit", "imap"}) {
        CLI::App* c = app.add_subcommand(name);
        add_common(c, o);
        if (std::string(name) != "unit") {
            c->add_option("--f1", o.f1, "polynomial in z, conj(z) (z1, z2, ... for n > 1)");
            if (std::string(name) != "imap")
                c->add_option("--f2", o.f2, "polynomial in z, conj(z)");
        } else {
            c->add_option("--depth", o.depth, "also print jets of e^(l) to this extra order")->capture_default_str();
        }
        if (std::string(name) == "bullet")
            c->add_option("--operator", o.operator_out, "write the operator table as JSON");
    }
    app.get_subcommand("bullet")->description("non-normalized product of f1 and f2 at the base point");
    app.get_subcommand("star")->description("normalized product of f1 and f2 at the base point");
    app.get_subcommand("unit")->description("the unit element e at the base point");
    app.get_subcommand("imap")->description("contravariant to covariant symbol map applied to f1");

    CLI::App* v = app.add_subcommand("verify", "run a seeded property suite");
    v->add_option("suite", suite, "suite name")->required();
    add_common(v, o);
    v->add_option("--panels", o.panels, "radial quadrature panels")->capture_default_str();
    v->add_option("--angles", o.angles, "angular quadrature nodes")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    try {
        if (v->parsed()) {
            if (!v->count("--model"))
                o.model.clear();
            if (!v->count("--order"))
                o.order = -1;
            if (!v->count("--point"))
                o.point.clear();
            return run_verify(suite, o);
        }
        for (const char* name : {"bullet", "star", "unit", "imap"})
            if (app.got_subcommand(name))
                return run_compute(name, o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
