// crn: command-line front end for the reaction network library.

#include <CLI11.hpp>

#include "crn/balancing.hpp"
#include "crn/dynamics.hpp"
#include "crn/equivalence.hpp"
#include "crn/error.hpp"
#include "crn/geometry.hpp"
#include "crn/json.hpp"
#include "crn/model.hpp"
#include "crn/parser.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

using namespace crn;

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kError = 2;

struct Options {
    std::string file;
    std::string file_b;
    bool json = false;
    std::optional<double> tol;
    std::string rates;
    std::string steady_state;
    std::string x0;
    double horizon = 100.0;
    std::string grid = "log:0.01:100:21";
    std::size_t param_edge = 0;
    std::string query = "cb";
    std::size_t record_every = 1;
};

Tolerances tolerances(const Options& o)
{
    Tolerances t;
    if (o.tol) {
        t.balance = *o.tol;
        t.equivalence = *o.tol;
        t.wegscheider = *o.tol;
    }
    return t;
}

std::string vec(const Vector& v)
{
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s + ")";
}

Vector to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector parse_state(const std::string& csv, std::size_t dim, const char* flag)
{
    const Vector v = to_vector(parse_number_list(csv));
    if (static_cast<std::size_t>(v.size()) != dim)
        throw ModelError(std::string(flag) + " needs " + std::to_string(dim) + " entries");
    return v;
}

NetworkDocument load(const std::string& path)
{
    return load_network(path);
}

MassActionSystem system_of(const NetworkDocument& doc, const Options& o)
{
    if (!o.rates.empty()) return doc.with_rates(parse_number_list(o.rates));
    return doc.system();
}

unsigned seed_from_env()
{
    if (const char* s = std::getenv("CRN_SEED")) return static_cast<unsigned>(std::strtoul(s, nullptr, 10));
    return 0;
}

std::string vertex_label(const EmbeddedNetwork& net, VertexId id)
{
    return "y" + std::to_string(id.value) + "=" + vec(net.vertex(id).coords());
}

void print_system(std::ostream& out, const MassActionSystem& sys, const std::vector<std::string>& species)
{
    out << to_dsl(sys, species.size() == sys.dimension() ? species : std::vector<std::string>{});
}

int cmd_analyze(const Options& o)
{
    const auto doc = load(o.file);
    const auto& net = doc.network();
    const auto tol = tolerances(o);
    const auto rep = classify_structure(net, tol);
    std::optional<SingleTargetVerdict> verdict;
    if (rep.is_single_target) verdict = classify_single_target(net, tol);

    if (o.json) {
        Json j;
        j["network"] = to_json(net, doc.species());
        j["structure"] = to_json(rep);
        j["single_target"] = verdict ? to_json(*verdict) : Json(nullptr);
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    std::cout << "dimension              " << net.dimension() << "\n";
    std::cout << "vertices               " << rep.num_vertices << "\n";
    std::cout << "edges                  " << net.num_edges() << "\n";
    std::cout << "sources                " << rep.source_ids.size() << "\n";
    std::cout << "linkage classes        " << rep.num_components << "\n";
    std::cout << "stoichiometric rank    " << rep.stoich_dim << (rep.exact_rank ? " (exact)" : " (floating)") << "\n";
    std::cout << "deficiency             " << rep.deficiency << "\n";
    std::cout << "reversible             " << (rep.is_reversible ? "yes" : "no") << "\n";
    std::cout << "weakly reversible      " << (rep.is_weakly_reversible ? "yes" : "no") << "\n";
    std::cout << "power-law              " << (rep.is_power_law ? "yes" : "no") << "\n";
    std::cout << "single-target          ";
    if (rep.target_id) {
        std::cout << "yes, target " << vertex_label(net, *rep.target_id) << "\n";
        std::cout << "target membership      " << to_string(verdict->membership.status) << "\n";
        std::cout << "verdict                " << to_string(verdict->verdict) << "\n";
    } else {
        std::cout << "no\n";
    }
    return kOk;
}

std::string membership_phrase(MembershipStatus s)
{
    switch (s) {
    case MembershipStatus::RelativeInterior: return "target in relative interior";
    case MembershipStatus::Boundary: return "target on the boundary of the Newton polytope";
    case MembershipStatus::Outside: return "target outside the Newton polytope";
    }
    return "";
}

int cmd_classify(const Options& o)
{
    const auto doc = load(o.file);
    const auto v = classify_single_target(doc.network(), tolerances(o));
    const bool stable = v.verdict == StabilityCase::GloballyStable;
    if (o.json) {
        std::cout << emit_json(v) << "\n";
    } else {
        std::cout << to_string(v.verdict) << ": " << membership_phrase(v.membership.status) << "\n";
        if (v.membership.separating) std::cout << "linear Lyapunov direction w = " << vec(*v.membership.separating) << "\n";
    }
    return stable ? kOk : kNegative;
}

int cmd_realize_st(const Options& o)
{
    const auto doc = load(o.file);
    const auto sys = system_of(doc, o);
    const auto r = single_target_realize(sys, tolerances(o));
    if (!r) {
        if (o.json) {
            std::cout << Json{{"feasible", false}}.dump(2) << "\n";
        } else {
            std::cout << "infeasible: no single-target realization\n";
        }
        return kNegative;
    }
    if (o.json) {
        Json j = to_json(*r);
        j = Json{{"feasible", true}, {"realization", j}};
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    std::cout << "feasible: target " << vec(r->target) << "\n";
    print_system(std::cout, r->system, doc.species());
    return kOk;
}

int cmd_realize_db(const Options& o)
{
    const auto doc = load(o.file);
    const auto tol = tolerances(o);
    auto sys = system_of(doc, o);
    if (!single_target_of(sys.network())) {
        const auto st = single_target_realize(sys, tol);
        if (!st) {
            std::cout << (o.json ? Json{{"feasible", false}}.dump(2) : "infeasible: no single-target realization")
                      << "\n";
            return kNegative;
        }
        sys = st->system;
    }
    try {
        const auto r = db_realize_single_target(sys, tol);
        if (o.json) {
            std::cout << Json{{"feasible", true}, {"realization", to_json(r)}}.dump(2) << "\n";
            return kOk;
        }
        std::cout << "feasible: detailed-balanced realization\n";
        std::cout << "steady state x* = " << vec(r.steady_state) << "\n";
        std::cout << "equivalence residual " << format_double(r.equivalence_residual) << "\n";
        std::cout << "balance residual " << format_double(r.balance_residual) << "\n";
        print_system(std::cout, r.system, doc.species());
        return kOk;
    } catch (const NotInteriorError& e) {
        std::cout << (o.json ? Json{{"feasible", false}, {"reason", e.what()}}.dump(2)
                             : std::string("infeasible: ") + e.what())
                  << "\n";
        return kNegative;
    }
}

std::vector<Vector> candidate_states(const MassActionSystem& sys, const Options& o, const Tolerances& tol)
{
    if (!o.steady_state.empty()) return {parse_state(o.steady_state, sys.dimension(), "--steady-state")};
    const Vector x0 = o.x0.empty() ? Vector::Ones(static_cast<Eigen::Index>(sys.dimension()))
                                   : parse_state(o.x0, sys.dimension(), "--x0");
    return find_steady_states(sys, x0, 2, seed_from_env(), tol);
}

int cmd_realize_cb(const Options& o)
{
    const auto doc = load(o.file);
    const auto tol = tolerances(o);
    const auto sys = system_of(doc, o);
    const auto states = candidate_states(sys, o, tol);
    if (states.empty()) {
        std::cout << (o.json ? Json{{"feasible", false}, {"reason", "no positive steady state found"}}.dump(2)
                             : "infeasible: no positive steady state found")
                  << "\n";
        return kNegative;
    }
    std::optional<CBFeasibility> last;
    for (const auto& x : states) {
        last = cb_realize(sys, x, tol);
        if (last->feasible) break;
    }
    if (o.json) {
        std::cout << emit_json(*last) << "\n";
    } else if (last->feasible) {
        std::cout << "feasible at x = " << vec(last->steady_state_used) << "\n";
        if (!last->state_is_steady) std::cout << "warning: x is not a steady state of the input system\n";
        if (last->realized) print_system(std::cout, *last->realized, doc.species());
    } else {
        std::cout << "infeasible";
        if (states.size() == 1) {
            std::cout << " at x = " << vec(states.front());
        } else {
            std::cout << " at " << states.size() << " steady states";
        }
        std::cout << "\n";
        if (!last->state_is_steady) std::cout << "warning: x is not a steady state of the input system\n";
    }
    return last->feasible ? kOk : kNegative;
}

int cmd_simulate(const Options& o)
{
    const auto doc = load(o.file);
    const auto sys = system_of(doc, o);
    const Vector x0 = o.x0.empty() ? Vector::Ones(static_cast<Eigen::Index>(sys.dimension()))
                                   : parse_state(o.x0, sys.dimension(), "--x0");
    IntegrateOptions opts;
    opts.record_every = o.record_every;
    const auto tr = integrate(sys, x0, o.horizon, opts, tolerances(o));
    if (o.json) {
        std::cout << emit_json(tr) << "\n";
    } else {
        std::cout << trajectory_csv(tr);
        std::cerr << "verdict: " << to_string(tr.verdict) << "\n";
    }
    return kOk;
}

int cmd_check_equiv(const Options& o)
{
    const auto a = load(o.file);
    const auto b = load(o.file_b);
    const auto r = dynamically_equivalent(a.system(), b.system(), tolerances(o));
    if (o.json) {
        std::cout << emit_json(r) << "\n";
    } else {
        std::cout << (r.equivalent ? "equivalent" : "not equivalent") << " (max residual "
                  << format_double(r.max_residual) << ")\n";
    }
    return r.equivalent ? kOk : kNegative;
}

int cmd_check_balance(const Options& o)
{
    const auto doc = load(o.file);
    const auto tol = tolerances(o);
    const auto sys = system_of(doc, o);
    const auto states = candidate_states(sys, o, tol);
    if (states.empty()) throw NoConvergenceError("no positive steady state found; pass --steady-state");
    const Vector& x = states.front();
    const auto cb = check_complex_balance(sys, x, tol);
    const auto rep = classify_structure(sys.network(), tol);
    std::optional<DetailedBalanceReport> db;
    std::optional<WegscheiderResult> weg;
    if (rep.is_reversible) {
        db = check_detailed_balance(sys, x, tol);
        weg = wegscheider_check(sys, tol);
    }
    if (o.json) {
        Json j;
        j["state"] = to_json(x);
        j["complex_balance"] = to_json(cb);
        j["detailed_balance"] = db ? to_json(*db) : Json(nullptr);
        j["wegscheider"] = weg ? to_json(*weg) : Json(nullptr);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "state x = " << vec(x) << "\n";
        std::cout << "complex balanced: " << (cb.balanced ? "yes" : "no") << " (max residual "
                  << format_double(cb.max_residual) << ")\n";
        if (db) {
            std::cout << "detailed balanced: " << (db->balanced ? "yes" : "no") << " (max residual "
                      << format_double(db->max_residual) << ")\n";
            std::cout << "Wegscheider conditions: " << (weg->passed ? "pass" : "fail") << "\n";
        } else {
            std::cout << "detailed balanced: n/a (network not reversible)\n";
        }
    }
    return cb.balanced ? kOk : kNegative;
}

std::vector<double> parse_grid(const std::string& spec)
{
    // kind:lo:hi:n, kind one of log or lin
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 4 || (parts[0] != "log" && parts[0] != "lin"))
        throw ModelError("--grid expects log:LO:HI:N or lin:LO:HI:N");
    const double lo = parse_number_list(parts[1]).at(0);
    const double hi = parse_number_list(parts[2]).at(0);
    const auto n = static_cast<std::size_t>(parse_number_list(parts[3]).at(0));
    if (n == 0 || !(lo < hi)) throw ModelError("--grid needs LO < HI and N >= 1");
    if (parts[0] == "log") {
        if (!(lo > 0)) throw ModelError("log grid needs LO > 0");
        return logspace(lo, hi, n);
    }
    return linspace(lo, hi, n);
}

int cmd_sweep(const Options& o)
{
    const auto doc = load(o.file);
    const auto base = system_of(doc, o);
    if (o.param_edge >= base.network().num_edges()) throw ModelError("--edge is out of range");
    const auto grid = parse_grid(o.grid);
    SystemFamily family = [&](double p) {
        auto rates = base.rates();
        rates[o.param_edge] *= p;
        return base.with_rates(rates);
    };
    SweepOptions opts;
    if (o.query == "st") {
        opts.query = SweepQuery::SingleTarget;
    } else if (o.query != "cb") {
        throw ModelError("--query expects cb or st");
    }
    opts.seed = seed_from_env();
    const auto table = region_sweep(family, grid, opts, tolerances(o));
    if (o.json) {
        std::cout << emit_json(table) << "\n";
        return kOk;
    }
    std::cout << "parameter\tfeasible\tsummary\n";
    for (const auto& r : table.rows) {
        std::cout << format_double(r.parameter) << "\t" << (r.feasible ? "yes" : "no") << "\t"
                  << (r.error ? "error: " + *r.error : r.summary) << "\n";
    }
    for (const auto& b : table.boundaries) {
        std::cout << "boundary in [" << format_double(b.lower) << ", " << format_double(b.upper) << "], feasible "
                  << (b.feasible_above ? "above" : "below") << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Analyze reaction networks under mass-action kinetics"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool rates) {
        sub->add_flag("--json", o.json, "Print JSON instead of text");
        sub->add_option("--tol", o.tol, "Tolerance for balance and equivalence verdicts");
        if (rates) sub->add_option("--rates", o.rates, "Comma-separated rate constants, in edge order");
    };
    auto file_arg = [&](CLI::App* sub) { sub->add_option("file", o.file, "Network file")->required(); };

    auto* analyze = app.add_subcommand("analyze", "Structural report");
    file_arg(analyze);
    common(analyze, false);

    auto* classify = app.add_subcommand("classify", "Stability class of a single-target network");
    file_arg(classify);
    common(classify, false);

    auto* rdb = app.add_subcommand("realize-db", "Dynamically equivalent detailed-balanced system");
    file_arg(rdb);
    common(rdb, true);

    auto* rst = app.add_subcommand("realize-st", "Dynamically equivalent single-target system");
    file_arg(rst);
    common(rst, true);

    auto* rcb = app.add_subcommand("realize-cb", "Dynamically equivalent complex-balanced system");
    file_arg(rcb);
    common(rcb, true);
    rcb->add_option("--steady-state", o.steady_state, "State to test (default: steady states found from --x0)");
    rcb->add_option("--x0", o.x0, "Initial guess for the steady-state search");

    auto* sim = app.add_subcommand("simulate", "Integrate the mass-action ODE, CSV on stdout");
    file_arg(sim);
    common(sim, true);
    sim->add_option("--x0", o.x0, "Initial state (default all ones)");
    sim->add_option("--horizon", o.horizon, "Final time");
    sim->add_option("--record-every", o.record_every, "Keep every k-th accepted step");

    auto* eq = app.add_subcommand("check-equiv", "Dynamical equivalence of two systems");
    eq->add_option("a", o.file, "First system")->required();
    eq->add_option("b", o.file_b, "Second system")->required();
    common(eq, false);

    auto* bal = app.add_subcommand("check-balance", "Detailed and complex balance at a state");
    file_arg(bal);
    common(bal, true);
    bal->add_option("--steady-state", o.steady_state, "State to test (default: a steady state found from --x0)");
    bal->add_option("--x0", o.x0, "Initial guess for the steady-state search");

    auto* sweep = app.add_subcommand("sweep", "Scale one rate over a grid and test feasibility");
    file_arg(sweep);
    common(sweep, true);
    sweep->add_option("--grid", o.grid, "log:LO:HI:N or lin:LO:HI:N");
    sweep->add_option("--edge", o.param_edge, "Edge whose rate is multiplied by the parameter (0-based)");
    sweep->add_option("--query", o.query, "cb (complex-balanced) or st (single-target)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (*analyze) return cmd_analyze(o);
        if (*classify) return cmd_classify(o);
        if (*rdb) return cmd_realize_db(o);
        if (*rst) return cmd_realize_st(o);
        if (*rcb) return cmd_realize_cb(o);
        if (*sim) return cmd_simulate(o);
        if (*eq) return cmd_check_equiv(o);
        if (*bal) return cmd_check_balance(o);
        if (*sweep) return cmd_sweep(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
