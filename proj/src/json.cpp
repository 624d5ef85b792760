#include "crn/json.hpp"

namespace crn {

std::string format_double(double v)
{
    return Json(v).dump();
}

namespace {

Json ids(const std::vector<VertexId>& v)
{
    Json out = Json::array();
    for (auto id : v) out.push_back(id.value);
    return out;
}

Json matrix_columns(const Matrix& m)
{
    Json out = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(to_json(Vector(m.col(j))));
    return out;
}

template <class T>
Json optional_json(const std::optional<T>& v)
{
    return v ? to_json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const Vector& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

namespace {

Json network_body(const EmbeddedNetwork& net, const std::vector<double>* rates, const std::vector<std::string>& species)
{
    Json out;
    out["kind"] = rates ? "mass_action_system" : "network";
    out["dimension"] = net.dimension();
    out["species"] = species;
    Json verts = Json::array();
    for (const auto& v : net.vertices()) {
        Json jv;
        jv["coords"] = to_json(v.coords());
        if (v.exact()) {
            Json ex = Json::array();
            for (const auto& r : *v.exact()) ex.push_back(r.to_string());
            jv["exact"] = ex;
        }
        verts.push_back(jv);
    }
    out["vertices"] = verts;
    Json edges = Json::array();
    for (std::size_t i = 0; i < net.num_edges(); ++i) {
        Json je;
        je["source"] = net.edges()[i].source.value;
        je["target"] = net.edges()[i].target.value;
        if (rates) je["rate"] = (*rates)[i];
        edges.push_back(je);
    }
    out["edges"] = edges;
    return out;
}

}  // namespace

Json to_json(const EmbeddedNetwork& net, const std::vector<std::string>& species)
{
    return network_body(net, nullptr, species);
}

Json to_json(const MassActionSystem& sys, const std::vector<std::string>& species)
{
    return network_body(sys.network(), &sys.rates(), species);
}

Json to_json(const StructureReport& r)
{
    Json out;
    out["sources"] = ids(r.source_ids);
    out["num_vertices"] = r.num_vertices;
    out["num_components"] = r.num_components;
    out["stoichiometric_dimension"] = r.stoich_dim;
    out["deficiency"] = r.deficiency;
    out["reversible"] = r.is_reversible;
    out["weakly_reversible"] = r.is_weakly_reversible;
    out["single_target"] = r.is_single_target;
    out["target"] = r.target_id ? Json(r.target_id->value) : Json(nullptr);
    out["power_law"] = r.is_power_law;
    out["exact_rank"] = r.exact_rank;
    return out;
}

Json to_json(const PolytopeMembership& m)
{
    Json out;
    out["status"] = to_string(m.status);
    out["sources"] = ids(m.sources);
    out["barycentric"] = optional_json(m.barycentric);
    out["separating_direction"] = optional_json(m.separating);
    return out;
}

Json to_json(const SingleTargetVerdict& v)
{
    Json out;
    out["verdict"] = to_string(v.verdict);
    out["target"] = v.target.value;
    out["membership"] = to_json(v.membership);
    out["steady_state_flux"] = optional_json(v.steady_state_flux);
    return out;
}

Json to_json(const BirchSolution& b)
{
    Json out;
    out["kappa_prime"] = to_json(b.kappa_prime);
    out["mu"] = to_json(b.mu);
    out["steady_state"] = to_json(b.steady_state);
    out["residual"] = b.residual;
    out["iterations"] = b.iterations;
    return out;
}

Json to_json(const DBRealization& r)
{
    Json out;
    out["target"] = r.target.value;
    out["steady_state"] = to_json(r.steady_state);
    out["reverse_rates"] = to_json(r.reverse_rates);
    out["equivalence_residual"] = r.equivalence_residual;
    out["balance_residual"] = r.balance_residual;
    out["system"] = to_json(r.system);
    return out;
}

Json to_json(const DetailedBalanceReport& r)
{
    Json out;
    out["balanced"] = r.balanced;
    out["max_residual"] = r.max_residual;
    Json pairs = Json::array();
    for (const auto& p : r.pairs) {
        Json jp;
        jp["forward_edge"] = p.forward_edge;
        jp["reverse_edge"] = p.reverse_edge;
        jp["residual"] = p.residual;
        pairs.push_back(jp);
    }
    out["pairs"] = pairs;
    return out;
}

Json to_json(const ComplexBalanceReport& r)
{
    Json out;
    out["balanced"] = r.balanced;
    out["max_residual"] = r.max_residual;
    Json verts = Json::array();
    for (const auto& v : r.vertices) {
        Json jv;
        jv["vertex"] = v.vertex.value;
        jv["inflow"] = v.inflow;
        jv["outflow"] = v.outflow;
        jv["residual"] = v.residual;
        verts.push_back(jv);
    }
    out["vertices"] = verts;
    return out;
}

Json to_json(const WegscheiderResult& r)
{
    Json out;
    out["passed"] = r.passed;
    out["forward_edges"] = r.forward_edges;
    out["kernel"] = matrix_columns(r.kernel);
    out["violating"] = optional_json(r.violating);
    out["violation"] = r.violation;
    return out;
}

Json to_json(const CircuitResult& r)
{
    Json out;
    out["passed"] = r.passed;
    out["log_forward"] = r.log_forward;
    out["log_reverse"] = r.log_reverse;
    return out;
}

Json to_json(const Trajectory& t)
{
    Json out;
    out["verdict"] = to_string(t.verdict);
    out["limit"] = optional_json(t.limit);
    out["exit_face"] = t.exit_face ? Json(*t.exit_face) : Json(nullptr);
    out["conservation_drift"] = t.conservation_drift;
    out["steps"] = t.steps;
    out["rejected"] = t.rejected;
    out["times"] = t.times;
    Json states = Json::array();
    for (const auto& s : t.states) states.push_back(to_json(s));
    out["states"] = states;
    return out;
}

Json to_json(const EquivalenceResult& r)
{
    Json out;
    out["equivalent"] = r.equivalent;
    out["max_residual"] = r.max_residual;
    Json rows = Json::array();
    for (const auto& m : r.residuals) {
        Json jm;
        jm["vertex"] = m.vertex;
        jm["residual"] = m.residual;
        rows.push_back(jm);
    }
    out["vertices"] = rows;
    return out;
}

Json to_json(const SingleTargetRealization& r)
{
    Json out;
    out["target"] = to_json(r.target);
    out["sources"] = ids(r.sources);
    out["rates"] = r.rates;
    out["residual"] = r.residual;
    out["system"] = to_json(r.system);
    return out;
}

Json to_json(const CBFeasibility& r)
{
    Json out;
    out["feasible"] = r.feasible;
    out["state_is_steady"] = r.state_is_steady;
    out["steady_state"] = to_json(r.steady_state_used);
    Json src = Json::array();
    for (const auto& s : r.sources) src.push_back(to_json(s));
    out["sources"] = src;
    Json flux = Json::array();
    for (const auto& e : r.flux_witness) {
        Json je;
        je["from"] = e.from;
        je["to"] = e.to;
        je["flux"] = e.flux;
        je["rate"] = e.rate;
        flux.push_back(je);
    }
    out["flux"] = flux;
    out["residual"] = r.residual;
    out["realized"] = optional_json(r.realized);
    return out;
}

Json to_json(const SweepTable& t)
{
    Json out;
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        Json jr;
        jr["parameter"] = r.parameter;
        jr["feasible"] = r.feasible;
        jr["summary"] = r.summary;
        jr["error"] = r.error ? Json(*r.error) : Json(nullptr);
        rows.push_back(jr);
    }
    out["rows"] = rows;
    Json bounds = Json::array();
    for (const auto& b : t.boundaries) {
        Json jb;
        jb["lower"] = b.lower;
        jb["upper"] = b.upper;
        jb["feasible_above"] = b.feasible_above;
        bounds.push_back(jb);
    }
    out["boundaries"] = bounds;
    return out;
}

}  // namespace crn
