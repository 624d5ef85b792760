#include <doctest.h>

#include "crn/error.hpp"
#include "crn/json.hpp"
#include "crn/parser.hpp"
#include "support.hpp"

#include <filesystem>

using namespace crn;
using namespace crn::testing;

namespace {

// Exactness survives JSON; the DSL may promote a short decimal to an exact ratio.
void check_identical(const MassActionSystem& a, const MassActionSystem& b, bool same_exactness = true)
{
    const auto& na = a.network();
    const auto& nb = b.network();
    REQUIRE(na.dimension() == nb.dimension());
    REQUIRE(na.num_vertices() == nb.num_vertices());
    REQUIRE(na.num_edges() == nb.num_edges());
    for (std::size_t i = 0; i < na.num_vertices(); ++i) {
        const auto& va = na.vertices()[i];
        const auto& vb = nb.vertices()[i];
        for (std::size_t k = 0; k < na.dimension(); ++k) {
            // bitwise equality
            CHECK(va.coords()[static_cast<Eigen::Index>(k)] == vb.coords()[static_cast<Eigen::Index>(k)]);
        }
        if (same_exactness || va.exact()) CHECK(va.exact().has_value() == vb.exact().has_value());
    }
    for (std::size_t i = 0; i < na.num_edges(); ++i) {
        CHECK(na.edges()[i] == nb.edges()[i]);
        CHECK(a.rate(i) == b.rate(i));
    }
}

ParseError parse_error(const std::string& text)
{
    try {
        parse_network(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error for: " << text);
    return ParseError("", 0, 0);
}

}  // namespace

TEST_CASE("single coordinate line")
{
    const auto doc = parse_network("dim 2\n[0,2] -> [1,1] : 1.0");
    REQUIRE(doc.has_rates());
    const auto& sys = doc.system();
    CHECK(sys.network().num_edges() == 1);
    CHECK(sys.rate(0) == 1.0);
    CHECK(sys.network().vertices()[0].coords() == Vector::Map(std::vector<double>{0, 2}.data(), 2));
}

TEST_CASE("species sugar desugars to coordinates")
{
    const auto doc = parse_network("species X1 X2\nX1 + X2 -> 2 X1 : 0.5");
    const auto& net = doc.network();
    REQUIRE(net.num_vertices() == 2);
    CHECK(net.vertices()[0].coords()[0] == 1.0);
    CHECK(net.vertices()[0].coords()[1] == 1.0);
    CHECK(net.vertices()[1].coords()[0] == 2.0);
    CHECK(net.vertices()[1].coords()[1] == 0.0);
    CHECK(net.num_edges() == 1);
    CHECK(doc.species() == std::vector<std::string>{"X1", "X2"});
}

TEST_CASE("negative exponents are accepted and flagged power-law")
{
    const auto doc = parse_network("dim 3\n[-1,-2,0] -> [0,0,0] : 2.0");
    CHECK(doc.network().is_power_law());
    CHECK(classify_structure(doc.network()).is_power_law);
}

TEST_CASE("bare networks, reversible sugar and the zero complex")
{
    const auto bare = parse_network("species A B\nA -> B\n");
    CHECK_FALSE(bare.has_rates());
    CHECK_THROWS_AS(bare.system(), ModelError);
    CHECK(bare.with_rates({2.0}).rate(0) == 2.0);

    const auto rev = parse_network("species A B\n0 <-> A + B : 1, 2/3  # comment\n");
    REQUIRE(rev.network().num_edges() == 2);
    CHECK(rev.system().rate(1) == doctest::Approx(2.0 / 3));
    CHECK(rev.network().edges()[1].source == rev.network().edges()[0].target);
    CHECK(rev.network().vertices()[0].coords().isZero());
}

TEST_CASE("ratio and decimal coordinates stay exact")
{
    const auto doc = parse_network("dim 2\n[1/3, 0.25] -> [2, 0] : 1\n[0, 0] -> [2, 0] : 1\n");
    const auto& v = doc.network().vertices()[0];
    REQUIRE(v.exact());
    CHECK((*v.exact())[0] == Ratio{1, 3});
    CHECK((*v.exact())[1] == Ratio{1, 4});
    CHECK(doc.network().all_exact());
}

TEST_CASE("repeated complexes share one vertex")
{
    const auto doc = parse_network("dim 1\n[0] -> [1] : 1\n[2] -> [1] : 1\n[2/2] -> [3] : 1\n");
    CHECK(doc.network().num_vertices() == 4);
    CHECK(doc.network().edges()[2].source.value == 1);
}

TEST_CASE("errors carry line and column")
{
    auto e = parse_error("dim 2\n[0,2] -> [1,1,1] : 1\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 10);

    e = parse_error("dim 2\n[0,2] => [1,1] : 1\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);

    e = parse_error("dim 2\n\n[0,2] -> [1,1] : 0\n");
    CHECK(e.line() == 3);
    CHECK(e.column() == 18);

    e = parse_error("dim 2\n[0,2] -> [1,1] : -1\n");
    CHECK(e.line() == 2);

    e = parse_error("dim 2\n[0,2] -> [0,2] : 1\n");
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("self-loop") != std::string::npos);

    e = parse_error("dim 2\n[0,2] -> [1,1] : 1\n[0,2] -> [1,1] : 2\n");
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);

    e = parse_error("dim 2\n[0,2] -> [1,1] : 1\n[1,1] -> [2,0]\n");
    CHECK(std::string(e.what()).find("rate") != std::string::npos);

    e = parse_error("species X\nX + Z -> 0 : 1\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 5);

    e = parse_error("[0] -> [1] : 1\n");
    CHECK(e.line() == 1);

    e = parse_error("dim 1\n[1/0] -> [1] : 1\n");
    CHECK(e.line() == 2);

    e = parse_error("dim 1\n[0] -> [1] : 1 extra\n");
    CHECK(e.line() == 2);

    e = parse_error("# nothing here\n");
    CHECK(std::string(e.what()).find("no reactions") != std::string::npos);

    CHECK_THROWS_AS(parse_network("dim 0\n"), ParseError);
    CHECK_THROWS_AS(parse_network("dim 2\nspecies A B C\n"), ParseError);
}

TEST_CASE("number lists")
{
    const auto v = parse_number_list("1, 2/3,0.5, 1e-3");
    REQUIRE(v.size() == 4);
    CHECK(v[1] == doctest::Approx(2.0 / 3));
    CHECK(v[3] == 1e-3);
    CHECK(parse_number_list("").empty());
    CHECK_THROWS_AS(parse_number_list("1,,2"), ParseError);
    CHECK_THROWS_AS(parse_number_list("1 2"), ParseError);
}

TEST_CASE("emit_json examples")
{
    const auto doc = parse_network("species A B\nA -> B : 1\n");
    const auto report = emit_json(classify_structure(doc.network()));
    CHECK(report.find("\"deficiency\": 0") != std::string::npos);

    Vector flux(2);
    flux << 1.0, 2.0;
    CHECK(to_json(flux).dump() == "[1.0,2.0]");
    CHECK(Json::parse(emit_json(flux)) == Json::parse("[1.0, 2.0]"));
}

TEST_CASE("formatted doubles read back exactly")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::exp(u(rng)) * (i % 2 ? 1 : -1);
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(1.0) == "1.0");
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("JSON round trip on every bundled network")
{
    for (const auto& entry : std::filesystem::directory_iterator(CRN_NETWORKS_DIR)) {
        if (entry.path().extension() != ".crn") continue;
        CAPTURE(entry.path().string());
        const auto doc = load_network(entry.path());
        REQUIRE(doc.has_rates());
        const auto text = to_json(doc.system(), doc.species()).dump(2);
        const auto back = parse_network_any(text);
        check_identical(doc.system(), back.system());
        CHECK(back.species() == doc.species());
        // emitting twice gives identical bytes
        CHECK(to_json(back.system(), back.species()).dump(2) == text);
    }
}

TEST_CASE("DSL round trip on every bundled network")
{
    for (const auto& entry : std::filesystem::directory_iterator(CRN_NETWORKS_DIR)) {
        if (entry.path().extension() != ".crn") continue;
        CAPTURE(entry.path().string());
        const auto doc = load_network(entry.path());
        const auto back = parse_network(to_dsl(doc.system(), doc.species()));
        check_identical(doc.system(), back.system());
    }
}

TEST_CASE("round trip on random systems with inexact values")
{
    std::mt19937 rng(17);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        std::vector<Vertex> vertices;
        for (int i = 0; i < 3; ++i) {
            Vector c(static_cast<Eigen::Index>(n));
            for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = g(rng);
            vertices.emplace_back(c);
        }
        const MassActionSystem sys(
            EmbeddedNetwork(n, vertices, {{VertexId{0}, VertexId{1}}, {VertexId{1}, VertexId{2}}, {VertexId{2}, VertexId{0}}}),
            {log_uniform(rng, 1e-3, 1e3), log_uniform(rng, 1e-3, 1e3), log_uniform(rng, 1e-3, 1e3)});
        check_identical(sys, parse_network_json(to_json(sys).dump()).system());
        check_identical(sys, parse_network(to_dsl(sys)).system(), false);
    }
}

TEST_CASE("the parser never builds an invalid system")
{
    // random reaction lines, some malformed: whatever parses must satisfy the model invariants
    std::mt19937 rng(23);
    const std::vector<std::string> vecs{"[0,1]", "[1,0]", "[1,1]", "[0,0]", "[2,-1]", "[1]", "[1/2,0]"};
    const std::vector<std::string> arrows{"->", "<->", "->", "=>"};
    const std::vector<std::string> rates{"", ": 1", ": -1", ": 0", ": 2/3", ": 1, 2", ": 1,"};
    auto pick = [&](const std::vector<std::string>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    };
    int parsed = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        std::string text = "dim 2\n";
        for (int k = 0; k < 3; ++k) text += pick(vecs) + " " + pick(arrows) + " " + pick(vecs) + " " + pick(rates) + "\n";
        try {
            const auto doc = parse_network(text);
            ++parsed;
            const auto& net = doc.network();
            CHECK(net.num_edges() > 0);
            for (const auto& e : net.edges()) CHECK(e.source != e.target);
            if (doc.has_rates()) {
                for (double r : doc.system().rates()) CHECK(r > 0);
            }
        } catch (const ParseError&) {
        } catch (const ModelError&) {
        }
    }
    CHECK(parsed > 0);
}

TEST_CASE("JSON parse errors")
{
    CHECK_THROWS_AS(parse_network_json("{\"dimension\": 2"), ParseError);
    CHECK_THROWS_AS(parse_network_json("{\"dimension\": 2}"), ParseError);
    CHECK_THROWS_AS(
        parse_network_json(R"({"dimension":1,"vertices":[{"coords":[0]},{"coords":[1]}],"edges":[{"source":0,"target":1,"rate":-1}]})"),
        ModelError);
}
