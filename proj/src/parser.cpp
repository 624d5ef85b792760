#include "crn/parser.hpp"

#include "crn/error.hpp"
#include "crn/json.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace crn {

NetworkDocument::NetworkDocument(std::vector<std::string> species, EmbeddedNetwork network)
    : species_(std::move(species)), content_(std::move(network))
{
}

NetworkDocument::NetworkDocument(std::vector<std::string> species, MassActionSystem system)
    : species_(std::move(species)), content_(std::move(system))
{
}

const EmbeddedNetwork& NetworkDocument::network() const
{
    if (const auto* s = std::get_if<MassActionSystem>(&content_)) return s->network();
    return std::get<EmbeddedNetwork>(content_);
}

const MassActionSystem& NetworkDocument::system() const
{
    if (const auto* s = std::get_if<MassActionSystem>(&content_)) return *s;
    throw ModelError("document has no rate constants; supply them with --rates");
}

MassActionSystem NetworkDocument::with_rates(std::vector<double> rates) const
{
    return MassActionSystem(network(), std::move(rates));
}

namespace {

struct Number {
    double value = 0.0;
    std::optional<Ratio> exact;
};

class LineCursor {
public:
    LineCursor(std::string_view line, std::size_t lineno) : s_(line), line_(lineno) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, pos_ + 1); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t col) const { throw ParseError(msg, line_, col + 1); }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool at_end()
    {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek()
    {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool consume(std::string_view tok)
    {
        skip_ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view tok)
    {
        if (!consume(tok)) fail("expected '" + std::string(tok) + "'");
    }
    std::size_t pos() const { return pos_; }

    std::optional<std::string> identifier()
    {
        skip_ws();
        if (pos_ >= s_.size() || !(std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            return std::nullopt;
        const auto start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    bool at_number()
    {
        skip_ws();
        if (pos_ >= s_.size()) return false;
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return true;
        if ((c == '-' || c == '+') && pos_ + 1 < s_.size())
            return std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '.';
        return false;
    }

    Number number()
    {
        skip_ws();
        const auto start = pos_;
        if (!at_number()) fail("expected a number");
        if (s_[pos_] == '-' || s_[pos_] == '+') ++pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        std::string lit(s_.substr(start, pos_ - start));
        // ratio literal a/b
        if (pos_ < s_.size() && s_[pos_] == '/' && pos_ + 1 < s_.size() &&
            std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
            ++pos_;
            const auto dstart = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string den(s_.substr(dstart, pos_ - dstart));
            const auto num = to_int(lit);
            const auto d = to_int(den);
            if (!num || !d) fail_at("ratio needs integer numerator and denominator", start);
            if (*d == 0) fail_at("zero denominator", start);
            Ratio r{*num, *d};
            return {r.to_double(), r};
        }
        return from_literal(lit, start);
    }

private:
    static std::optional<std::int64_t> to_int(const std::string& s)
    {
        std::int64_t v = 0;
        const char* b = s.data();
        if (!s.empty() && s[0] == '+') ++b;
        const auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
        return v;
    }

    Number from_literal(const std::string& lit, std::size_t col) const
    {
        if (auto i = to_int(lit)) return {static_cast<double>(*i), Ratio{*i, 1}};
        char* end = nullptr;
        const double v = std::strtod(lit.c_str(), &end);
        if (end != lit.c_str() + lit.size() || !std::isfinite(v)) fail_at("malformed number '" + lit + "'", col);
        // plain decimals are exact ratios over a power of ten
        if (lit.find_first_of("eE") == std::string::npos) {
            const auto dot = lit.find('.');
            std::string digits = lit.substr(0, dot) + lit.substr(dot + 1);
            const auto frac = lit.size() - dot - 1;
            if (digits == "-" || digits == "+" || digits.empty()) fail_at("malformed number '" + lit + "'", col);
            if (frac <= 18) {
                // both parts must be exact doubles so the quotient rounds like strtod
                constexpr std::int64_t kExactLimit = std::int64_t{1} << 53;
                if (auto n = to_int(digits); n && *n < kExactLimit && *n > -kExactLimit && frac <= 15) {
                    std::int64_t den = 1;
                    for (std::size_t k = 0; k < frac; ++k) den *= 10;
                    const Ratio r{*n, den};
                    if (r.to_double() == v) return {v, r};
                }
            }
        }
        return {v, std::nullopt};
    }

    std::string_view s_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

struct Complex {
    std::vector<Number> coords;
    std::size_t column;
};

struct Builder {
    std::optional<std::size_t> dim;
    std::vector<std::string> species;
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<std::optional<double>> rates;

    VertexId vertex_for(const Complex& c)
    {
        bool exact = true;
        for (const auto& x : c.coords) exact = exact && x.exact.has_value();
        std::optional<Vertex> v;
        if (exact) {
            std::vector<Ratio> r;
            for (const auto& x : c.coords) r.push_back(*x.exact);
            v.emplace(std::move(r));
        } else {
            Vector coords(static_cast<Eigen::Index>(c.coords.size()));
            for (std::size_t i = 0; i < c.coords.size(); ++i) coords[static_cast<Eigen::Index>(i)] = c.coords[i].value;
            v.emplace(std::move(coords));
        }
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (vertices[i].same_point(*v) || vertices[i].coords() == v->coords())
                return VertexId{static_cast<std::uint32_t>(i)};
        }
        vertices.push_back(std::move(*v));
        return VertexId{static_cast<std::uint32_t>(vertices.size() - 1)};
    }
};

Complex parse_vector(LineCursor& cur)
{
    Complex c{{}, cur.pos()};
    cur.expect("[");
    if (cur.peek() != ']') {
        c.coords.push_back(cur.number());
        while (cur.consume(",")) c.coords.push_back(cur.number());
    }
    cur.expect("]");
    return c;
}

Number add(const Number& a, const Number& b)
{
    Number out{a.value + b.value, std::nullopt};
    if (a.exact && b.exact) {
        Ratio r{a.exact->num * b.exact->den + b.exact->num * a.exact->den, a.exact->den * b.exact->den};
        out.exact = r;
        out.value = r.to_double();
    }
    return out;
}

Complex parse_species_sum(LineCursor& cur, const std::vector<std::string>& species)
{
    Complex c{std::vector<Number>(species.size(), Number{0.0, Ratio{0, 1}}), cur.pos()};
    if (species.empty()) cur.fail("species notation needs a 'species' header");
    // the zero complex
    if (cur.peek() == '0') {
        const auto save = cur.pos();
        auto n = cur.number();
        if (n.value == 0.0 && !cur.identifier()) return c;
        cur.fail_at("expected a species term", save);
    }
    do {
        Number coef{1.0, Ratio{1, 1}};
        if (cur.at_number()) coef = cur.number();
        const auto col = cur.pos();
        const auto name = cur.identifier();
        if (!name) cur.fail("expected a species name");
        std::size_t idx = species.size();
        for (std::size_t i = 0; i < species.size(); ++i) {
            if (species[i] == *name) idx = i;
        }
        if (idx == species.size()) cur.fail_at("unknown species '" + *name + "'", col);
        c.coords[idx] = add(c.coords[idx], coef);
    } while (cur.consume("+"));
    return c;
}

Complex parse_complex(LineCursor& cur, const Builder& b)
{
    if (cur.peek() == '[') return parse_vector(cur);
    return parse_species_sum(cur, b.species);
}

void check_dim(LineCursor& cur, Builder& b, const Complex& c)
{
    if (!b.dim) {
        if (!b.species.empty()) {
            b.dim = b.species.size();
        } else {
            cur.fail_at("missing 'dim' or 'species' header before the first reaction", c.column);
        }
    }
    if (c.coords.size() != *b.dim)
        cur.fail_at("vector has " + std::to_string(c.coords.size()) + " entries, expected " + std::to_string(*b.dim),
                    c.column);
}

double parse_rate(LineCursor& cur)
{
    cur.skip_ws();
    const auto col = cur.pos();
    const auto n = cur.number();
    if (!(n.value > 0)) cur.fail_at("rate constants must be positive", col);
    return n.value;
}

void parse_line(std::string_view raw, std::size_t lineno, Builder& b)
{
    const auto hash = raw.find('#');
    const auto line = raw.substr(0, hash);
    LineCursor cur(line, lineno);
    if (cur.at_end()) return;

    if (cur.consume("dim ") || cur.consume("dim\t")) {
        const auto col = cur.pos();
        const auto n = cur.number();
        if (!n.exact || n.exact->den != 1 || n.exact->num <= 0) cur.fail_at("dimension must be a positive integer", col);
        if (!b.edges.empty()) cur.fail_at("'dim' must precede reactions", col);
        if (!b.species.empty() && b.species.size() != static_cast<std::size_t>(n.exact->num))
            cur.fail_at("'dim' disagrees with the species count", col);
        b.dim = static_cast<std::size_t>(n.exact->num);
        if (!cur.at_end()) cur.fail("unexpected text after dimension");
        return;
    }
    if (cur.consume("species ") || cur.consume("species\t")) {
        if (!b.edges.empty()) cur.fail("'species' must precede reactions");
        if (!b.species.empty()) cur.fail("duplicate 'species' header");
        while (!cur.at_end()) {
            const auto col = cur.pos();
            auto name = cur.identifier();
            if (!name) cur.fail("expected a species name");
            for (const auto& s : b.species) {
                if (s == *name) cur.fail_at("species '" + *name + "' listed twice", col);
            }
            b.species.push_back(*name);
        }
        if (b.dim && *b.dim != b.species.size()) cur.fail("species count disagrees with 'dim'");
        return;
    }

    const Complex lhs = parse_complex(cur, b);
    check_dim(cur, b, lhs);
    const auto arrow_col = cur.pos();
    bool reversible = false;
    if (cur.consume("<->")) {
        reversible = true;
    } else if (!cur.consume("->")) {
        cur.fail("expected '->' or '<->'");
    }
    const Complex rhs = parse_complex(cur, b);
    check_dim(cur, b, rhs);

    std::optional<double> kf, kr;
    if (cur.consume(":")) {
        kf = parse_rate(cur);
        if (reversible) {
            cur.expect(",");
            kr = parse_rate(cur);
        }
    }
    if (!cur.at_end()) cur.fail("unexpected text at end of reaction");

    const auto s = b.vertex_for(lhs);
    const auto t = b.vertex_for(rhs);
    if (s == t) cur.fail_at("self-loop: source and target coincide", arrow_col);
    auto add_edge = [&](VertexId from, VertexId to, std::optional<double> k) {
        for (const auto& e : b.edges) {
            if (e.source == from && e.target == to) cur.fail_at("duplicate edge", arrow_col);
        }
        b.edges.push_back({from, to});
        b.rates.push_back(k);
    };
    add_edge(s, t, kf);
    if (reversible) add_edge(t, s, kr);
}

}  // namespace

NetworkDocument parse_network(std::string_view text)
{
    Builder b;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        parse_line(line, ++lineno, b);
        start = end + 1;
    }
    if (b.edges.empty()) throw ParseError("document contains no reactions", lineno, 1);

    std::size_t with_rate = 0;
    for (const auto& r : b.rates) with_rate += r.has_value();
    if (with_rate != 0 && with_rate != b.rates.size())
        throw ParseError("either every reaction carries a rate or none does", lineno, 1);

    EmbeddedNetwork net(*b.dim, std::move(b.vertices), std::move(b.edges));
    if (with_rate == 0) return NetworkDocument(std::move(b.species), std::move(net));
    std::vector<double> rates;
    for (const auto& r : b.rates) rates.push_back(*r);
    return NetworkDocument(std::move(b.species), MassActionSystem(std::move(net), std::move(rates)));
}

NetworkDocument parse_network_any(std::string_view text)
{
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return parse_network_json(text);
        break;
    }
    return parse_network(text);
}

NetworkDocument load_network(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_network_any(ss.str());
}

namespace {

Ratio parse_ratio(const std::string& s)
{
    LineCursor cur(s, 1);
    const auto n = cur.number();
    if (!n.exact || !cur.at_end()) throw ParseError("malformed exact coordinate '" + s + "'", 1, 1);
    return *n.exact;
}

}  // namespace

NetworkDocument parse_network_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), 1, e.byte);
    }
    try {
        const auto dim = j.at("dimension").get<std::size_t>();
        std::vector<std::string> species;
        if (j.contains("species")) species = j.at("species").get<std::vector<std::string>>();
        std::vector<Vertex> vertices;
        for (const auto& v : j.at("vertices")) {
            if (v.contains("exact")) {
                std::vector<Ratio> r;
                for (const auto& s : v.at("exact")) r.push_back(parse_ratio(s.get<std::string>()));
                vertices.emplace_back(std::move(r));
            } else {
                const auto c = v.at("coords").get<std::vector<double>>();
                vertices.emplace_back(Vector(Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()))));
            }
        }
        std::vector<Edge> edges;
        std::vector<double> rates;
        bool any_rate = false;
        for (const auto& e : j.at("edges")) {
            edges.push_back({VertexId{e.at("source").get<std::uint32_t>()}, VertexId{e.at("target").get<std::uint32_t>()}});
            if (e.contains("rate")) {
                any_rate = true;
                rates.push_back(e.at("rate").get<double>());
            }
        }
        if (any_rate && rates.size() != edges.size()) throw ParseError("either every edge carries a rate or none does", 1, 1);
        EmbeddedNetwork net(dim, std::move(vertices), std::move(edges));
        if (!any_rate) return NetworkDocument(std::move(species), std::move(net));
        return NetworkDocument(std::move(species), MassActionSystem(std::move(net), std::move(rates)));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network JSON: ") + e.what(), 1, 1);
    }
}

namespace {

std::string coord_string(const Vertex& v, std::size_t i)
{
    if (v.exact()) return (*v.exact())[i].to_string();
    return format_double(v.coords()[static_cast<Eigen::Index>(i)]);
}

std::string vertex_string(const Vertex& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.dimension(); ++i) {
        if (i) s += ", ";
        s += coord_string(v, i);
    }
    return s + "]";
}

std::string dsl(const EmbeddedNetwork& net, const std::vector<double>* rates, const std::vector<std::string>& species)
{
    std::ostringstream os;
    if (!species.empty() && species.size() == net.dimension()) {
        os << "species";
        for (const auto& s : species) os << ' ' << s;
        os << '\n';
    } else {
        os << "dim " << net.dimension() << '\n';
    }
    for (std::size_t i = 0; i < net.num_edges(); ++i) {
        const auto& e = net.edges()[i];
        os << vertex_string(net.vertex(e.source)) << " -> " << vertex_string(net.vertex(e.target));
        if (rates) os << " : " << format_double((*rates)[i]);
        os << '\n';
    }
    return os.str();
}

}  // namespace

std::string to_dsl(const MassActionSystem& sys, const std::vector<std::string>& species)
{
    return dsl(sys.network(), &sys.rates(), species);
}

std::string to_dsl(const EmbeddedNetwork& net, const std::vector<std::string>& species)
{
    return dsl(net, nullptr, species);
}

std::vector<double> parse_number_list(std::string_view csv)
{
    std::vector<double> out;
    LineCursor cur(csv, 1);
    if (cur.at_end()) return out;
    out.push_back(cur.number().value);
    while (cur.consume(",")) out.push_back(cur.number().value);
    if (!cur.at_end()) cur.fail("unexpected text in number list");
    return out;
}

}  // namespace crn
