#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crn/model.hpp"

namespace crn {

/// A parsed network file: a bare network when no line carries a rate, a system when every line does.
class NetworkDocument {
public:
    NetworkDocument(std::vector<std::string> species, EmbeddedNetwork network);
    NetworkDocument(std::vector<std::string> species, MassActionSystem system);

    bool has_rates() const { return std::holds_alternative<MassActionSystem>(content_); }
    const EmbeddedNetwork& network() const;
    /// Throws ModelError for a bare network.
    const MassActionSystem& system() const;
    /// The system with `rates` substituted (works for bare networks too).
    MassActionSystem with_rates(std::vector<double> rates) const;

    const std::vector<std::string>& species() const { return species_; }
    std::size_t dimension() const { return network().dimension(); }

private:
    std::vector<std::string> species_;
    std::variant<EmbeddedNetwork, MassActionSystem> content_;
};

/// Parses the reaction DSL:
///
///     # comment
///     dim 2
///     species X Y
///     [0,2] -> [1,1] : 1.0
///     X + Y <-> 2 X : 0.5, 2/3
///
/// Numbers may be integers, decimals or ratios (`2/3`); integer and ratio
/// coordinates are kept exact. Throws ParseError (with line and column) or ModelError.
NetworkDocument parse_network(std::string_view text);

/// Parses either the DSL or the JSON network form (detected by a leading `{`).
NetworkDocument parse_network_any(std::string_view text);

NetworkDocument load_network(const std::filesystem::path& path);

/// Reads a network or system from its JSON form (as written by network_json).
NetworkDocument parse_network_json(std::string_view text);

/// Writes the DSL form; rates and coordinates round-trip exactly.
std::string to_dsl(const MassActionSystem& sys, const std::vector<std::string>& species = {});
std::string to_dsl(const EmbeddedNetwork& net, const std::vector<std::string>& species = {});

/// Parses a comma-separated list of numbers (integers, decimals or ratios).
std::vector<double> parse_number_list(std::string_view csv);

}  // namespace crn
