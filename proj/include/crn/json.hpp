#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "crn/balancing.hpp"
#include "crn/dynamics.hpp"
#include "crn/equivalence.hpp"
#include "crn/geometry.hpp"
#include "crn/model.hpp"

namespace crn {

using Json = nlohmann::ordered_json;

/// Shortest decimal that reads back to the same double; integral values keep a trailing ".0".
std::string format_double(double v);

Json to_json(const Vector& v);
Json to_json(const EmbeddedNetwork& net, const std::vector<std::string>& species = {});
Json to_json(const MassActionSystem& sys, const std::vector<std::string>& species = {});
Json to_json(const StructureReport& r);
Json to_json(const PolytopeMembership& m);
Json to_json(const SingleTargetVerdict& v);
Json to_json(const BirchSolution& b);
Json to_json(const DBRealization& r);
Json to_json(const DetailedBalanceReport& r);
Json to_json(const ComplexBalanceReport& r);
Json to_json(const WegscheiderResult& r);
Json to_json(const CircuitResult& r);
Json to_json(const Trajectory& t);
Json to_json(const EquivalenceResult& r);
Json to_json(const SingleTargetRealization& r);
Json to_json(const CBFeasibility& r);
Json to_json(const SweepTable& t);

/// Pretty-printed JSON with a stable key order.
template <class T>
std::string emit_json(const T& value)
{
    return to_json(value).dump(2);
}

}  // namespace crn
