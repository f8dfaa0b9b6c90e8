#pragma once

#include <json.hpp>
#include <string>

#include "redcalc/minplus.hpp"
#include "redcalc/topology.hpp"

namespace redcalc {

using json = nlohmann::json;

// All readers throw SpecError carrying the JSON pointer of the bad element.
Q q_from_json(const json& j, const std::string& path);
ConcaveCurve curve_from_json(const json& j, const std::string& path);
Service service_from_json(const json& j, const std::string& path);
NetworkSpec network_from_json(const json& j);
NetworkSpec load_network(const std::string& file);
json read_json_file(const std::string& file);

json to_json(const Q& v);
json to_json(const Ext& v);
json to_json(const ConcaveCurve& c);
json to_json(const Service& s);
json to_json(const DelayInterval& d);
json to_json(const NetworkSpec& net);

}  // namespace redcalc
