#include "redcalc/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace redcalc {

namespace {

const json& member(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw SpecError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SpecError(path + "/" + key, "missing field");
    return *it;
}

std::string str(const json& j, const std::string& path) {
    if (!j.is_string()) throw SpecError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<std::string> str_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw SpecError(path, "expected an array");
    std::vector<std::string> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(str(j[i], path + "/" + std::to_string(i)));
    return out;
}

TokenBucket bucket_from_json(const json& j, const std::string& path) {
    return {q_from_json(member(j, "rate", path), path + "/rate"), q_from_json(member(j, "burst", path), path + "/burst")};
}

Vertex vertex_from_json(const json& j, const std::string& path) {
    Vertex v;
    if (j.is_string()) {
        v.id = j.get<std::string>();
        return v;
    }
    v.id = str(member(j, "id", path), path + "/id");
    if (auto it = j.find("tech"); it != j.end()) {
        if (!it->is_array() || it->size() != 2) throw SpecError(path + "/tech", "expected [min, max]");
        v.tech_min = q_from_json((*it)[0], path + "/tech/0");
        v.tech_max = q_from_json((*it)[1], path + "/tech/1");
    }
    if (auto it = j.find("service"); it != j.end() && !it->is_null())
        v.service = service_from_json(*it, path + "/service");
    return v;
}

std::pair<std::string, std::string> edge_pair(const json& j, const std::string& path) {
    if (j.is_array() && j.size() == 2) return {str(j[0], path + "/0"), str(j[1], path + "/1")};
    return {str(member(j, "from", path), path + "/from"), str(member(j, "to", path), path + "/to")};
}

FlowSpec flow_from_json(const json& j, const std::string& path) {
    FlowSpec f;
    f.id = str(member(j, "id", path), path + "/id");
    f.source = str(member(j, "source", path), path + "/source");
    f.destinations = str_list(member(j, "destinations", path), path + "/destinations");
    const json& es = member(j, "edges", path);
    if (!es.is_array()) throw SpecError(path + "/edges", "expected an array");
    for (size_t i = 0; i < es.size(); ++i) f.edges.push_back(edge_pair(es[i], path + "/edges/" + std::to_string(i)));
    f.arrival = curve_from_json(member(j, "arrival", path), path + "/arrival");
    if (j.contains("lmin")) f.lmin = q_from_json(j["lmin"], path + "/lmin");
    if (j.contains("lmax")) f.lmax = q_from_json(j["lmax"], path + "/lmax");
    else f.lmax = f.lmin;
    if (auto it = j.find("deadline"); it != j.end() && !it->is_null()) {
        if (it->is_object()) {
            for (auto& [k, v] : it->items()) f.deadline[k] = q_from_json(v, path + "/deadline/" + k);
        } else {
            Q d = q_from_json(*it, path + "/deadline");
            for (const auto& dst : f.destinations) f.deadline[dst] = d;
        }
    }
    return f;
}

FunctionPlacement placement_from_json(const json& j, const std::string& path) {
    FunctionPlacement p;
    std::string kind = str(member(j, "kind", path), path + "/kind");
    if (kind == "PEF") p.kind = FunctionKind::PEF;
    else if (kind == "POF") p.kind = FunctionKind::POF;
    else if (kind == "REG") p.kind = FunctionKind::REG;
    else throw SpecError(path + "/kind", "expected PEF, POF or REG");
    p.vertex = str(member(j, "vertex", path), path + "/vertex");
    p.flows = str_list(member(j, "flows", path), path + "/flows");
    if (p.kind == FunctionKind::PEF) return p;
    p.reference = str(member(j, "reference", path), path + "/reference");
    if (p.kind == FunctionKind::POF) {
        p.timeout = q_from_json(member(j, "timeout", path), path + "/timeout");
        return p;
    }
    std::string type = j.value("type", std::string("per-flow"));
    if (type == "per-flow") p.reg_type = RegType::PerFlow;
    else if (type == "interleaved") p.reg_type = RegType::Interleaved;
    else throw SpecError(path + "/type", "expected per-flow or interleaved");
    const json& sg = member(j, "sigma", path);
    if (!sg.is_object()) throw SpecError(path + "/sigma", "expected an object keyed by flow id");
    for (auto& [k, v] : sg.items()) p.sigma.emplace(k, curve_from_json(v, path + "/sigma/" + k));
    return p;
}

}  // namespace

Q q_from_json(const json& j, const std::string& path) {
    try {
        if (j.is_string()) return parse_q(j.get<std::string>());
        if (j.is_number_integer()) return Q(j.dump());
        if (j.is_number_float()) return parse_q(j.dump());
    } catch (const std::invalid_argument& e) {
        throw SpecError(path, e.what());
    }
    throw SpecError(path, "expected a rational (number or \"p/q\" string)");
}

ConcaveCurve curve_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw SpecError(path, "expected a curve object");
    std::vector<TokenBucket> segs;
    if (auto it = j.find("segments"); it != j.end()) {
        if (!it->is_array() || it->empty()) throw SpecError(path + "/segments", "expected a nonempty array");
        for (size_t i = 0; i < it->size(); ++i)
            segs.push_back(bucket_from_json((*it)[i], path + "/segments/" + std::to_string(i)));
    } else {
        segs.push_back(bucket_from_json(j, path));
    }
    try {
        return ConcaveCurve(std::move(segs));
    } catch (const std::invalid_argument& e) {
        throw SpecError(path, e.what());
    }
}

Service service_from_json(const json& j, const std::string& path) {
    if (j.is_object() && j.contains("latency")) {
        RateLatency rl{q_from_json(j["rate"], path + "/rate"), q_from_json(j["latency"], path + "/latency")};
        if (!(rl.rate > 0) || rl.latency < 0) throw SpecError(path, "rate-latency needs rate > 0 and latency >= 0");
        return rl;
    }
    return curve_from_json(j, path);
}

NetworkSpec network_from_json(const json& j) {
    NetworkSpec net;
    if (!j.is_object()) throw SpecError("", "expected a JSON object");
    const json& vs = member(j, "vertices", "");
    if (!vs.is_array()) throw SpecError("/vertices", "expected an array");
    for (size_t i = 0; i < vs.size(); ++i) net.vertices.push_back(vertex_from_json(vs[i], "/vertices/" + std::to_string(i)));
    if (auto it = j.find("edges"); it != j.end()) {
        if (!it->is_array()) throw SpecError("/edges", "expected an array");
        for (size_t i = 0; i < it->size(); ++i) {
            std::string p = "/edges/" + std::to_string(i);
            Edge e;
            std::tie(e.from, e.to) = edge_pair((*it)[i], p);
            if ((*it)[i].is_object()) e.lossy = (*it)[i].value("lossy", false);
            net.edges.push_back(e);
        }
    }
    if (auto it = j.find("flows"); it != j.end()) {
        if (!it->is_array()) throw SpecError("/flows", "expected an array");
        for (size_t i = 0; i < it->size(); ++i) net.flows.push_back(flow_from_json((*it)[i], "/flows/" + std::to_string(i)));
    }
    if (auto it = j.find("placements"); it != j.end()) {
        if (!it->is_array()) throw SpecError("/placements", "expected an array");
        for (size_t i = 0; i < it->size(); ++i)
            net.placements.push_back(placement_from_json((*it)[i], "/placements/" + std::to_string(i)));
    }
    // Without an explicit edge list the network is the union of the flow graphs.
    if (!j.contains("edges")) {
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& f : net.flows)
            for (const auto& e : f.edges)
                if (seen.insert(e).second) net.edges.push_back({e.first, e.second, false});
    }
    validate(net);
    return net;
}

json read_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw SpecError("", "cannot open " + file);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SpecError("", file + ": " + e.what());
    }
}

NetworkSpec load_network(const std::string& file) { return network_from_json(read_json_file(file)); }

json to_json(const Q& v) { return to_string(v); }
json to_json(const Ext& v) { return to_string(v); }

json to_json(const ConcaveCurve& c) {
    json segs = json::array();
    for (const auto& s : c.segments()) segs.push_back({{"rate", to_string(s.rate)}, {"burst", to_string(s.burst)}});
    return {{"segments", segs}};
}

json to_json(const Service& s) {
    if (auto rl = std::get_if<RateLatency>(&s)) return {{"rate", to_string(rl->rate)}, {"latency", to_string(rl->latency)}};
    return to_json(std::get<ConcaveCurve>(s));
}

json to_json(const DelayInterval& d) { return json::array({to_string(d.lo), to_string(d.hi)}); }

json to_json(const NetworkSpec& net) {
    json j;
    j["vertices"] = json::array();
    for (const auto& v : net.vertices) {
        json jv{{"id", v.id}, {"tech", json::array({to_string(v.tech_min), to_string(v.tech_max)})}};
        if (v.service) jv["service"] = to_json(*v.service);
        j["vertices"].push_back(jv);
    }
    j["edges"] = json::array();
    for (const auto& e : net.edges) j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"lossy", e.lossy}});
    j["flows"] = json::array();
    for (const auto& f : net.flows) {
        json jf{{"id", f.id}, {"source", f.source}, {"destinations", f.destinations}, {"arrival", to_json(f.arrival)},
                {"lmin", to_string(f.lmin)}, {"lmax", to_string(f.lmax)}};
        jf["edges"] = json::array();
        for (const auto& [a, b] : f.edges) jf["edges"].push_back(json::array({a, b}));
        if (!f.deadline.empty()) {
            json d = json::object();
            for (const auto& [k, v] : f.deadline) d[k] = to_string(v);
            jf["deadline"] = d;
        }
        j["flows"].push_back(jf);
    }
    j["placements"] = json::array();
    for (const auto& p : net.placements) {
        json jp{{"vertex", p.vertex}, {"flows", p.flows}};
        if (p.kind == FunctionKind::PEF) {
            jp["kind"] = "PEF";
        } else if (p.kind == FunctionKind::POF) {
            jp["kind"] = "POF";
            jp["reference"] = p.reference;
            jp["timeout"] = to_string(p.timeout);
        } else {
            jp["kind"] = "REG";
            jp["type"] = p.reg_type == RegType::PerFlow ? "per-flow" : "interleaved";
            jp["reference"] = p.reference;
            json s = json::object();
            for (const auto& [k, c] : p.sigma) s[k] = to_json(c);
            jp["sigma"] = s;
        }
        j["placements"].push_back(jp);
    }
    return j;
}

}  // namespace redcalc
