#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "redcalc/minplus.hpp"

namespace redcalc {

struct DelayInterval {
    Q lo;
    Ext hi;
    bool operator==(const DelayInterval& o) const { return lo == o.lo && hi == o.hi; }
};
using PathDelayBounds = DelayInterval;

// Thrown for malformed or inconsistent input; path is a JSON pointer.
class SpecError : public std::runtime_error {
public:
    SpecError(std::string path, const std::string& msg)
        : std::runtime_error(path + ": " + msg), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct Vertex {
    std::string id;
    std::optional<Service> service;
    Q tech_min = 0;
    Q tech_max = 0;
};

struct Edge {
    std::string from;
    std::string to;
    bool lossy = false;
};

struct FlowSpec {
    std::string id;
    std::string source;
    std::vector<std::string> destinations;
    std::vector<std::pair<std::string, std::string>> edges;
    ConcaveCurve arrival;
    Q lmin = 1;
    Q lmax = 1;
    std::map<std::string, Q> deadline;  // per destination
};

enum class FunctionKind { PEF, POF, REG };
enum class RegType { PerFlow, Interleaved };

struct FunctionPlacement {
    FunctionKind kind = FunctionKind::PEF;
    RegType reg_type = RegType::PerFlow;
    std::string vertex;
    std::vector<std::string> flows;
    std::string reference;                     // POF/REG
    std::map<std::string, ConcaveCurve> sigma;  // REG
    Q timeout = 0;                              // POF
};

class FlowGraph {
public:
    explicit FlowGraph(const FlowSpec& f);

    const std::string& source() const { return source_; }
    bool contains(const std::string& v) const { return parents_.count(v) > 0; }
    const std::vector<std::string>& parents(const std::string& v) const { return parents_.at(v); }
    const std::vector<std::string>& children(const std::string& v) const { return children_.at(v); }
    // Topological order starting at the source.
    const std::vector<std::string>& order() const { return order_; }

private:
    std::string source_;
    std::map<std::string, std::vector<std::string>> parents_;
    std::map<std::string, std::vector<std::string>> children_;
    std::vector<std::string> order_;
};

struct NetworkSpec {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<FlowSpec> flows;
    std::vector<FunctionPlacement> placements;

    const Vertex& vertex(const std::string& id) const;
    const FlowSpec& flow(const std::string& id) const;
    bool has_pef(const std::string& flow, const std::string& vertex) const;
    const FunctionPlacement* pof(const std::string& flow, const std::string& vertex) const;
    const FunctionPlacement* reg(const std::string& flow, const std::string& vertex) const;
    std::set<std::string> pef_vertices(const std::string& flow) const;
};

// Vertices that may see a data unit of the flow more than once.
std::set<std::string> ep_vertices(const FlowGraph& g, const std::set<std::string>& pef_vertices);
// Non-EP dominators of n in the flow graph, n included when it is not EP.
std::set<std::string> diamond_ancestors(const FlowGraph& g, const std::set<std::string>& ep, const std::string& n);
// Delay from the output of a to the function pipeline of n, over every a->n
// path; hops are the vertices strictly between a and n.
PathDelayBounds path_delay_bounds(const FlowGraph& g, const std::string& a, const std::string& n,
                                  const std::map<std::string, DelayInterval>& per_hop);
std::vector<std::vector<std::string>> enumerate_paths(const FlowGraph& g, const std::string& a, const std::string& n,
                                                      size_t limit = 100000);

// Structural checks beyond what the JSON loader does: flow DAGs, EP rules,
// function placement constraints.
void validate(const NetworkSpec& net);

}  // namespace redcalc
