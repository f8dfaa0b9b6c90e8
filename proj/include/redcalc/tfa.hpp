#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "redcalc/io.hpp"
#include "redcalc/redundancy.hpp"
#include "redcalc/regulators.hpp"
#include "redcalc/topology.hpp"

namespace redcalc {

enum class PefModel { Tight, Intuitive };
enum class Convergence { Converged, Diverged, IterationCap };

const char* to_string(PefModel m);
const char* to_string(Convergence c);

struct AnalysisOptions {
    PefModel model = PefModel::Tight;
    // Unset means no assumption: bounds use the lossy variant and POF entries
    // list both.
    std::optional<bool> lossless;
    size_t iteration_cap = 1000;
    Q burst_cap = 1000000000;
};

// Raised when a shaping curve is not an arrival curve at its reference.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VertexReport {
    std::string vertex;
    DelayInterval delay;  // queueing + technological latency
    ConcaveCurve aggregate;
};

struct ReorderingEntry {
    std::string reference;
    Q rto;
    Ext rbo;
};

struct PefReport {
    std::string vertex;
    std::string flow;
    ConcaveCurve input;
    ConcaveCurve tight;
    ConcaveCurve intuitive;
    std::vector<ReorderingEntry> reordering;
};

struct PofReport {
    std::string vertex;
    std::string flow;
    std::string reference;
    Q timeout;
    PathDelayBounds upstream;
    Q rto;
    Ext rbo;
    bool timeout_sufficient = true;
    ConcaveCurve output_lossless;
    ConcaveCurve output_lossy;
};

struct RegReport {
    std::string vertex;
    std::string flow;
    std::string type;
    std::string reference;
    PathDelayBounds upstream;
    RegulatorVerdict verdict;
};

struct EteReport {
    std::string flow;
    std::string destination;
    DelayInterval bounds;
    std::optional<Q> deadline;
    std::string verdict;  // met | violated | unbounded | no-deadline
};

struct AnalysisReport {
    PefModel model = PefModel::Tight;
    std::optional<bool> lossless;
    Convergence convergence = Convergence::Converged;
    size_t iterations = 0;
    std::vector<std::string> diagnostics;
    std::vector<VertexReport> vertices;
    std::vector<EteReport> ete;
    std::vector<PefReport> pefs;
    std::vector<PofReport> pofs;
    std::vector<RegReport> regs;
    // Arrival curve of each flow at the output of each vertex it crosses.
    std::map<std::string, std::map<std::string, ConcaveCurve>> flow_curves;
    // Per-flow per-hop delay intervals (pipeline + queueing + technology).
    std::map<std::string, std::map<std::string, DelayInterval>> per_hop;

    bool all_ok() const;
    const EteReport* find_ete(const std::string& flow, const std::string& dst) const;
    const PefReport* find_pef(const std::string& flow, const std::string& vertex) const;
};

DelayInterval vertex_delay(const Vertex& v, const ConcaveCurve& aggregate);
AnalysisReport analyze(const NetworkSpec& net, const AnalysisOptions& opts);

struct ModelComparison {
    AnalysisReport tight;
    AnalysisReport intuitive;
};
ModelComparison compare_models(const NetworkSpec& net, AnalysisOptions opts);

json to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const json& j);
std::string to_csv(const AnalysisReport& r);

}  // namespace redcalc
