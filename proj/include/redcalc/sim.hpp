#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "redcalc/io.hpp"
#include "redcalc/minplus.hpp"

namespace redcalc {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DataUnit {
    long id = 0;
    std::string flow;
    Q time;  // emission at the reference point
    Q size;
};

struct PathAction {
    bool drop = false;
    Q delay;
    static PathAction forward(Q d) { return {false, std::move(d)}; }
    static PathAction dropped() { return {true, 0}; }
};

struct PathSchedule {
    std::string name;
    Q d;
    Q D;
    bool fifo = false;  // claim: forwarded units keep their emission order
    std::optional<PathAction> fallback;
    std::map<long, PathAction> actions;

    const PathAction& action(long unit) const;
};

enum class StageKind { PEF, POF, PFR, IR };

struct Stage {
    StageKind kind = StageKind::PEF;
    Ext timeout;            // POF
    bool per_flow = false;  // POF: order enforced per flow instead of on the aggregate
    std::map<std::string, ConcaveCurve> sigma;  // PFR / IR
};

struct Scenario {
    std::string name;
    std::string note;
    std::vector<DataUnit> units;
    std::vector<PathSchedule> paths;
    std::vector<Stage> pipeline;
    bool zero_size_units = false;
    // Optional link to a network description for cross-checking.
    std::string network;
    std::string vertex;
};

enum class EventKind { Generated, BranchExit, PefExit, PofExit, RegExit };
const char* to_string(EventKind k);

struct TraceEvent {
    Q time;
    EventKind kind;
    std::string point;
    long unit;
    std::string flow;
    Q size;
};

struct Trace {
    std::vector<TraceEvent> events;
    std::vector<std::string> points;  // in pipeline order
    std::vector<std::string> warnings;

    std::vector<TraceEvent> at(const std::string& point) const;
    std::string last_point() const { return points.back(); }
};

Trace run_scenario(const Scenario& s);

struct ComplianceResult {
    bool ok = true;
    Q start;
    Q end;
    Q data;
    Q bound;
};
// flow empty = aggregate of all flows at the point.
ComplianceResult check_compliance(const Trace& t, const std::string& point, const ConcaveCurve& curve,
                                  const std::string& flow = "");

struct ReorderingMeasure {
    Q rto = 0;
    Q rbo = 0;
    long late_unit = -1;  // unit achieving the RTO, -1 if in order
};
ReorderingMeasure measure_reordering(const Trace& t, const std::string& point, const std::string& reference_point,
                                     const std::string& flow = "");

// Per unit: time at `to` minus time at `from` (first observation at each).
std::map<long, Q> unit_delays(const Trace& t, const std::string& from, const std::string& to);

// --- scenario generators ---

struct TightnessParams {
    Q r, b, d1, D1, d2, D2;
    long tail_units = 4;  // units of category X
};
struct TightnessConstants {
    long chi1, chi2, psi;
    bool separated;  // d2 - D1 >= b/r
    Q burst_instant;
    Q burst;
};
TightnessConstants tightness_constants(const TightnessParams& p);
Scenario gen_tightness_trajectory(const TightnessParams& p);

struct AdversarialParams {
    long q;
    Q r, b, d1, D1, d2, D2;
    long periods = 0;  // 0: long enough for the regulator delay to pass ten times D2
};
struct AdversarialConstants {
    long q_min;
    Q J, D, d, eps, I, phi, tau, x1;
    size_t slow_path, fast_path;  // indices into {P1, P2}
};
AdversarialConstants adversarial_constants(const AdversarialParams& p);
// Unit id of m^w_{i,k} (flow i in 1..q, period k >= 0, w in {1, 2}).
inline long adversarial_unit_id(long q, long i, long k, int w) { return 1 + 2 * (k * q + (i - 1)) + (w - 1); }
Scenario gen_adversarial_ir(const AdversarialParams& p);

// --- serialization ---
Scenario scenario_from_json(const json& j);
json to_json(const Scenario& s);
Scenario load_scenario(const std::string& file);
std::string trace_csv(const Trace& t);

}  // namespace redcalc
