#pragma once

#include <optional>
#include <string>

#include "redcalc/minplus.hpp"
#include "redcalc/topology.hpp"

namespace redcalc {

enum class VerdictKind { Bounded, Unbounded };

namespace reason {
inline constexpr const char* IrAfterPefNoPof = "IR_AFTER_PEF_NO_POF";
inline constexpr const char* RateOverload = "RATE_OVERLOAD";
inline constexpr const char* UnprovenConfiguration = "UNPROVEN_CONFIGURATION";
}  // namespace reason

struct RegulatorVerdict {
    VerdictKind kind = VerdictKind::Bounded;
    DelayInterval bounds{0, Ext(0)};  // meaningful when Bounded
    std::string reason;               // meaningful when Unbounded
    std::optional<Ext> rto_bound;
    std::optional<long> q_min;

    static RegulatorVerdict bounded(DelayInterval b) {
        RegulatorVerdict v;
        v.bounds = b;
        return v;
    }
    static RegulatorVerdict unbounded(std::string why) {
        RegulatorVerdict v;
        v.kind = VerdictKind::Unbounded;
        v.bounds = {0, Ext::infinity()};
        v.reason = std::move(why);
        return v;
    }
};

DelayInterval pfr_after_pef_bounds(const TokenBucket& shaping, const PathDelayBounds& upstream);
// Concave shaping curves: the regulator offers sigma as a service curve to
// the jitter-shifted upstream curve.
Ext pfr_after_pef_penalty(const ConcaveCurve& alpha_ref, const ConcaveCurve& sigma, const PathDelayBounds& upstream);
Ext pfr_after_pef_rto(const Ext& pef_rto, const PathDelayBounds& upstream);
long ir_q_min(const TokenBucket& shaping, PathDelayBounds branch1, PathDelayBounds branch2);
DelayInterval preof_for_free_bounds(const PathDelayBounds& upstream, const Q& timeout, bool lossless);

struct IrContext {
    size_t flow_count = 0;
    bool homogeneous_sigma = true;
    std::optional<TokenBucket> sigma;  // the common token bucket, if any
    bool has_pof_before = false;
    Q pof_timeout = 0;
    bool lossless = false;
    PathDelayBounds upstream{0, Ext(0)};
    // Delay intervals of the individual reference->vertex paths.
    std::vector<PathDelayBounds> branch_intervals;
};

RegulatorVerdict ir_after_pef_verdict(const IrContext& ctx);

}  // namespace redcalc
