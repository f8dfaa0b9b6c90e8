#pragma once

#include <string>
#include <vector>

#include "redcalc/minplus.hpp"
#include "redcalc/topology.hpp"

namespace redcalc {

struct ReorderingBounds {
    Ext rto;
    Ext rbo;
};

struct AncestorTerm {
    std::string vertex;
    ConcaveCurve alpha;      // arrival curve at the output of the ancestor
    PathDelayBounds delays;  // ancestor output -> PEF input
};

// Output of a system with delay in [d, D], FIFO or not, lossy or not.
ConcaveCurve lossy_jitter_output_curve(const ConcaveCurve& alpha, const PathDelayBounds& delays);

ConcaveCurve pef_output_curve(const ConcaveCurve& alpha_in, const std::vector<AncestorTerm>& ancestors);

// Parallel branches fed by the same replicated flow.
ConcaveCurve pef_output_curve_parallel(const ConcaveCurve& alpha, const std::vector<PathDelayBounds>& branches);

Q pef_rto_bound(const ConcaveCurve& alpha_at_ancestor, const PathDelayBounds& delays, const Q& l_min);
Ext rbo_from_rto(const ConcaveCurve& alpha_local, const Ext& rto);

ConcaveCurve pof_output_curve(const ConcaveCurve& alpha_ref, const PathDelayBounds& delays, const Q& timeout,
                              bool lossless);

}  // namespace redcalc
