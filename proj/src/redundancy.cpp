#include "redcalc/redundancy.hpp"

#include <stdexcept>

namespace redcalc {

namespace {

Q jitter(const PathDelayBounds& b) {
    if (!b.hi.finite()) throw std::domain_error("unbounded path delay");
    if (b.lo < 0 || b.hi.v < b.lo) throw std::invalid_argument("invalid delay bounds");
    return b.hi.v - b.lo;
}

}  // namespace

ConcaveCurve lossy_jitter_output_curve(const ConcaveCurve& alpha, const PathDelayBounds& delays) {
    return deconvolve_delay(alpha, jitter(delays));
}

ConcaveCurve pef_output_curve(const ConcaveCurve& alpha_in, const std::vector<AncestorTerm>& ancestors) {
    ConcaveCurve out = alpha_in;
    for (const auto& a : ancestors) out = convolve(out, lossy_jitter_output_curve(a.alpha, a.delays));
    return out;
}

ConcaveCurve pef_output_curve_parallel(const ConcaveCurve& alpha, const std::vector<PathDelayBounds>& branches) {
    if (branches.empty()) throw std::invalid_argument("at least one branch required");
    ConcaveCurve sum = lossy_jitter_output_curve(alpha, branches.front());
    Q lo = branches.front().lo;
    Q hi = branches.front().hi.v;
    for (size_t i = 1; i < branches.size(); ++i) {
        sum = add(sum, lossy_jitter_output_curve(alpha, branches[i]));
        lo = q_min(lo, branches[i].lo);
        if (!branches[i].hi.finite()) throw std::domain_error("unbounded path delay");
        hi = q_max(hi, branches[i].hi.v);
    }
    return convolve(sum, deconvolve_delay(alpha, Q(hi - lo)));
}

Q pef_rto_bound(const ConcaveCurve& alpha_at_ancestor, const PathDelayBounds& delays, const Q& l_min) {
    if (!(l_min > 0)) throw std::invalid_argument("l_min must be positive");
    Ext inv = lower_pseudo_inverse(alpha_at_ancestor, Q(2 * l_min));
    if (!inv.finite()) return 0;
    return pos(jitter(delays) - inv.v);
}

Ext rbo_from_rto(const ConcaveCurve& alpha_local, const Ext& rto) {
    if (!rto.finite()) return Ext::infinity();
    return Ext(eval(alpha_local, rto.v));
}

ConcaveCurve pof_output_curve(const ConcaveCurve& alpha_ref, const PathDelayBounds& delays, const Q& timeout,
                              bool lossless) {
    Q shift = jitter(delays);
    if (!lossless) shift += timeout;
    return deconvolve_delay(alpha_ref, shift);
}

}  // namespace redcalc
