#pragma once

#include <variant>
#include <vector>

#include "redcalc/rational.hpp"

namespace redcalc {

struct TokenBucket {
    Q rate;
    Q burst;
    bool operator==(const TokenBucket&) const = default;
};

// Minimum of token buckets; 0 at t = 0. Segments are kept in canonical
// order: decreasing rate, increasing burst, each one active on some
// interval of (0, inf).
class ConcaveCurve {
public:
    ConcaveCurve();  // the zero curve
    explicit ConcaveCurve(std::vector<TokenBucket> segments);
    static ConcaveCurve token_bucket(const Q& rate, const Q& burst);

    const std::vector<TokenBucket>& segments() const { return segs_; }
    // Limit at 0+.
    Q burst0() const { return segs_.front().burst; }
    // Slope and intercept of the last segment (long-term behaviour).
    const TokenBucket& tail() const { return segs_.back(); }
    // Times at which the active segment changes.
    std::vector<Q> breakpoints() const;

    bool operator==(const ConcaveCurve& o) const { return segs_ == o.segs_; }

private:
    std::vector<TokenBucket> segs_;
};

struct DelayElement {
    Q delay;
};

struct RateLatency {
    Q rate;
    Q latency;
};

using Service = std::variant<RateLatency, ConcaveCurve>;

std::vector<TokenBucket> normalize(std::vector<TokenBucket> segs);

Q eval(const ConcaveCurve& c, const Q& t);
Q eval(const RateLatency& s, const Q& t);
ConcaveCurve add(const ConcaveCurve& a, const ConcaveCurve& b);
ConcaveCurve convolve(const ConcaveCurve& a, const ConcaveCurve& b);
ConcaveCurve deconvolve_delay(const ConcaveCurve& a, const DelayElement& j);
ConcaveCurve deconvolve_delay(const ConcaveCurve& a, const Q& delay);
Ext lower_pseudo_inverse(const ConcaveCurve& a, const Q& y);
Ext h_dev(const ConcaveCurve& alpha, const Service& beta);
Ext v_dev(const ConcaveCurve& alpha, const Service& beta);
// a(t) <= b(t) for every t >= 0.
bool leq(const ConcaveCurve& a, const ConcaveCurve& b);

}  // namespace redcalc
