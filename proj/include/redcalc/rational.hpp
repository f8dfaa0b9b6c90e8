#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace redcalc {

using Q = mpq_class;

// Parses "7", "-3/4", "2.125", "1e-3", "1.5E2". Throws std::invalid_argument.
Q parse_q(std::string_view text);
// Canonical form: "p" for integers, "p/q" otherwise.
std::string to_string(const Q& v);

Q q_floor(const Q& v);
Q q_ceil(const Q& v);
inline Q q_max(const Q& a, const Q& b) { return a < b ? b : a; }
inline Q q_min(const Q& a, const Q& b) { return a < b ? a : b; }
inline Q pos(const Q& v) { return v < 0 ? Q(0) : v; }

// Rational extended with +infinity. Used for delays, backlogs and
// pseudo-inverse results that may be unbounded.
struct Ext {
    Q v;
    bool inf = false;

    Ext() = default;
    Ext(const Q& x) : v(x) {}
    Ext(long x) : v(x) {}
    static Ext infinity() {
        Ext e;
        e.inf = true;
        return e;
    }
    bool finite() const { return !inf; }
};

bool operator==(const Ext& a, const Ext& b);
bool operator<(const Ext& a, const Ext& b);
inline bool operator<=(const Ext& a, const Ext& b) { return !(b < a); }
inline bool operator>(const Ext& a, const Ext& b) { return b < a; }
inline bool operator>=(const Ext& a, const Ext& b) { return !(a < b); }
Ext operator+(const Ext& a, const Ext& b);
Ext ext_max(const Ext& a, const Ext& b);
Ext ext_min(const Ext& a, const Ext& b);

// "inf" for the unbounded value.
std::string to_string(const Ext& v);
Ext parse_ext(std::string_view text);

}  // namespace redcalc
