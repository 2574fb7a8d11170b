#pragma once

#include <cmath>
#include <limits>

namespace basinforge {

// Magnitude stored as a natural log. Quantities like D^(-k^j) with j large
// overflow any float in linear scale; products of step magnitudes become
// plain sums here.
struct LogMag {
    double lg = -std::numeric_limits<double>::infinity();

    LogMag() = default;

    static LogMag from_value(double magnitude) {
        LogMag r;
        r.lg = magnitude > 0.0 ? std::log(magnitude) : -std::numeric_limits<double>::infinity();
        return r;
    }
    static LogMag from_log(double lg) {
        LogMag r;
        r.lg = lg;
        return r;
    }
    static LogMag one() { return from_log(0.0); }
    static LogMag zero() { return LogMag{}; }

    bool is_zero() const { return std::isinf(lg) && lg < 0; }
    double log() const { return lg; }
    // May under/overflow to 0 or inf; callers that care stay in log scale.
    double value() const { return std::exp(lg); }

    LogMag& operator*=(const LogMag& o) {
        lg += o.lg;
        return *this;
    }
    LogMag& operator/=(const LogMag& o) {
        lg -= o.lg;
        return *this;
    }
    LogMag pow(double e) const { return from_log(lg * e); }
};

inline LogMag operator*(LogMag a, const LogMag& b) { return a *= b; }
inline LogMag operator/(LogMag a, const LogMag& b) { return a /= b; }
inline bool operator<(const LogMag& a, const LogMag& b) { return a.lg < b.lg; }
inline bool operator>(const LogMag& a, const LogMag& b) { return a.lg > b.lg; }
inline bool operator<=(const LogMag& a, const LogMag& b) { return a.lg <= b.lg; }
inline bool operator>=(const LogMag& a, const LogMag& b) { return a.lg >= b.lg; }

} // namespace basinforge
