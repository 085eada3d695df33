#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace henonlab {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

inline double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Closed real interval; lo <= hi is maintained by normalize().
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval hull(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }
    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
    bool contains(const Interval& o, double tol = 0.0) const { return o.lo >= lo - tol && o.hi <= hi + tol; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

inline double interval_gap(const Interval& a, const Interval& b) {
    if (a.intersects(b)) return 0.0;
    return a.hi < b.lo ? b.lo - a.hi : a.lo - b.hi;
}

// 2x2 matrix, row major.
struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    Point apply(Point z) const { return {a * z.x + b * z.y, c * z.x + d * z.y}; }
    double det() const { return a * d - b * c; }
    Mat2 inverse() const {
        const double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
};

inline Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

// Signed magnitude kept in log form. Quantities like b^(p^m) and sigma^(n-m)
// underflow double precision for m >= 6, so they are carried as (sign, log|.|).
struct LogMag {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static LogMag from_value(double v) {
        if (v == 0.0) return {};
        return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
    }
    static LogMag from_log(double lg, int sgn = 1) { return {lg, sgn}; }

    bool is_zero() const { return sign == 0; }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
    LogMag abs() const { return {log_abs, sign == 0 ? 0 : 1}; }

    LogMag pow(double e) const {
        if (sign == 0) return {};
        if (sign < 0) throw std::domain_error("LogMag::pow of negative value");
        return {log_abs * e, 1};
    }
    LogMag operator*(const LogMag& o) const {
        if (sign == 0 || o.sign == 0) return {};
        return {log_abs + o.log_abs, sign * o.sign};
    }
    LogMag operator/(const LogMag& o) const {
        if (o.sign == 0) throw std::domain_error("LogMag division by zero");
        if (sign == 0) return {};
        return {log_abs - o.log_abs, sign * o.sign};
    }
};

// Error taxonomy shared by all modules. Each carries a short reason string;
// callers that need structured data subclass below.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotRenormalizable : Error {
    explicit NotRenormalizable(const std::string& why) : Error("NotRenormalizable: " + why) {}
};
struct NoConvergence : Error {
    std::vector<double> residual_history;
    NoConvergence(const std::string& why, std::vector<double> hist)
        : Error("NoConvergence: " + why), residual_history(std::move(hist)) {}
};
struct DepthUnreachable : Error {
    int level;
    explicit DepthUnreachable(int n, const std::string& why)
        : Error("DepthUnreachable at level " + std::to_string(n) + ": " + why), level(n) {}
};
struct ThicknessTooLarge : Error {
    double eps_bound;
    explicit ThicknessTooLarge(double eb)
        : Error("ThicknessTooLarge: eps_bound=" + std::to_string(eb)), eps_bound(eb) {}
};
struct OutOfDomain : Error {
    explicit OutOfDomain(const std::string& why) : Error("OutOfDomain: " + why) {}
};
struct JacobianVanished : Error {
    explicit JacobianVanished(const std::string& why) : Error("JacobianVanished: " + why) {}
};
struct NotContracted : Error {
    explicit NotContracted(const std::string& why) : Error("NotContracted: " + why) {}
};
struct InsufficientDepth : Error {
    explicit InsufficientDepth(const std::string& why) : Error("InsufficientDepth: " + why) {}
};
struct DegenerateVerticalPair : Error {
    explicit DegenerateVerticalPair(const std::string& why) : Error("DegenerateVerticalPair: " + why) {}
};
struct NoConcavityWindow : Error {
    explicit NoConcavityWindow(const std::string& why) : Error("NoConcavityWindow: " + why) {}
};
struct DepthExhausted : Error {
    explicit DepthExhausted(const std::string& why) : Error("DepthExhausted: " + why) {}
};
struct AddressUnavailable : Error {
    explicit AddressUnavailable(const std::string& why) : Error("AddressUnavailable: " + why) {}
};
struct EmptyIntersection : Error {
    explicit EmptyIntersection(const std::string& word) : Error("EmptyIntersection at word " + word) {}
};
struct NotDisjoint : Error {
    explicit NotDisjoint(const std::string& why) : Error("NotDisjoint: " + why) {}
};
struct WrongOrder : Error {
    explicit WrongOrder(const std::string& why) : Error("WrongOrder: " + why) {}
};
struct ThresholdNotFound : Error {
    explicit ThresholdNotFound(const std::string& why) : Error("ThresholdNotFound: " + why) {}
};
struct NoVerticalAlignment : Error {
    explicit NoVerticalAlignment(const std::string& why) : Error("NoVerticalAlignment: " + why) {}
};
struct OverlapAbsent : Error {
    explicit OverlapAbsent(const std::string& why) : Error("OverlapAbsent: " + why) {}
};

}  // namespace henonlab
