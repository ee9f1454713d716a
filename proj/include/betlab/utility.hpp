#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "betlab/errors.hpp"
#include "betlab/money.hpp"

namespace betlab {

enum class UtilityFamily { LogShifted, NormalizedLog, Linear, Power, Exponential, Tabulated };

inline const char* to_string(UtilityFamily f) {
    switch (f) {
        case UtilityFamily::LogShifted: return "log_shifted";
        case UtilityFamily::NormalizedLog: return "normalized_log";
        case UtilityFamily::Linear: return "linear";
        case UtilityFamily::Power: return "power";
        case UtilityFamily::Exponential: return "exponential";
        case UtilityFamily::Tabulated: return "tabulated";
    }
    return "?";
}

namespace detail {
struct LogShiftedU {};
struct NormalizedLogU {
    std::int64_t stages;
    double norm;  // log(1 + 1000*stages)
};
struct LinearU {
    double scale;
};
struct PowerU {
    double exponent;
};
struct ExponentialU {
    double rate;
};
struct TabulatedU {
    std::vector<std::pair<double, double>> points;  // (cash, utility), strictly increasing
};
using UtilityImpl =
    std::variant<LogShiftedU, NormalizedLogU, LinearU, PowerU, ExponentialU, TabulatedU>;
}  // namespace detail

/**
 * Monotone increasing utility-of-money function on [0, domain_max].
 *
 * Immutable after construction; evaluation is a pure function, so instances
 * may be shared freely across threads. Real-valued (non-integer) cash inputs
 * are accepted because the indifference-probability scan moves along a
 * continuum.
 */
class UtilityFunction {
public:
    /// u(x) = ln(1 + x)
    static UtilityFunction log_shifted(double domain_max) {
        require_positive_domain(domain_max);
        return UtilityFunction(UtilityFamily::LogShifted, domain_max, detail::LogShiftedU{});
    }

    /// u(x) = log(1 + x) / log(1 + 1000 n); maps [0, 1000 n] onto [0, 1].
    static UtilityFunction normalized_log(std::int64_t stages) {
        if (stages < 1) throw std::invalid_argument("normalized_log: stages must be >= 1");
        const double cap = 1000.0 * static_cast<double>(stages);
        return UtilityFunction(UtilityFamily::NormalizedLog, cap,
                               detail::NormalizedLogU{stages, std::log1p(cap)});
    }

    /// u(x) = scale * x, scale > 0
    static UtilityFunction linear(double scale, double domain_max) {
        require_positive_domain(domain_max);
        if (!(scale > 0.0)) throw std::invalid_argument("linear: scale must be > 0");
        return UtilityFunction(UtilityFamily::Linear, domain_max, detail::LinearU{scale});
    }

    /// u(x) = x^exponent, exponent > 0 (convex for exponent > 1, concave below)
    static UtilityFunction power(double exponent, double domain_max) {
        require_positive_domain(domain_max);
        if (!(exponent > 0.0)) throw std::invalid_argument("power: exponent must be > 0");
        return UtilityFunction(UtilityFamily::Power, domain_max, detail::PowerU{exponent});
    }

    /// u(x) = 1 - e^(-rate x), rate > 0
    static UtilityFunction exponential(double rate, double domain_max) {
        require_positive_domain(domain_max);
        if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
        return UtilityFunction(UtilityFamily::Exponential, domain_max, detail::ExponentialU{rate});
    }

    /// Piecewise-linear interpolant through (cash, utility) sample points.
    /// Points must start at cash 0 and be strictly increasing in both columns.
    static UtilityFunction tabulated(std::vector<std::pair<double, double>> points) {
        if (points.size() < 2) throw std::invalid_argument("tabulated: need at least 2 points");
        if (points.front().first != 0.0) {
            throw std::invalid_argument("tabulated: first cash sample must be 0");
        }
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (!(points[i].first > points[i - 1].first)) {
                throw std::invalid_argument("tabulated: cash column must be strictly increasing");
            }
            if (!(points[i].second > points[i - 1].second)) {
                throw std::invalid_argument(
                    "tabulated: utility column must be strictly increasing");
            }
        }
        const double cap = points.back().first;
        return UtilityFunction(UtilityFamily::Tabulated, cap,
                               detail::TabulatedU{std::move(points)});
    }

    UtilityFamily family() const { return family_; }
    double domain_max() const { return domain_max_; }

    /// Stage count of a NormalizedLog utility (used to re-normalize per n in
    /// horizon sweeps); 0 for every other family.
    std::int64_t normalized_log_stages() const {
        if (const auto* n = std::get_if<detail::NormalizedLogU>(&impl_)) return n->stages;
        return 0;
    }

    double operator()(double cash) const {
        if (!(cash >= 0.0) || cash > domain_max_) {
            throw DomainExceeded("utility argument " + std::to_string(cash) +
                                 " outside [0, " + std::to_string(domain_max_) + "]");
        }
        return std::visit([cash](const auto& f) { return eval_impl(f, cash); }, impl_);
    }
    double operator()(Money cash) const { return (*this)(cash.as_double()); }

private:
    UtilityFunction(UtilityFamily family, double domain_max, detail::UtilityImpl impl)
        : family_(family), domain_max_(domain_max), impl_(std::move(impl)) {}

    static void require_positive_domain(double m) {
        if (!(m > 0.0)) throw std::invalid_argument("domain_max must be > 0");
    }

    static double eval_impl(const detail::LogShiftedU&, double x) { return std::log1p(x); }
    static double eval_impl(const detail::NormalizedLogU& f, double x) {
        return std::log1p(x) / f.norm;
    }
    static double eval_impl(const detail::LinearU& f, double x) { return f.scale * x; }
    static double eval_impl(const detail::PowerU& f, double x) { return std::pow(x, f.exponent); }
    static double eval_impl(const detail::ExponentialU& f, double x) {
        return -std::expm1(-f.rate * x);
    }
    static double eval_impl(const detail::TabulatedU& f, double x) {
        const auto& pts = f.points;
        auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                                   [](const auto& p, double v) { return p.first < v; });
        if (hi == pts.begin()) return pts.front().second;
        if (hi == pts.end()) return pts.back().second;  // x == cap, caught by domain check
        auto lo = hi - 1;
        const double t = (x - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    }

    UtilityFamily family_;
    double domain_max_;
    detail::UtilityImpl impl_;
};

/// Sum of p_j * u(c_j) over the lottery's support.
inline double expected_utility(const UtilityFunction& u, const Lottery& l) {
    double total = 0.0;
    for (const auto& [money, prob] : l.outcomes()) total += prob * u(money);
    return total;
}

/// U(r2 | r1) = u(r1 + r2) - u(r1): the utility of a second installment given
/// that r1 has already been received.
inline double conditional_utility(const UtilityFunction& u, Money r2, Money r1) {
    return u(r1 + r2) - u(r1);
}

/// E[u(r1 + D)] - u(r1) for a lottery-valued second installment D.
inline double conditional_expected_utility(const UtilityFunction& u, const Lottery& d, Money r1) {
    double total = 0.0;
    for (const auto& [money, prob] : d.outcomes()) {
        total += prob * (u(r1 + money) - u(r1));
    }
    return total;
}

/// Bracket for the indifference-probability function: sure amount c versus a
/// lottery on {a, b}, all three shifted by background wealth x in
/// [x_min, x_max].
struct AlphaSpec {
    Money a;
    Money c;
    Money b;
    double x_min;
    double x_max;

    AlphaSpec(Money a_, Money c_, Money b_, double x_min_, double x_max_)
        : a(a_), c(c_), b(b_), x_min(x_min_), x_max(x_max_) {
        if (!(a < c && c < b)) {
            throw std::invalid_argument("AlphaSpec requires a < c < b");
        }
        if (!(x_min <= x_max)) {
            throw std::invalid_argument("AlphaSpec requires x_min <= x_max");
        }
    }
};

inline constexpr double kDegenerateDenominator = 1e-12;

/**
 * The probability alpha(x) that makes a decision maker indifferent between
 * the sure amount c+x and a lottery paying b+x with probability alpha(x) and
 * a+x otherwise:
 *
 *     u(c+x) = alpha(x) * u(b+x) + (1 - alpha(x)) * u(a+x)
 *
 * For strictly increasing u the value lies in (0,1). Throws
 * DegenerateDenominator when u(b+x) - u(a+x) < 1e-12, which signals a flat
 * (or non-monotone) tabulated utility over the bracket.
 */
inline double alpha(const UtilityFunction& u, const AlphaSpec& spec, double x) {
    const double span = std::max({1.0, std::abs(spec.x_min), std::abs(spec.x_max)});
    if (x < spec.x_min - 1e-9 * span || x > spec.x_max + 1e-9 * span) {
        throw DomainExceeded("alpha: x = " + std::to_string(x) + " outside [" +
                             std::to_string(spec.x_min) + ", " + std::to_string(spec.x_max) + "]");
    }
    const double ua = u(spec.a.as_double() + x);
    const double ub = u(spec.b.as_double() + x);
    const double uc = u(spec.c.as_double() + x);
    const double den = ub - ua;
    if (den < kDegenerateDenominator) {
        throw DegenerateDenominator("alpha: u(b+x) - u(a+x) = " + std::to_string(den) +
                                    " at x = " + std::to_string(x));
    }
    return (uc - ua) / den;
}

enum class Monotonicity { Decreasing, Increasing, Constant, Mixed };

inline const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Decreasing: return "Decreasing";
        case Monotonicity::Increasing: return "Increasing";
        case Monotonicity::Constant: return "Constant";
        case Monotonicity::Mixed: return "Mixed";
    }
    return "?";
}

inline constexpr double kAlphaClassifyTolerance = 1e-10;

/// Evaluates alpha on an even grid over the spec's x range and classifies the
/// sign pattern of successive differences. Differences below 1e-10 in
/// magnitude count as zero; Mixed means both signs occurred.
inline Monotonicity alpha_monotonicity_report(const UtilityFunction& u, const AlphaSpec& spec,
                                              std::int64_t grid_points) {
    if (grid_points < 3) {
        throw std::invalid_argument("alpha_monotonicity_report: grid_points must be >= 3");
    }
    const double step = (spec.x_max - spec.x_min) / static_cast<double>(grid_points - 1);
    bool saw_up = false;
    bool saw_down = false;
    double prev = 0.0;
    for (std::int64_t i = 0; i < grid_points; ++i) {
        const double x =
            (i == grid_points - 1) ? spec.x_max : spec.x_min + static_cast<double>(i) * step;
        const double a = alpha(u, spec, x);
        if (i > 0) {
            const double d = a - prev;
            if (d > kAlphaClassifyTolerance) saw_up = true;
            else if (d < -kAlphaClassifyTolerance) saw_down = true;
        }
        prev = a;
    }
    if (saw_up && saw_down) return Monotonicity::Mixed;
    if (saw_up) return Monotonicity::Increasing;
    if (saw_down) return Monotonicity::Decreasing;
    return Monotonicity::Constant;
}

inline constexpr double kCashBisectTolerance = 1e-6;

/// Cash amount e with u(e) = expected_utility(u, l), found by bisection over
/// the lottery's support interval to 1e-6 absolute cash tolerance.
inline double certainty_equivalent(const UtilityFunction& u, const Lottery& l) {
    const double target = expected_utility(u, l);
    double lo = l.min_outcome().as_double();
    double hi = l.max_outcome().as_double();
    while (hi - lo > kCashBisectTolerance) {
        const double mid = 0.5 * (lo + hi);
        if (u(mid) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Loads a tabulated utility from two-column CSV (cash, utility). An optional
/// header row is skipped. Both columns must be strictly increasing; the first
/// cash sample must be 0. Violations are rejected with the offending line
/// number.
inline UtilityFunction load_tabulated_utility(std::istream& in) {
    std::vector<std::pair<double, double>> points;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string cash_str, util_str, extra;
        if (!std::getline(row, cash_str, ',') || !std::getline(row, util_str, ',')) {
            throw ParseError("line " + std::to_string(line_no) + ": expected two columns");
        }
        if (std::getline(row, extra, ',')) {
            throw ParseError("line " + std::to_string(line_no) + ": expected exactly two columns");
        }
        double cash = 0.0, util = 0.0;
        try {
            std::size_t pos_c = 0, pos_u = 0;
            cash = std::stod(cash_str, &pos_c);
            util = std::stod(util_str, &pos_u);
            while (pos_c < cash_str.size() && std::isspace(static_cast<unsigned char>(cash_str[pos_c]))) ++pos_c;
            while (pos_u < util_str.size() && std::isspace(static_cast<unsigned char>(util_str[pos_u]))) ++pos_u;
            if (pos_c != cash_str.size() || pos_u != util_str.size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            if (line_no == 1 && points.empty()) continue;  // header row
            throw ParseError("line " + std::to_string(line_no) + ": not a numeric row: " + line);
        }
        if (!points.empty()) {
            if (!(cash > points.back().first)) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": cash values must be strictly increasing");
            }
            if (!(util > points.back().second)) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": utility values must be strictly increasing");
            }
        }
        points.emplace_back(cash, util);
    }
    try {
        return UtilityFunction::tabulated(std::move(points));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("tabulated utility rejected: ") + e.what());
    }
}

inline UtilityFunction load_tabulated_utility_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open tabulated utility file: " + path);
    return load_tabulated_utility(in);
}

}  // namespace betlab
