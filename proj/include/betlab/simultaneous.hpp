#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "betlab/errors.hpp"
#include "betlab/money.hpp"
#include "betlab/utility.hpp"

namespace betlab {

/// n identical bets committed in advance: each bet pays sure_amount for
/// certain, or prize with probability win_prob (zero otherwise). An
/// allocation picks the sure reward k times and the lottery n-k times.
struct SimultaneousProblem {
    std::int64_t n;
    Money sure_amount;
    Money prize;
    double win_prob;
    UtilityFunction u;

    SimultaneousProblem(std::int64_t n_, Money sure, Money prize_, double w, UtilityFunction u_)
        : n(n_), sure_amount(sure), prize(prize_), win_prob(w), u(std::move(u_)) {
        if (n < 1) throw std::invalid_argument("SimultaneousProblem: n must be >= 1");
        if (!(Money(0) < sure_amount && sure_amount < prize)) {
            throw std::invalid_argument("SimultaneousProblem: requires 0 < sure_amount < prize");
        }
        if (!(win_prob > 0.0 && win_prob < 1.0)) {
            throw std::invalid_argument("SimultaneousProblem: win_prob must lie in (0,1)");
        }
        const double needed = static_cast<double>(n) * prize.as_double();
        if (u.domain_max() < needed) {
            throw DomainExceeded("SimultaneousProblem: utility domain_max " +
                                 std::to_string(u.domain_max()) + " < prize*n = " +
                                 std::to_string(needed));
        }
    }
};

namespace detail {
/// log C(r, l); exact enough for desk-scale r via lgamma.
inline double log_binomial_coefficient(std::int64_t r, std::int64_t ell) {
    return std::lgamma(static_cast<double>(r + 1)) - std::lgamma(static_cast<double>(ell + 1)) -
           std::lgamma(static_cast<double>(r - ell + 1));
}
}  // namespace detail

/**
 * Exact expected utility of the allocation (k sure, r = n-k lotteries):
 *
 *     sum over l of C(r,l) w^l (1-w)^(r-l) * u(sure*k + prize*l)
 *
 * The binomial weights here are computed through log-gamma, deliberately a
 * different route than the convolution-backed Lottery path, so the two can
 * cross-check each other.
 */
inline double exact_allocation_utility(const SimultaneousProblem& p, std::int64_t k) {
    if (k < 0 || k > p.n) {
        throw KOutOfRange("k = " + std::to_string(k) + " outside [0, " + std::to_string(p.n) + "]");
    }
    const std::int64_t r = p.n - k;
    if (r == 0) return p.u(static_cast<std::int64_t>(k) * p.sure_amount);
    const double log_w = std::log(p.win_prob);
    const double log_1mw = std::log1p(-p.win_prob);
    double total = 0.0;
    for (std::int64_t ell = 0; ell <= r; ++ell) {
        const double log_weight = detail::log_binomial_coefficient(r, ell) +
                                  static_cast<double>(ell) * log_w +
                                  static_cast<double>(r - ell) * log_1mw;
        total += std::exp(log_weight) * p.u(k * p.sure_amount + ell * p.prize);
    }
    return total;
}

/// Stage-additive valuation alpha_cal*k + win_prob*(n-k): what summing
/// single-bet utilities across stages would assign to the allocation.
inline double additive_allocation_value(double alpha_cal, std::int64_t n, std::int64_t k,
                                        double win_prob) {
    if (!(alpha_cal > 0.0 && alpha_cal < 1.0)) {
        throw std::invalid_argument("additive_allocation_value: alpha_cal must lie in (0,1)");
    }
    if (k < 0 || k > n) {
        throw KOutOfRange("k = " + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
    }
    return alpha_cal * static_cast<double>(k) + win_prob * static_cast<double>(n - k);
}

struct AllocationRow {
    std::int64_t k;
    double exact;
    std::optional<double> approx;
    double additive;
};

struct AllocationReport {
    std::vector<AllocationRow> per_k;  // exactly n+1 rows, k ascending
    std::int64_t best_k_exact;         // argmax of exact, ties to smaller k
    std::int64_t best_k_additive;      // 0 if alpha_cal < w, n if >, ties to smaller k
};

double approx_allocation_utility(const SimultaneousProblem& p, std::int64_t k);

inline AllocationReport allocation_report(const SimultaneousProblem& p, double alpha_cal,
                                          bool with_approx) {
    AllocationReport report;
    report.per_k.reserve(static_cast<std::size_t>(p.n) + 1);
    std::int64_t best_k = 0;
    double best_value = 0.0;
    for (std::int64_t k = 0; k <= p.n; ++k) {
        AllocationRow row;
        row.k = k;
        row.exact = exact_allocation_utility(p, k);
        if (with_approx) row.approx = approx_allocation_utility(p, k);
        row.additive = additive_allocation_value(alpha_cal, p.n, k, p.win_prob);
        if (k == 0 || row.exact > best_value) {
            best_value = row.exact;
            best_k = k;
        }
        report.per_k.push_back(row);
    }
    report.best_k_exact = best_k;
    report.best_k_additive = alpha_cal > p.win_prob ? p.n : 0;
    return report;
}

/**
 * The normal replacement for the symmetric binomial pmf value 2^-r C(r,l):
 *
 *     sqrt(2/(pi r)) * exp(-2 (l - r/2)^2 / r)
 *
 * This is the literal pmf substitution (mean r/2, variance r/4), not a
 * continuity-corrected CDF approximation, and is defined for the w = 1/2
 * case only.
 */
inline double normal_pmf_weight(std::int64_t r, std::int64_t ell) {
    if (r < 1) throw ROutOfRange("normal_pmf_weight: r must be >= 1");
    if (ell < 0 || ell > r) {
        throw ROutOfRange("normal_pmf_weight: ell = " + std::to_string(ell) + " outside [0, " +
                          std::to_string(r) + "]");
    }
    const double rd = static_cast<double>(r);
    const double dev = static_cast<double>(ell) - rd / 2.0;
    return std::sqrt(2.0 / (std::numbers::pi * rd)) * std::exp(-2.0 * dev * dev / rd);
}

/// Plug-the-mean approximation u_n(kA, rB) ~ phi_n(sure*k + (prize/2)*r):
/// concentration of the binomial around its mean collapses the lottery sum to
/// a single evaluation. Requires a NormalizedLog utility and win_prob = 1/2.
inline double approx_allocation_utility(const SimultaneousProblem& p, std::int64_t k) {
    if (p.u.family() != UtilityFamily::NormalizedLog) {
        throw UnsupportedUtility("approx_allocation_utility: utility must be normalized_log, got " +
                                 std::string(to_string(p.u.family())));
    }
    if (p.win_prob != 0.5) {
        throw UnsupportedUtility("approx_allocation_utility: win_prob must be 1/2, got " +
                                 std::to_string(p.win_prob));
    }
    if (k < 0 || k > p.n) {
        throw KOutOfRange("k = " + std::to_string(k) + " outside [0, " + std::to_string(p.n) + "]");
    }
    const double r = static_cast<double>(p.n - k);
    const double mean_cash =
        static_cast<double>(k) * p.sure_amount.as_double() + 0.5 * p.prize.as_double() * r;
    return p.u(mean_cash);
}

/**
 * Smallest N <= n_max such that the all-lottery plan (k=0) beats the all-sure
 * plan (k=n) for every n from N through n_max; nullopt when even n_max fails.
 * NormalizedLog utilities are re-normalized per n; fixed families are reused
 * as-is (and raise DomainExceeded if their domain cannot cover prize*n).
 */
inline std::optional<std::int64_t> find_preference_flip(const SimultaneousProblem& p_template,
                                                        std::int64_t n_max) {
    if (n_max < 1) throw std::invalid_argument("find_preference_flip: n_max must be >= 1");
    std::int64_t first = n_max + 1;
    for (std::int64_t n = n_max; n >= 1; --n) {
        UtilityFunction u = p_template.u.normalized_log_stages() > 0
                                ? UtilityFunction::normalized_log(n)
                                : p_template.u;
        const SimultaneousProblem pn(n, p_template.sure_amount, p_template.prize,
                                     p_template.win_prob, std::move(u));
        const bool lottery_wins =
            exact_allocation_utility(pn, 0) > exact_allocation_utility(pn, n);
        if (!lottery_wins) break;
        first = n;
    }
    if (first > n_max) return std::nullopt;
    return first;
}

}  // namespace betlab
