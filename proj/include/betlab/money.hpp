#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "betlab/errors.hpp"

namespace betlab {

/// Exact nonnegative cash amount in whole currency units. All arithmetic on
/// Money is integer-exact; no rounding ever happens on the reward side of a
/// lottery, so equal totals reached along different paths compare equal.
class Money {
public:
    constexpr Money() = default;

    constexpr explicit Money(std::int64_t amount) : amount_(amount) {
        if (amount < 0) {
            throw std::invalid_argument("Money amount must be nonnegative, got " +
                                        std::to_string(amount));
        }
    }

    constexpr std::int64_t amount() const { return amount_; }
    constexpr double as_double() const { return static_cast<double>(amount_); }

    friend constexpr Money operator+(Money lhs, Money rhs) {
        return Money(lhs.amount_ + rhs.amount_);
    }
    constexpr Money& operator+=(Money rhs) {
        amount_ += rhs.amount_;
        return *this;
    }
    friend constexpr auto operator<=>(Money, Money) = default;

private:
    std::int64_t amount_ = 0;
};

/// k * m, for reward grids like "k sure amounts plus l prizes".
constexpr Money operator*(std::int64_t k, Money m) {
    if (k < 0) throw std::invalid_argument("Money multiplier must be nonnegative");
    return Money(k * m.amount());
}

inline constexpr double kProbSumTolerance = 1e-9;

class Lottery;
Lottery make_lottery(const std::vector<std::pair<Money, double>>& pairs);
Lottery convolve(const Lottery& a, const Lottery& b);
Lottery binomial_total(std::int64_t r, Money prize, double win_prob);
Lottery shift(const Lottery& l, Money delta);

/// Finite discrete probability distribution over Money outcomes, kept in
/// canonical form: outcomes sorted ascending, duplicates merged, zero-weight
/// entries dropped. Canonical form makes equality of lotteries testable.
class Lottery {
public:
    using Outcome = std::pair<Money, double>;

    const std::vector<Outcome>& outcomes() const { return outcomes_; }
    std::size_t size() const { return outcomes_.size(); }

    Money min_outcome() const { return outcomes_.front().first; }
    Money max_outcome() const { return outcomes_.back().first; }

    /// Probability of exactly this outcome (0 if not in the support).
    double prob_of(Money m) const {
        auto it = std::lower_bound(outcomes_.begin(), outcomes_.end(), m,
                                   [](const Outcome& o, Money v) { return o.first < v; });
        return (it != outcomes_.end() && it->first == m) ? it->second : 0.0;
    }

    friend bool operator==(const Lottery&, const Lottery&) = default;

private:
    explicit Lottery(std::vector<Outcome> canonical) : outcomes_(std::move(canonical)) {}

    static Lottery from_weights(const std::map<Money, double>& weights) {
        std::vector<Outcome> out;
        out.reserve(weights.size());
        for (const auto& [money, prob] : weights) {
            if (prob != 0.0) out.emplace_back(money, prob);
        }
        return Lottery(std::move(out));
    }

    std::vector<Outcome> outcomes_;

    friend Lottery make_lottery(const std::vector<std::pair<Money, double>>& pairs);
    friend Lottery convolve(const Lottery& a, const Lottery& b);
    friend Lottery binomial_total(std::int64_t r, Money prize, double win_prob);
    friend Lottery shift(const Lottery& l, Money delta);
};

/// Builds a canonical lottery from (money, probability) pairs. Duplicate
/// outcomes are merged by summing probability; the result is renormalized by
/// the exact probability sum, which must already be within kProbSumTolerance
/// of 1.
inline Lottery make_lottery(const std::vector<std::pair<Money, double>>& pairs) {
    double sum = 0.0;
    for (const auto& [money, prob] : pairs) {
        if (prob < 0.0 || !std::isfinite(prob)) {
            throw NegativeProbability("probability for outcome " +
                                      std::to_string(money.amount()) + " is " +
                                      std::to_string(prob));
        }
        sum += prob;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
        throw ProbabilitySumOutOfTolerance("probabilities sum to " + std::to_string(sum) +
                                           ", expected 1 within 1e-9");
    }
    std::map<Money, double> merged;
    for (const auto& [money, prob] : pairs) merged[money] += prob;
    for (auto& [money, prob] : merged) prob /= sum;
    return Lottery::from_weights(merged);
}

/// Distribution of X+Y for independent X~a, Y~b; support is the sumset and
/// probabilities are products summed over colliding totals.
inline Lottery convolve(const Lottery& a, const Lottery& b) {
    std::map<Money, double> merged;
    for (const auto& [ma, pa] : a.outcomes()) {
        for (const auto& [mb, pb] : b.outcomes()) {
            merged[ma + mb] += pa * pb;
        }
    }
    return Lottery::from_weights(merged);
}

/// Lottery over {l * prize : l = 0..r} with binomial(r, win_prob) weights;
/// equal (to floating tolerance) to the r-fold self-convolution of the
/// one-shot lottery [(1-w)(0), w(prize)].
inline Lottery binomial_total(std::int64_t r, Money prize, double win_prob) {
    if (r < 0) throw std::invalid_argument("binomial_total: r must be >= 0");
    if (win_prob < 0.0 || win_prob > 1.0) {
        throw NegativeProbability("binomial_total: win_prob must lie in [0,1], got " +
                                  std::to_string(win_prob));
    }
    std::map<Money, double> merged;
    if (r == 0 || win_prob == 0.0) {
        merged[Money(0)] = 1.0;
    } else if (win_prob == 1.0) {
        merged[r * prize] = 1.0;
    } else {
        // pmf by the multiplicative recurrence; exact in binary for dyadic
        // win_prob and small r, stable everywhere at desk scale.
        const double odds = win_prob / (1.0 - win_prob);
        double p = std::pow(1.0 - win_prob, static_cast<double>(r));
        for (std::int64_t ell = 0;; ++ell) {
            merged[ell * prize] += p;
            if (ell == r) break;
            p = p * static_cast<double>(r - ell) / static_cast<double>(ell + 1) * odds;
        }
    }
    return Lottery::from_weights(merged);
}

/// Adds delta to every outcome; probabilities unchanged.
inline Lottery shift(const Lottery& l, Money delta) {
    std::map<Money, double> merged;
    for (const auto& [money, prob] : l.outcomes()) merged[money + delta] = prob;
    return Lottery::from_weights(merged);
}

/// Exact expectation and standard deviation of the Money-valued variable.
inline std::pair<double, double> mean_and_sd(const Lottery& l) {
    double mean = 0.0;
    for (const auto& [money, prob] : l.outcomes()) mean += prob * money.as_double();
    double var = 0.0;
    for (const auto& [money, prob] : l.outcomes()) {
        const double d = money.as_double() - mean;
        var += prob * d * d;
    }
    return {mean, std::sqrt(std::max(var, 0.0))};
}

/// P(X > threshold), strict inequality.
inline double tail_prob(const Lottery& l, Money threshold) {
    double p = 0.0;
    for (const auto& [money, prob] : l.outcomes()) {
        if (money > threshold) p += prob;
    }
    return p;
}

}  // namespace betlab
