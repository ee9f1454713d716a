#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "betlab/errors.hpp"
#include "betlab/money.hpp"
#include "betlab/sequential.hpp"

namespace betlab {

inline constexpr std::uint64_t kEnumerationGuard = 1'000'000;

/// Flattened (stage, state) slot layout for policy enumeration. Slot order is
/// stage-major, states ascending within a stage.
struct PolicySlots {
    std::vector<std::vector<Money>> states;  // states[k-1] = R_{k-1} for stage k
    std::vector<std::size_t> offset;         // slot offset of stage k's first state
    std::size_t total = 0;

    std::size_t slot(std::int64_t stage, Money state) const {
        const auto& level = states[static_cast<std::size_t>(stage - 1)];
        const auto it = std::lower_bound(level.begin(), level.end(), state);
        return offset[static_cast<std::size_t>(stage - 1)] +
               static_cast<std::size_t>(it - level.begin());
    }
};

inline PolicySlots policy_slots(const BetProblem& p) {
    const StateSpace space = reachable_states(p);
    PolicySlots slots;
    slots.states.assign(space.levels.begin(), space.levels.end() - 1);
    slots.offset.resize(slots.states.size());
    for (std::size_t i = 0; i < slots.states.size(); ++i) {
        slots.offset[i] = slots.total;
        slots.total += slots.states[i].size();
    }
    return slots;
}

/// A complete assignment of one decision index to every (stage, reachable
/// cumulative reward) pair, in PolicySlots order.
struct EnumeratedPolicy {
    std::vector<std::size_t> choices;
};

/// |D|^(total slots), the number of distinct deterministic policies.
/// Throws TooLargeToEnumerate past the guard, reporting the computed count.
inline std::uint64_t policy_count(const BetProblem& p, const PolicySlots& slots) {
    const std::uint64_t d = p.decisions().size();
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < slots.total; ++i) {
        if (count > kEnumerationGuard) break;
        count *= d;
    }
    if (count > kEnumerationGuard) {
        const double approx =
            std::pow(static_cast<double>(d), static_cast<double>(slots.total));
        std::ostringstream msg;
        msg << "policy space has " << approx << " policies (" << p.decisions().size() << "^"
            << slots.total << "), guard is " << kEnumerationGuard;
        throw TooLargeToEnumerate(msg.str());
    }
    return count;
}

/// Expected utility of final wealth under one enumerated policy, by exact
/// forward probability propagation with states merged on cumulative reward.
inline double enumerated_policy_value(const BetProblem& p, const PolicySlots& slots,
                                      const EnumeratedPolicy& policy) {
    std::vector<std::pair<Money, double>> dist{{Money(0), 1.0}};
    std::vector<std::pair<Money, double>> next;
    for (std::int64_t k = 1; k <= p.stages(); ++k) {
        std::map<Money, double> merged;
        for (const auto& [r, pr] : dist) {
            const std::size_t d = policy.choices[slots.slot(k, r)];
            for (const auto& [m, q] : p.decisions()[d].reward.outcomes()) {
                merged[r + m] += pr * q;
            }
        }
        next.assign(merged.begin(), merged.end());
        dist.swap(next);
    }
    double value = 0.0;
    for (const auto& [total, pr] : dist) value += pr * p.utility()(total);
    return value;
}

/// Visits every total policy exactly once, in lexicographic order of the
/// decision-index vector (earlier slots most significant).
template <typename Visitor>
void for_each_policy(const BetProblem& p, const PolicySlots& slots, Visitor&& visit) {
    policy_count(p, slots);  // guard
    const std::size_t d = p.decisions().size();
    EnumeratedPolicy policy;
    policy.choices.assign(slots.total, 0);
    for (;;) {
        visit(static_cast<const EnumeratedPolicy&>(policy));
        std::size_t i = slots.total;
        while (i > 0) {
            --i;
            if (++policy.choices[i] < d) break;
            policy.choices[i] = 0;
            if (i == 0) return;
        }
        if (slots.total == 0) return;
    }
}

inline std::vector<EnumeratedPolicy> enumerate_policies(const BetProblem& p) {
    const PolicySlots slots = policy_slots(p);
    std::vector<EnumeratedPolicy> all;
    all.reserve(policy_count(p, slots));
    for_each_policy(p, slots, [&](const EnumeratedPolicy& policy) { all.push_back(policy); });
    return all;
}

struct OracleBest {
    double value;
    EnumeratedPolicy policy;
};

/// Ground-truth optimum: evaluates every policy and returns the max, ties
/// resolved to the first policy in enumeration order.
inline OracleBest best_policy_by_enumeration(const BetProblem& p) {
    const PolicySlots slots = policy_slots(p);
    OracleBest best{0.0, {}};
    bool seen = false;
    for_each_policy(p, slots, [&](const EnumeratedPolicy& policy) {
        const double value = enumerated_policy_value(p, slots, policy);
        if (!seen || value > best.value) {
            best = OracleBest{value, policy};
            seen = true;
        }
    });
    return best;
}

}  // namespace betlab
