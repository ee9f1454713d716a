#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "betlab/errors.hpp"
#include "betlab/money.hpp"
#include "betlab/utility.hpp"

namespace betlab {

/// One choice available at every stage: a named one-stage reward lottery.
struct Decision {
    std::string name;
    Lottery reward;
};

/// n-stage sequential bet problem: at each stage the decision maker picks one
/// decision from the same set and collects a draw from its reward lottery.
/// Preferences depend on the final cumulative cash through the utility u.
class BetProblem {
public:
    BetProblem(std::int64_t stages, std::vector<Decision> decisions, UtilityFunction u)
        : stages_(stages), decisions_(std::move(decisions)), u_(std::move(u)) {
        if (stages_ < 1) throw std::invalid_argument("BetProblem: stages must be >= 1");
        if (decisions_.empty()) throw std::invalid_argument("BetProblem: need at least one decision");
        Money max_reward(0);
        for (const auto& d : decisions_) {
            if (d.name.empty()) throw std::invalid_argument("BetProblem: decision name empty");
            max_reward = std::max(max_reward, d.reward.max_outcome());
        }
        const double needed = static_cast<double>(stages_) * max_reward.as_double();
        if (u_.domain_max() < needed) {
            throw DomainExceeded("BetProblem: utility domain_max " + std::to_string(u_.domain_max()) +
                                 " < stages * max stage reward = " + std::to_string(needed));
        }
    }

    std::int64_t stages() const { return stages_; }
    const std::vector<Decision>& decisions() const { return decisions_; }
    const UtilityFunction& utility() const { return u_; }

private:
    std::int64_t stages_;
    std::vector<Decision> decisions_;
    UtilityFunction u_;
};

/// levels[k] is R_k, the sorted set of achievable cumulative rewards after k
/// stages; levels[0] = {0}.
struct StateSpace {
    std::vector<std::vector<Money>> levels;
};

/// R_k by iterated sumset of the union of decision supports, in exact integer
/// arithmetic. Throws DomainExceeded if max(R_n) exceeds the utility domain.
inline StateSpace reachable_states(const BetProblem& p) {
    StateSpace space;
    space.levels.resize(static_cast<std::size_t>(p.stages()) + 1);
    space.levels[0] = {Money(0)};
    std::set<Money> step_rewards;
    for (const auto& d : p.decisions()) {
        for (const auto& [m, prob] : d.reward.outcomes()) step_rewards.insert(m);
    }
    for (std::int64_t k = 1; k <= p.stages(); ++k) {
        std::set<Money> next;
        for (Money r : space.levels[static_cast<std::size_t>(k - 1)]) {
            for (Money m : step_rewards) next.insert(r + m);
        }
        space.levels[static_cast<std::size_t>(k)].assign(next.begin(), next.end());
    }
    const Money top = space.levels.back().back();
    if (top.as_double() > p.utility().domain_max()) {
        throw DomainExceeded("reachable cumulative reward " + std::to_string(top.amount()) +
                             " exceeds utility domain_max " +
                             std::to_string(p.utility().domain_max()));
    }
    return space;
}

/// Value and chosen decision for one (stage, state) cell.
struct DPEntry {
    double value;
    std::size_t decision;
};

/// values[k-1] maps each state r in R_{k-1} to the optimal continuation entry
/// X_k(r). The boundary X_{n+1} = 0 is implicit.
struct DPTable {
    std::vector<std::map<Money, DPEntry>> values;
};

/// Complete contingent plan: each node fixes the decision at one reachable
/// (stage, cumulative reward) point; children cover the chosen decision's
/// support exactly. Depth is exactly the stage count.
struct PolicyNode {
    std::int64_t stage = 0;
    Money cumulative;
    std::size_t decision = 0;
    double value = 0.0;  // expected conditional utility of stages stage..n under the subtree
    std::vector<std::pair<Money, PolicyNode>> children;  // keyed by realized stage reward
};

struct PolicyTree {
    std::int64_t stages = 0;
    PolicyNode root;
};

struct SolveResult {
    DPTable table;
    PolicyTree tree;
    double root_value;
};

namespace detail {

inline PolicyNode materialize_policy(const BetProblem& p, const DPTable& table, std::int64_t stage,
                                     Money cumulative) {
    const DPEntry& entry = table.values[static_cast<std::size_t>(stage - 1)].at(cumulative);
    PolicyNode node;
    node.stage = stage;
    node.cumulative = cumulative;
    node.decision = entry.decision;
    node.value = entry.value;
    if (stage < p.stages()) {
        const Lottery& reward = p.decisions()[entry.decision].reward;
        node.children.reserve(reward.size());
        for (const auto& [m, prob] : reward.outcomes()) {
            node.children.emplace_back(m, materialize_policy(p, table, stage + 1, cumulative + m));
        }
    }
    return node;
}

}  // namespace detail

/**
 * Backward induction on the conditional-utility recursion. With X_{n+1} = 0,
 * for stages k = n..2 and every r in R_{k-1}:
 *
 *     X_k(r) = max over d of sum over stage rewards m of
 *              p(m|d) * [ (u(r+m) - u(r)) + X_{k+1}(r+m) ]
 *
 * and at the root X_1 = max over d of sum of p(m|d) * [ u(m) + X_2(m) ].
 * Ties in the max go to the lowest decision index, so results are
 * reproducible. The conditional increments telescope, so X_1 equals the
 * expected utility of final wealth under the returned policy.
 */
inline SolveResult solve(const BetProblem& p) {
    const StateSpace space = reachable_states(p);
    const std::int64_t n = p.stages();
    const UtilityFunction& u = p.utility();

    DPTable table;
    table.values.resize(static_cast<std::size_t>(n));
    std::map<Money, double> next;  // X_{k+1}, empty map means the zero boundary
    for (std::int64_t k = n; k >= 1; --k) {
        std::map<Money, DPEntry>& level = table.values[static_cast<std::size_t>(k - 1)];
        for (Money r : space.levels[static_cast<std::size_t>(k - 1)]) {
            const double u_r = (k > 1) ? u(r) : 0.0;
            DPEntry best{0.0, 0};
            for (std::size_t d = 0; d < p.decisions().size(); ++d) {
                double v = 0.0;
                for (const auto& [m, prob] : p.decisions()[d].reward.outcomes()) {
                    const Money total = r + m;
                    const double continuation = (k == n) ? 0.0 : next.at(total);
                    const double gain = (k > 1) ? u(total) - u_r : u(m);
                    v += prob * (gain + continuation);
                }
                if (d == 0 || v > best.value) best = DPEntry{v, d};
            }
            level.emplace(r, best);
        }
        next.clear();
        for (const auto& [r, e] : level) next.emplace(r, e.value);
    }

    SolveResult result{std::move(table), PolicyTree{}, 0.0};
    result.root_value = result.table.values[0].at(Money(0)).value;
    result.tree.stages = n;
    result.tree.root = detail::materialize_policy(p, result.table, 1, Money(0));
    return result;
}

struct PolicyEvaluation {
    double value;
    Lottery final_wealth;
};

namespace detail {

inline void propagate_policy(const BetProblem& p, const PolicyNode& node, Money cumulative,
                             double prob, std::map<Money, double>& wealth) {
    if (node.stage < 1 || node.stage > p.stages()) {
        throw MalformedTree("node stage " + std::to_string(node.stage) + " outside 1.." +
                            std::to_string(p.stages()));
    }
    if (node.cumulative != cumulative) {
        throw MalformedTree("node at stage " + std::to_string(node.stage) +
                            " records cumulative " + std::to_string(node.cumulative.amount()) +
                            ", expected " + std::to_string(cumulative.amount()));
    }
    if (node.decision >= p.decisions().size()) {
        throw MalformedTree("decision index " + std::to_string(node.decision) + " out of range");
    }
    const Lottery& reward = p.decisions()[node.decision].reward;
    if (node.stage == p.stages()) {
        if (!node.children.empty()) throw MalformedTree("leaf stage has children");
        for (const auto& [m, pr] : reward.outcomes()) wealth[cumulative + m] += prob * pr;
        return;
    }
    if (node.children.size() != reward.size()) {
        throw MalformedTree("node at stage " + std::to_string(node.stage) + " has " +
                            std::to_string(node.children.size()) + " children, decision support has " +
                            std::to_string(reward.size()));
    }
    for (const auto& [m, pr] : reward.outcomes()) {
        const PolicyNode* child = nullptr;
        for (const auto& [key, c] : node.children) {
            if (key == m) {
                child = &c;
                break;
            }
        }
        if (child == nullptr) {
            throw MalformedTree("no child for stage reward " + std::to_string(m.amount()));
        }
        propagate_policy(p, *child, cumulative + m, prob * pr, wealth);
    }
}

}  // namespace detail

/// Exact distribution of final cumulative reward under the tree (forward
/// probability propagation) and its expected utility.
inline PolicyEvaluation evaluate_policy(const BetProblem& p, const PolicyTree& tree) {
    if (tree.stages != p.stages()) {
        throw MalformedTree("tree depth " + std::to_string(tree.stages) + " != problem stages " +
                            std::to_string(p.stages()));
    }
    std::map<Money, double> wealth;
    detail::propagate_policy(p, tree.root, Money(0), 1.0, wealth);
    std::vector<std::pair<Money, double>> pairs(wealth.begin(), wealth.end());
    Lottery final_wealth = make_lottery(pairs);
    return PolicyEvaluation{expected_utility(p.utility(), final_wealth), final_wealth};
}

namespace detail {

inline PolicyNode build_myopic(const BetProblem& p, std::int64_t stage, Money cumulative) {
    const UtilityFunction& u = p.utility();
    std::size_t best_d = 0;
    double best_gain = 0.0;
    for (std::size_t d = 0; d < p.decisions().size(); ++d) {
        const double gain = conditional_expected_utility(u, p.decisions()[d].reward, cumulative);
        if (d == 0 || gain > best_gain) {
            best_gain = gain;
            best_d = d;
        }
    }
    PolicyNode node;
    node.stage = stage;
    node.cumulative = cumulative;
    node.decision = best_d;
    const Lottery& reward = p.decisions()[best_d].reward;
    double value = 0.0;
    for (const auto& [m, prob] : reward.outcomes()) {
        const double gain = (stage > 1) ? u(cumulative + m) - u(cumulative) : u(m);
        double continuation = 0.0;
        if (stage < p.stages()) {
            PolicyNode child = build_myopic(p, stage + 1, cumulative + m);
            continuation = child.value;
            node.children.emplace_back(m, std::move(child));
        }
        value += prob * (gain + continuation);
    }
    node.value = value;
    return node;
}

}  // namespace detail

/// The stage-greedy comparator: at every reachable state, picks the decision
/// maximizing the single-stage conditional expected utility and ignores the
/// continuation value. Ties go to the lowest decision index.
inline PolicyTree stagewise_myopic_policy(const BetProblem& p) {
    PolicyTree tree;
    tree.stages = p.stages();
    tree.root = detail::build_myopic(p, 1, Money(0));
    return tree;
}

/// Indented text rendering of a policy tree.
inline std::string render_policy_tree(const BetProblem& p, const PolicyTree& tree) {
    std::ostringstream out;
    auto walk = [&](auto&& self, const PolicyNode& node, int indent) -> void {
        out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << "stage " << node.stage
            << " | cum " << node.cumulative.amount() << " | choose "
            << p.decisions()[node.decision].name << " | value " << node.value << "\n";
        for (const auto& [m, child] : node.children) {
            out << std::string(static_cast<std::size_t>(indent) * 2 + 2, ' ') << "on reward "
                << m.amount() << ":\n";
            self(self, child, indent + 2);
        }
    };
    walk(walk, tree.root, 0);
    return out.str();
}

}  // namespace betlab
