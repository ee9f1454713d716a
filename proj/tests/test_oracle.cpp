#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "betlab/oracle.hpp"
#include "betlab/simultaneous.hpp"

using namespace betlab;
using Catch::Approx;

namespace {

std::vector<Decision> example3_decisions() {
    return {Decision{"A", make_lottery({{Money(400), 1.0}})},
            Decision{"B", make_lottery({{Money(0), 0.5}, {Money(1000), 0.5}})}};
}

BetProblem example3(std::int64_t stages = 2) {
    return BetProblem(stages, example3_decisions(),
                      UtilityFunction::log_shifted(1000.0 * static_cast<double>(stages)));
}

}  // namespace

TEST_CASE("policy enumeration counts") {
    SECTION("two stages: 4 slots, 16 policies") {
        const auto p = example3(2);
        const auto slots = policy_slots(p);
        CHECK(slots.total == 4);  // {0} at stage 1, {0,400,1000} at stage 2
        CHECK(policy_count(p, slots) == 16);
        CHECK(enumerate_policies(p).size() == 16);
    }
    SECTION("one stage, two decisions: 2 policies") {
        const auto p = example3(1);
        CHECK(enumerate_policies(p).size() == 2);
    }
    SECTION("three stages: count matches the closed form over level sizes") {
        const auto p = example3(3);
        const auto space = reachable_states(p);
        std::size_t slot_total = 0;
        for (std::size_t k = 0; k + 1 < space.levels.size(); ++k) {
            slot_total += space.levels[k].size();
        }
        CHECK(slot_total == 1 + 3 + 6);
        const auto slots = policy_slots(p);
        CHECK(slots.total == slot_total);
        CHECK(policy_count(p, slots) == 1024);  // 2^10
        CHECK(enumerate_policies(p).size() == 1024);
    }
    SECTION("enumeration is lexicographic in the decision indices") {
        const auto all = enumerate_policies(example3(1));
        REQUIRE(all.size() == 2);
        CHECK(all[0].choices == std::vector<std::size_t>{0});
        CHECK(all[1].choices == std::vector<std::size_t>{1});
    }
    SECTION("guard: a rich three-decision problem is too large") {
        std::vector<Decision> decisions = {
            Decision{"A", make_lottery({{Money(0), 0.4}, {Money(100), 0.3}, {Money(300), 0.3}})},
            Decision{"B", make_lottery({{Money(0), 0.5}, {Money(200), 0.25}, {Money(500), 0.25}})},
            Decision{"C", make_lottery({{Money(0), 0.5}, {Money(400), 0.25}, {Money(900), 0.25}})}};
        const BetProblem p(4, std::move(decisions), UtilityFunction::linear(1.0, 3600.0));
        CHECK_THROWS_WITH(best_policy_by_enumeration(p),
                          Catch::Matchers::ContainsSubstring("guard"));
        CHECK_THROWS_AS(best_policy_by_enumeration(p), TooLargeToEnumerate);
    }
}

TEST_CASE("best_policy_by_enumeration") {
    SECTION("two-stage shifted log: sure amount everywhere") {
        const auto p = example3(2);
        const auto best = best_policy_by_enumeration(p);
        CHECK(best.value == Approx(std::log(801.0)).margin(1e-12));
        CHECK(best.policy.choices == std::vector<std::size_t>{0, 0, 0, 0});
        CHECK(best.value == Approx(solve(p).root_value).margin(1e-12));
    }
    SECTION("two-stage linear: lottery everywhere, value 1000") {
        const BetProblem p(2, example3_decisions(), UtilityFunction::linear(1.0, 2000.0));
        const auto best = best_policy_by_enumeration(p);
        CHECK(best.value == Approx(1000.0).margin(1e-12));
        CHECK(best.policy.choices == std::vector<std::size_t>{1, 1, 1, 1});
    }
    SECTION("one stage") {
        const auto best = best_policy_by_enumeration(example3(1));
        CHECK(best.value == Approx(std::log(401.0)).margin(1e-12));
        CHECK(best.policy.choices == std::vector<std::size_t>{0});
    }
    SECTION("no committed allocation beats the adaptive optimum") {
        for (std::int64_t n = 2; n <= 3; ++n) {
            const auto best = best_policy_by_enumeration(example3(n));
            const SimultaneousProblem sim(n, Money(400), Money(1000), 0.5,
                                          UtilityFunction::log_shifted(1000.0 * n));
            for (std::int64_t k = 0; k <= n; ++k) {
                REQUIRE(best.value >= exact_allocation_utility(sim, k) - 1e-12);
            }
        }
    }
}

TEST_CASE("DP agrees with brute force on random small problems") {
    std::mt19937_64 rng(20230601);
    std::uniform_int_distribution<int> n_dist(1, 4);
    std::uniform_int_distribution<int> d_dist(1, 3);
    std::uniform_int_distribution<int> support_dist(1, 3);
    std::uniform_int_distribution<std::int64_t> money_dist(0, 10);
    std::uniform_real_distribution<double> w_dist(0.05, 1.0);

    int done = 0;
    while (done < 40) {
        const int n = n_dist(rng);
        std::vector<Decision> decisions;
        const int nd = d_dist(rng);
        for (int d = 0; d < nd; ++d) {
            const int support = support_dist(rng);
            std::vector<std::pair<Money, double>> pairs;
            double total = 0.0;
            for (int i = 0; i < support; ++i) {
                const double w = w_dist(rng);
                pairs.emplace_back(Money(100 * money_dist(rng)), w);
                total += w;
            }
            for (auto& [m, w] : pairs) w /= total;
            decisions.push_back(Decision{"d" + std::to_string(d), make_lottery(pairs)});
        }
        const double cap = 4001.0;
        const int fam = done % 5;
        UtilityFunction u = fam == 0   ? UtilityFunction::linear(1.0, cap)
                            : fam == 1 ? UtilityFunction::log_shifted(cap)
                            : fam == 2 ? UtilityFunction::power(0.5, cap)
                            : fam == 3 ? UtilityFunction::power(2.0, cap)
                                       : UtilityFunction::exponential(0.001, cap);
        const BetProblem p(n, std::move(decisions), std::move(u));
        const auto slots = policy_slots(p);
        std::uint64_t count = 1;
        bool enumerable = true;
        for (std::size_t i = 0; i < slots.total && enumerable; ++i) {
            count *= p.decisions().size();
            if (count > 20000) enumerable = false;
        }
        if (!enumerable) continue;
        ++done;
        const double dp = solve(p).root_value;
        const double brute = best_policy_by_enumeration(p).value;
        CAPTURE(done, n, fam, slots.total);
        REQUIRE(dp == Approx(brute).margin(1e-9));
    }
}
