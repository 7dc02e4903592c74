#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "esched/core.hpp"
#include "esched/subproblem.hpp"
#include "fixtures.hpp"

using namespace esched;
using namespace esched::subproblem;

namespace {

const Budget kBig{5'000'000, 0};

// exhaustive feasibility check over all start vectors: the slow reference
// for the propagation engine (machine states are out of scope here)
bool enum_feasible(const Instance& inst, const FixedStarts& fixed) {
    const int n = inst.num_tasks();
    std::vector<int> starts(static_cast<std::size_t>(n), 0);
    auto ok_prefix = [&](int count) {
        for (auto [u, v] : inst.precedence)
            if (u <= count && v <= count)
                if (starts[static_cast<std::size_t>(v - 1)] <
                    starts[static_cast<std::size_t>(u - 1)] + inst.task(u).duration)
                    return false;
        std::vector<std::vector<int>> usage(inst.capacities.size(),
                                            std::vector<int>(static_cast<std::size_t>(inst.horizon) + 1, 0));
        for (int id = 1; id <= count; ++id)
            for (int i = starts[static_cast<std::size_t>(id - 1)];
                 i <= starts[static_cast<std::size_t>(id - 1)] + inst.task(id).duration - 1; ++i)
                for (std::size_t k = 0; k < inst.capacities.size(); ++k) {
                    usage[k][static_cast<std::size_t>(i)] += inst.task(id).demand[k];
                    if (usage[k][static_cast<std::size_t>(i)] > inst.capacities[k]) return false;
                }
        return true;
    };
    auto rec = [&](auto&& self, int id) -> bool {
        if (id > n) return true;
        if (auto it = fixed.find(id); it != fixed.end()) {
            starts[static_cast<std::size_t>(id - 1)] = it->second;
            return ok_prefix(id) && self(self, id + 1);
        }
        for (int s = 1; s + inst.task(id).duration - 1 <= inst.horizon; ++s) {
            starts[static_cast<std::size_t>(id - 1)] = s;
            if (ok_prefix(id) && self(self, id + 1)) return true;
        }
        return false;
    };
    return rec(rec, 1);
}

}  // namespace

TEST_CASE("reference fixed starts admit the reference schedule") {
    auto inst = fixtures::demo_instance();
    FixedStarts fixed{{2, 4}, {7, 5}, {6, 9}};
    auto res = minimize_makespan(inst, fixed, kBig);
    REQUIRE(res.verdict == Verdict::feasible);
    CHECK(res.proven_optimal);
    CHECK(res.objective == doctest::Approx(12.0));
    // the witness respects the pinned starts
    CHECK(res.schedule[1] == 4);
    CHECK(res.schedule[6] == 5);
    CHECK(res.schedule[5] == 9);
}

TEST_CASE("no free tasks means a trivial witness") {
    Instance inst;
    inst.name = "machines-only";
    inst.horizon = 10;
    inst.tariff.assign(10, 1.0);
    inst.capacities = {1};
    inst.tasks = {Task{1, 2, {1}}, Task{2, 1, {1}}};
    inst.transitions = fixtures::demo_transitions();
    FixedStarts fixed{{1, 4}, {2, 7}};
    auto res = solve_feasibility(inst, fixed, kBig);
    REQUIRE(res.verdict == Verdict::feasible);
    CHECK(res.schedule == std::vector<int>{4, 7});
}

TEST_CASE("malformed fixed starts are rejected before search") {
    auto inst = fixtures::demo_instance();
    CHECK_THROWS_AS(solve_feasibility(inst, {{1, 3}}, kBig), std::invalid_argument);   // not energy
    CHECK_THROWS_AS(solve_feasibility(inst, {{6, 16}}, kBig), std::invalid_argument);  // escapes h
    CHECK_THROWS_AS(solve_feasibility(inst, {{2, 5}, {7, 5}}, kBig), std::invalid_argument);
}

TEST_CASE("zero budget on a real search returns unknown") {
    auto inst = fixtures::demo_instance();
    auto res = minimize_makespan(inst, {{2, 4}, {7, 5}, {6, 9}}, {0, 0});
    CHECK(res.verdict == Verdict::unknown);
    CHECK(!res.proven_optimal);
}

TEST_CASE("single-task conflicts are found and stay minimal") {
    // an energy task pinned so early that its ancestor chain cannot fit
    Instance inst;
    inst.name = "squeeze";
    inst.horizon = 12;
    inst.tariff.assign(12, 1.0);
    inst.capacities = {1, 1};
    inst.tasks = {Task{1, 3, {0, 1}}, Task{2, 2, {0, 1}}, Task{3, 2, {1, 0}}};
    inst.precedence = {{1, 3}, {2, 3}};
    inst.transitions = fixtures::demo_transitions();
    // tasks 1 and 2 need 5 serial intervals on the unit resource, so task 3
    // cannot start before 6
    FixedStarts fixed{{3, 5}};
    auto res = solve_feasibility(inst, fixed, kBig);
    REQUIRE(res.verdict == Verdict::infeasible);
    CHECK(!enum_feasible(inst, fixed));
    auto conflict = extract_min_conflict(inst, fixed, kBig);
    CHECK(conflict.minimal);
    CHECK(conflict.conflict == std::vector<int>{3});
}

TEST_CASE("pairwise conflict where each singleton is harmless") {
    // two energy tasks squeezing a long free task between them
    Instance inst;
    inst.name = "pincer";
    inst.horizon = 14;
    inst.tariff.assign(14, 1.0);
    inst.capacities = {1, 1};
    inst.tasks = {Task{1, 1, {1, 0}}, Task{2, 4, {0, 1}}, Task{3, 1, {1, 0}}};
    inst.precedence = {{1, 2}, {2, 3}};
    inst.transitions = fixtures::demo_transitions();
    FixedStarts both{{1, 4}, {3, 7}};  // leaves two intervals for a four-interval task
    auto res = solve_feasibility(inst, both, kBig);
    REQUIRE(res.verdict == Verdict::infeasible);
    CHECK(solve_feasibility(inst, {{1, 4}}, kBig).verdict == Verdict::feasible);
    CHECK(solve_feasibility(inst, {{3, 7}}, kBig).verdict == Verdict::feasible);
    auto conflict = extract_min_conflict(inst, both, kBig);
    CHECK(conflict.minimal);
    CHECK(conflict.conflict == std::vector<int>{1, 3});
}

TEST_CASE("minimization lands on a proper subset") {
    // dropping the latest-start member already restores feasibility
    Instance inst;
    inst.name = "tail-heavy";
    inst.horizon = 14;
    inst.tariff.assign(14, 1.0);
    inst.capacities = {1, 1};
    inst.tasks = {Task{1, 1, {1, 0}}, Task{2, 5, {0, 1}}, Task{3, 1, {1, 0}}, Task{4, 1, {1, 0}}};
    inst.precedence = {{1, 2}, {2, 3}};
    inst.transitions = fixtures::demo_transitions();
    FixedStarts fixed{{1, 4}, {3, 8}, {4, 12}};
    auto res = solve_feasibility(inst, fixed, kBig);
    REQUIRE(res.verdict == Verdict::infeasible);
    auto conflict = extract_min_conflict(inst, fixed, kBig);
    CHECK(conflict.minimal);
    CHECK(conflict.conflict == std::vector<int>{1, 3});
    // minimality in the strict sense: every single deletion is feasible
    for (int drop : conflict.conflict) {
        FixedStarts reduced;
        for (int id : conflict.conflict)
            if (id != drop) reduced[id] = fixed.at(id);
        CHECK(solve_feasibility(inst, reduced, kBig).verdict == Verdict::feasible);
    }
}

TEST_CASE("verdicts agree with exhaustive enumeration on tiny instances") {
    std::mt19937_64 rng(31337);
    int infeasible_seen = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto inst = fixtures::random_tiny_instance(rng);
        // pin every energy task somewhere legal on the machine
        FixedStarts fixed;
        int cursor = fixtures::rand_int(rng, 1, 3);
        bool ok = true;
        for (int id : inst.energy_ids()) {
            if (cursor + inst.task(id).duration - 1 > inst.horizon) { ok = false; break; }
            fixed[id] = cursor;
            cursor += inst.task(id).duration + fixtures::rand_int(rng, 0, 2);
        }
        if (!ok) continue;
        auto res = solve_feasibility(inst, fixed, kBig);
        REQUIRE(res.verdict != Verdict::unknown);
        const bool want = enum_feasible(inst, fixed);
        CHECK((res.verdict == Verdict::feasible) == want);
        if (!want) ++infeasible_seen;
        if (res.verdict == Verdict::feasible) {
            // the witness satisfies precedence and capacities
            for (auto [u, v] : inst.precedence)
                CHECK(res.schedule[static_cast<std::size_t>(v - 1)] >=
                      res.schedule[static_cast<std::size_t>(u - 1)] + inst.task(u).duration);
        }
    }
    CHECK(infeasible_seen > 5);
}

TEST_CASE("makespan minimization matches enumeration") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 40; ++trial) {
        auto inst = fixtures::random_tiny_instance(rng);
        auto res = minimize_makespan(inst, {}, kBig);
        if (res.verdict != Verdict::feasible) continue;
        REQUIRE(res.proven_optimal);
        // reference: smallest completion over full enumeration
        int best = inst.horizon + 1;
        std::vector<int> starts(inst.tasks.size(), 0);
        auto rec = [&](auto&& self, int id, int cmax) -> void {
            if (cmax >= best) return;
            if (id > inst.num_tasks()) { best = std::min(best, cmax); return; }
            for (int s = 1; s + inst.task(id).duration - 1 <= inst.horizon; ++s) {
                starts[static_cast<std::size_t>(id - 1)] = s;
                bool ok = true;
                for (auto [u, v] : inst.precedence)
                    if (v == id && u < id &&
                        s < starts[static_cast<std::size_t>(u - 1)] + inst.task(u).duration)
                        ok = false;
                    else if (u == id && v < id &&
                             starts[static_cast<std::size_t>(v - 1)] < s + inst.task(id).duration)
                        ok = false;
                if (!ok) continue;
                std::vector<std::vector<int>> usage(
                    inst.capacities.size(),
                    std::vector<int>(static_cast<std::size_t>(inst.horizon) + 1, 0));
                for (int t = 1; t <= id && ok; ++t)
                    for (int i = starts[static_cast<std::size_t>(t - 1)];
                         i <= starts[static_cast<std::size_t>(t - 1)] + inst.task(t).duration - 1 && ok;
                         ++i)
                        for (std::size_t k = 0; k < inst.capacities.size(); ++k)
                            if ((usage[k][static_cast<std::size_t>(i)] += inst.task(t).demand[k]) >
                                inst.capacities[k])
                                ok = false;
                if (ok) self(self, id + 1, std::max(cmax, s + inst.task(id).duration - 1));
            }
        };
        rec(rec, 1, 0);
        CHECK(res.objective == doctest::Approx(static_cast<double>(best)));
    }
}

TEST_CASE("tardiness optimum matches enumeration on random variants") {
    std::mt19937_64 rng(4545);
    int compared = 0;
    for (int trial = 0; trial < 60 && compared < 30; ++trial) {
        const int n = fixtures::rand_int(rng, 2, 5);
        const int h = fixtures::rand_int(rng, 6, 10);
        Instance inst;
        inst.name = "twt";
        inst.horizon = h;
        inst.tariff.assign(static_cast<std::size_t>(h), 1.0);
        inst.capacities = {1, 2};
        for (int id = 1; id <= n; ++id) {
            const bool energy = id == 1;
            inst.tasks.push_back(Task{id, fixtures::rand_int(rng, 1, 2),
                                      {energy ? 1 : 0, energy ? 0 : fixtures::rand_int(rng, 1, 2)}});
        }
        for (int u = 1; u <= n; ++u)
            for (int v = u + 1; v <= n; ++v)
                if (fixtures::rand_int(rng, 0, 3) == 0) inst.precedence.emplace_back(u, v);
        inst.transitions = fixtures::demo_transitions();

        TwtInstance variant;
        variant.base = inst;
        for (int id = 1; id <= n; ++id) {
            variant.due.push_back(fixtures::rand_int(rng, 1, h));
            variant.weight.push_back(fixtures::rand_int(rng, 1, 3));
        }
        variant.capacity_profile.assign(2, {});
        variant.capacity_profile[1].assign(static_cast<std::size_t>(h), inst.capacities[1]);
        // one dark window on the shared resource
        const int dark = fixtures::rand_int(rng, 1, h - 1);
        variant.capacity_profile[1][static_cast<std::size_t>(dark - 1)] = 0;

        auto res = solve_blocking_twt(variant, {}, kBig);
        if (res.verdict == Verdict::unknown) continue;

        // exhaustive reference
        std::optional<double> best;
        std::vector<int> starts(static_cast<std::size_t>(n), 0);
        auto rec = [&](auto&& self, int id) -> void {
            if (id > n) {
                double twt = 0.0;
                for (int t = 1; t <= n; ++t)
                    twt += variant.weight[static_cast<std::size_t>(t - 1)] *
                           std::max(0.0, starts[static_cast<std::size_t>(t - 1)] +
                                             inst.task(t).duration - 1 -
                                             variant.due[static_cast<std::size_t>(t - 1)]);
                if (!best || twt < *best) best = twt;
                return;
            }
            for (int s = 1; s + inst.task(id).duration - 1 <= h; ++s) {
                starts[static_cast<std::size_t>(id - 1)] = s;
                bool ok = true;
                for (auto [u, v] : inst.precedence)
                    if (u <= id && v <= id &&
                        starts[static_cast<std::size_t>(v - 1)] <
                            starts[static_cast<std::size_t>(u - 1)] + inst.task(u).duration)
                        ok = false;
                std::vector<std::vector<int>> use(
                    2, std::vector<int>(static_cast<std::size_t>(h) + 1, 0));
                for (int t = 1; t <= id && ok; ++t)
                    for (int i = starts[static_cast<std::size_t>(t - 1)];
                         i <= starts[static_cast<std::size_t>(t - 1)] + inst.task(t).duration - 1 && ok;
                         ++i)
                        for (std::size_t k = 0; k < 2; ++k) {
                            use[k][static_cast<std::size_t>(i)] += inst.task(t).demand[k];
                            const int cap = k == 0 ? 1
                                                   : variant.capacity_profile[1]
                                                         [static_cast<std::size_t>(i - 1)];
                            if (use[k][static_cast<std::size_t>(i)] > cap) ok = false;
                        }
                if (ok) self(self, id + 1);
            }
        };
        rec(rec, 1);
        REQUIRE((res.verdict == Verdict::feasible) == best.has_value());
        if (best) CHECK(res.objective == doctest::Approx(*best).epsilon(1e-9));
        ++compared;
    }
    CHECK(compared >= 20);
}

TEST_CASE("determinism: identical budgets give identical results") {
    auto inst = fixtures::demo_instance();
    FixedStarts fixed{{2, 4}, {7, 5}, {6, 9}};
    auto a = minimize_makespan(inst, fixed, {5000, 0});
    auto b = minimize_makespan(inst, fixed, {5000, 0});
    CHECK(a.verdict == b.verdict);
    CHECK(a.schedule == b.schedule);
    CHECK(a.nodes_used == b.nodes_used);
}

TEST_CASE("tardiness variant") {
    TwtInstance variant;
    variant.base = fixtures::demo_instance();
    variant.due.assign(8, 16.0);
    variant.weight.assign(8, 1.0);
    variant.capacity_profile.assign(3, {});

    SUBCASE("due dates beyond the horizon cost nothing") {
        auto res = solve_blocking_twt(variant, {{2, 4}, {7, 5}, {6, 9}}, kBig);
        REQUIRE(res.verdict == Verdict::feasible);
        CHECK(res.objective == doctest::Approx(0.0));
    }

    SUBCASE("one interval late costs the weight") {
        Instance single;
        single.name = "late";
        single.horizon = 8;
        single.tariff.assign(8, 1.0);
        single.capacities = {1};
        single.tasks = {Task{1, 3, {1}}};
        single.transitions = fixtures::demo_transitions();
        TwtInstance v;
        v.base = single;
        v.due = {2.0};  // completion 3 when started at 1
        v.weight = {3.0};
        v.capacity_profile.assign(1, {});
        auto res = solve_blocking_twt(v, {{1, 1}}, kBig);
        REQUIRE(res.verdict == Verdict::feasible);
        CHECK(res.objective == doctest::Approx(3.0));
    }

    SUBCASE("blocked capacity window shifts the optimum") {
        // four tasks on one unit resource; the resource is dark over 3..5
        Instance inst;
        inst.name = "blocked";
        inst.horizon = 12;
        inst.tariff.assign(12, 1.0);
        inst.capacities = {1, 1};
        inst.tasks = {Task{1, 1, {1, 0}}, Task{2, 2, {0, 1}}, Task{3, 1, {0, 1}}, Task{4, 2, {0, 1}}};
        inst.transitions = fixtures::demo_transitions();
        TwtInstance v;
        v.base = inst;
        v.due = {12.0, 2.0, 3.0, 5.0};
        v.weight = {1.0, 2.0, 1.0, 1.0};
        v.capacity_profile.assign(2, {});
        v.capacity_profile[1] = {1, 1, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1};
        auto res = solve_blocking_twt(v, {{1, 4}}, kBig);
        REQUIRE(res.verdict == Verdict::feasible);
        REQUIRE(res.proven_optimal);
        // exhaustive reference over the three free tasks
        double best = 1e18;
        for (int s2 = 1; s2 + 1 <= 12; ++s2)
            for (int s3 = 1; s3 <= 12; ++s3)
                for (int s4 = 1; s4 + 1 <= 12; ++s4) {
                    std::vector<int> use(13, 0);
                    bool ok = true;
                    auto occupy = [&](int s, int p) {
                        for (int i = s; i <= s + p - 1; ++i) {
                            use[static_cast<std::size_t>(i)]++;
                            if (use[static_cast<std::size_t>(i)] >
                                v.capacity_profile[1][static_cast<std::size_t>(i - 1)])
                                ok = false;
                        }
                    };
                    occupy(s2, 2);
                    occupy(s3, 1);
                    occupy(s4, 2);
                    if (!ok) continue;
                    const double twt = 2.0 * std::max(0, s2 + 1 - 2) +
                                       1.0 * std::max(0, s3 - 3) + 1.0 * std::max(0, s4 + 1 - 5);
                    best = std::min(best, twt);
                }
        CHECK(res.objective == doctest::Approx(best));
    }
}
