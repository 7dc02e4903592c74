#ifndef ESCHED_TESTS_FIXTURES_HPP
#define ESCHED_TESTS_FIXTURES_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "esched/core.hpp"

namespace fixtures {

using namespace esched;

// deterministic helpers; distributions from <random> are not portable across
// standard libraries, plain modulo is
inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline TransitionSystem demo_transitions() {
    TransitionSystem ts;
    ts.set(State::proc, State::proc, 1, 4);
    ts.set(State::proc, State::idle, 1, 2);
    ts.set(State::proc, State::off, 1, 1);
    ts.set(State::idle, State::idle, 1, 2);
    ts.set(State::idle, State::proc, 1, 2);
    ts.set(State::idle, State::off, std::nullopt, std::nullopt);
    ts.set(State::off, State::off, 1, 0);
    ts.set(State::off, State::proc, 2, 5);
    ts.set(State::off, State::idle, std::nullopt, std::nullopt);
    return ts;
}

/// Eight-task sample with three machine-bound tasks, the running example of
/// the whole suite. Known optimum at alpha = 0.75: makespan 12, energy 172.
inline Instance demo_instance() {
    Instance inst;
    inst.name = "demo8";
    inst.horizon = 16;
    inst.tariff = {2, 1, 2, 1, 6, 16, 14, 3, 2, 5, 3, 15, 3, 2, 1, 2};
    inst.capacities = {1, 5, 3};
    const int p[] = {2, 1, 2, 1, 3, 2, 2, 2};
    const int r0[] = {0, 1, 0, 0, 0, 1, 1, 0};
    const int r1[] = {5, 0, 2, 3, 2, 0, 0, 3};
    const int r2[] = {2, 0, 1, 1, 2, 0, 0, 2};
    for (int i = 0; i < 8; ++i)
        inst.tasks.push_back(Task{i + 1, p[i], {r0[i], r1[i], r2[i]}});
    inst.precedence = {{1, 7}, {1, 2}, {7, 4}, {2, 3}, {2, 5}, {3, 4}, {4, 6}, {5, 6}, {6, 8}, {7, 6}};
    inst.transitions = demo_transitions();
    return inst;
}

/// The known optimal schedule of demo_instance() at alpha = 0.75.
inline Solution demo_reference_solution() {
    Solution sol;
    sol.starts = {1, 4, 5, 7, 5, 9, 5, 11};
    auto push = [&](State a, State b, int count) {
        for (int i = 0; i < count; ++i) sol.omega.push_back({a, b});
    };
    push(State::off, State::off, 1);
    push(State::off, State::proc, 2);
    push(State::proc, State::proc, 3);
    push(State::proc, State::idle, 1);
    push(State::idle, State::proc, 1);
    push(State::proc, State::proc, 2);
    push(State::proc, State::off, 1);
    push(State::off, State::off, 5);
    return sol;
}

/// Exhaustive state-sequence minimum for one transition pair; the independent
/// check of the SPACES table. Walks every admissible step sequence. The
/// machine is parked off through the first and last interval of the horizon,
/// so steps covering those intervals must be off dwells.
inline std::optional<double> enum_transition_cost(const TransitionSystem& ts,
                                                  const std::vector<double>& tariff, int l, int m) {
    const int h = static_cast<int>(tariff.size());
    const State source = (l == 1) ? State::off : State::proc;
    const State target = (m == h + 1) ? State::off : State::proc;
    std::optional<double> best;
    auto rec = [&](auto&& self, int point, State s, double acc, StatePair arrived) -> void {
        if (point == m - 1) {
            if (m == h + 1 && !(arrived == StatePair{State::off, State::off})) return;
            if (s == target && (!best || acc < *best)) best = acc;
            return;
        }
        for (State b : kAllStates) {
            if (s == State::proc && b == State::proc) continue;
            if (l == 1 && point == 0 && !(s == State::off && b == State::off)) continue;
            const auto t = ts.duration(s, b);
            if (!t || point + *t > m - 1) continue;
            double span = 0.0;
            for (int i = point + 1; i <= point + *t; ++i) span += tariff[static_cast<std::size_t>(i - 1)];
            self(self, point + *t, b, acc + static_cast<double>(*ts.energy(s, b)) * span, {s, b});
        }
    };
    rec(rec, l - 1, source, 0.0, {source, source});
    return best;
}

/// All-paths maximum of p_u plus inner processing times; the independent
/// check of the distance matrix.
inline std::optional<int> enum_md(const Instance& inst, int u, int v) {
    auto succ = inst.successors();
    std::optional<int> best;
    auto rec = [&](auto&& self, int node, int acc) -> void {
        if (node == v) {
            if (!best || acc > *best) best = acc;
            return;
        }
        for (int w : succ[static_cast<std::size_t>(node)])
            self(self, w, acc + inst.task(node).duration);
    };
    if (u != v)
        for (int w : succ[static_cast<std::size_t>(u)]) rec(rec, w, inst.task(u).duration);
    return best;
}

/// Random transition system: ramps always available, idle legs occasionally
/// missing, all self-loops finite.
inline TransitionSystem random_transitions(std::mt19937_64& rng) {
    TransitionSystem ts;
    ts.set(State::proc, State::proc, 1, rand_int(rng, 1, 5));
    ts.set(State::proc, State::off, rand_int(rng, 1, 2), rand_int(rng, 0, 3));
    ts.set(State::off, State::proc, rand_int(rng, 1, 2), rand_int(rng, 1, 6));
    ts.set(State::off, State::off, rand_int(rng, 1, 2), rand_int(rng, 0, 1));
    ts.set(State::idle, State::idle, 1, rand_int(rng, 1, 3));
    if (rand_int(rng, 0, 3) == 0) {
        ts.set(State::proc, State::idle, std::nullopt, std::nullopt);
        ts.set(State::idle, State::proc, std::nullopt, std::nullopt);
    } else {
        ts.set(State::proc, State::idle, 1, rand_int(rng, 1, 3));
        ts.set(State::idle, State::proc, 1, rand_int(rng, 1, 3));
    }
    if (rand_int(rng, 0, 2) == 0) {
        ts.set(State::idle, State::off, 1, rand_int(rng, 0, 2));
        ts.set(State::off, State::idle, rand_int(rng, 1, 2), rand_int(rng, 1, 3));
    } else {
        ts.set(State::idle, State::off, std::nullopt, std::nullopt);
        ts.set(State::off, State::idle, std::nullopt, std::nullopt);
    }
    return ts;
}

struct TinyOptions {
    int max_tasks = 8;
    int max_energy = 4;
    int max_horizon = 16;
    bool allow_negative_tariff = true;
};

/// Random tiny instance for the oracle-equivalence suites: a handful of
/// tasks, tight-ish horizon, sometimes negative prices. Mostly feasible by
/// construction, occasionally infeasible on purpose.
inline Instance random_tiny_instance(std::mt19937_64& rng, const TinyOptions& opt = {}) {
    Instance inst;
    inst.name = "tiny";
    const int n = rand_int(rng, 4, opt.max_tasks);
    const int n_energy = rand_int(rng, 1, std::min(opt.max_energy, std::max(1, n / 2)));
    std::vector<bool> energy(static_cast<std::size_t>(n) + 1, false);
    // spread the energy tasks over the id range so precedence hits them
    for (int k = 0; k < n_energy; ++k) {
        int id = rand_int(rng, 1, n);
        while (energy[static_cast<std::size_t>(id)]) id = id % n + 1;
        energy[static_cast<std::size_t>(id)] = true;
    }
    inst.capacities = {1, rand_int(rng, 2, 4), rand_int(rng, 2, 4)};
    for (int id = 1; id <= n; ++id) {
        Task t;
        t.id = id;
        if (energy[static_cast<std::size_t>(id)]) {
            t.duration = rand_int(rng, 1, 2);
            t.demand = {1, 0, 0};
        } else {
            t.duration = rand_int(rng, 1, 3);
            t.demand = {0, rand_int(rng, 0, inst.capacities[1]), rand_int(rng, 0, inst.capacities[2])};
        }
        inst.tasks.push_back(t);
    }
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v)
            if (rand_int(rng, 0, 99) < 22) inst.precedence.emplace_back(u, v);
    inst.transitions = (rand_int(rng, 0, 1) == 0) ? demo_transitions() : random_transitions(rng);

    int chain = 0;  // longest processing chain
    {
        std::vector<int> lp(static_cast<std::size_t>(n) + 1, 0);
        for (int v = 1; v <= n; ++v) {
            lp[static_cast<std::size_t>(v)] = inst.task(v).duration;
            for (auto [a, b] : inst.precedence)
                if (b == v)
                    lp[static_cast<std::size_t>(v)] =
                        std::max(lp[static_cast<std::size_t>(v)],
                                 lp[static_cast<std::size_t>(a)] + inst.task(v).duration);
            chain = std::max(chain, lp[static_cast<std::size_t>(v)]);
        }
    }
    int energy_p = 0;
    for (int id = 1; id <= n; ++id)
        if (energy[static_cast<std::size_t>(id)]) energy_p += inst.task(id).duration;
    const int ramps = inst.transitions.duration(State::off, State::proc).value_or(2) +
                      inst.transitions.duration(State::proc, State::off).value_or(1);
    const int need = std::max(chain, energy_p) + ramps + 2;
    inst.horizon = std::min(opt.max_horizon, need + rand_int(rng, 0, 3));

    for (int i = 0; i < inst.horizon; ++i) {
        int c = rand_int(rng, 0, 9);
        if (opt.allow_negative_tariff && rand_int(rng, 0, 9) == 0) c = -rand_int(rng, 1, 4);
        inst.tariff.push_back(c);
    }
    return inst;
}

}  // namespace fixtures

#endif  // ESCHED_TESTS_FIXTURES_HPP
