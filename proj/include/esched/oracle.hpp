#ifndef ESCHED_ORACLE_HPP
#define ESCHED_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "esched/core.hpp"
#include "esched/lp_format.hpp"
#include "esched/spaces.hpp"

namespace esched::oracle {

struct OracleResult {
    double objective = 0.0;
    double tec = 0.0;
    int cmax = 0;
    Solution solution;
    std::uint64_t feasible_count = 0;
};

/// Observer invoked on every feasible start vector during enumeration.
using FeasibleHook = std::function<void(const std::vector<int>& starts, double tec, int cmax)>;

namespace detail {

// Static start windows from precedence chains and the machine ramps, derived
// here with plain recursions so the oracle does not lean on the solver-side
// distance matrix.
struct StaticWindows {
    std::vector<int> lo, hi;  // 1-based per task id
};

inline StaticWindows static_windows(const Instance& inst) {
    const int n = inst.num_tasks();
    const int h = inst.horizon;
    auto pred = inst.predecessors();
    auto succ = inst.successors();
    std::vector<std::optional<int>> in_memo(static_cast<std::size_t>(n) + 1), out_memo(
                                                                                  static_cast<std::size_t>(n) + 1);
    auto lp_in = [&](auto&& self, int j) -> int {
        auto& m = in_memo[static_cast<std::size_t>(j)];
        if (m) return *m;
        int best = 0;
        for (int u : pred[static_cast<std::size_t>(j)])
            best = std::max(best, self(self, u) + inst.task(u).duration);
        m = best;
        return best;
    };
    auto lp_out = [&](auto&& self, int j) -> int {
        auto& m = out_memo[static_cast<std::size_t>(j)];
        if (m) return *m;
        int best = 0;
        for (int v : succ[static_cast<std::size_t>(j)])
            best = std::max(best, inst.task(v).duration + self(self, v));
        m = best;
        return best;
    };
    StaticWindows w;
    w.lo.assign(static_cast<std::size_t>(n) + 1, 1);
    w.hi.assign(static_cast<std::size_t>(n) + 1, h);
    const auto ramp_up = inst.transitions.duration(State::off, State::proc);
    const auto ramp_down = inst.transitions.duration(State::proc, State::off);
    for (int j = 1; j <= n; ++j) {
        const int p = inst.task(j).duration;
        w.lo[static_cast<std::size_t>(j)] = 1 + lp_in(lp_in, j);
        w.hi[static_cast<std::size_t>(j)] = h - p + 1 - lp_out(lp_out, j);
        if (inst.is_energy(j)) {
            w.lo[static_cast<std::size_t>(j)] =
                std::max(w.lo[static_cast<std::size_t>(j)], ramp_up ? 2 + *ramp_up : h + 1);
            w.hi[static_cast<std::size_t>(j)] =
                std::min(w.hi[static_cast<std::size_t>(j)], ramp_down ? h - *ramp_down - p : 0);
        }
    }
    return w;
}

// enumeration order: a topological order that serves the energy tasks as
// early as possible, so machine pruning kicks in high up the tree
inline std::vector<int> enumeration_order(const Instance& inst) {
    const int n = inst.num_tasks();
    std::vector<int> indeg(static_cast<std::size_t>(n) + 1, 0);
    auto succ = inst.successors();
    for (auto [u, v] : inst.precedence) indeg[static_cast<std::size_t>(v)]++;
    std::vector<int> order;
    std::vector<int> ready;
    for (int id = 1; id <= n; ++id)
        if (indeg[static_cast<std::size_t>(id)] == 0) ready.push_back(id);
    auto better = [&](int a, int b) {
        if (inst.is_energy(a) != inst.is_energy(b)) return inst.is_energy(a);
        return a < b;
    };
    while (!ready.empty()) {
        auto it = ready.begin();
        for (auto jt = ready.begin(); jt != ready.end(); ++jt)
            if (better(*jt, *it)) it = jt;
        const int u = *it;
        ready.erase(it);
        order.push_back(u);
        for (int v : succ[static_cast<std::size_t>(u)])
            if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    }
    return order;
}

struct Sweep {
    const Instance& inst;
    const spaces::SpacesTable& table;
    const std::vector<ObjectiveWeights>& weight_sets;

    StaticWindows windows = static_windows(inst);
    std::vector<int> order = enumeration_order(inst);
    std::vector<std::vector<int>> pred = inst.predecessors();
    std::vector<int> starts;
    std::vector<std::vector<int>> usage;  // per resource, per interval
    std::vector<std::pair<int, int>> energy_blocks;
    int energy_remaining = 0;
    double current_tec = 0.0;
    std::uint64_t feasible_count = 0;

    struct Best {
        double objective = 0.0;
        double tec = 0.0;
        int cmax = 0;
        std::vector<int> starts;
        bool found = false;
    };
    std::vector<Best> best;

    Sweep(const Instance& i, const spaces::SpacesTable& t, const std::vector<ObjectiveWeights>& w)
        : inst(i), table(t), weight_sets(w) {
        starts.assign(inst.tasks.size(), 0);
        usage.assign(inst.capacities.size(),
                     std::vector<int>(static_cast<std::size_t>(inst.horizon) + 1, 0));
        best.resize(w.size());
        energy_remaining = static_cast<int>(inst.energy_ids().size());
    }

    // total transition cost once the energy placement is complete; nullopt if
    // some machine gap admits no state sequence
    std::optional<double> gaps_cost() const {
        auto blocks = energy_blocks;
        std::sort(blocks.begin(), blocks.end());
        double total = 0.0;
        int prev_end = 0;
        for (auto [s, e] : blocks) {
            if (s != prev_end + 1) {
                const auto c = table.transition_cost(prev_end + 1, s);
                if (!c) return std::nullopt;
                total += *c;
            }
            prev_end = e;
        }
        const auto c = table.transition_cost(prev_end + 1, inst.horizon + 1);
        if (!c) return std::nullopt;
        return total + *c;
    }

    FeasibleHook hook;

    void complete() {
        ++feasible_count;
        int cmax = 0;
        for (int id = 1; id <= inst.num_tasks(); ++id)
            cmax = std::max(cmax, starts[static_cast<std::size_t>(id - 1)] + inst.task(id).duration - 1);
        if (hook) hook(starts, current_tec, cmax);
        for (std::size_t w = 0; w < weight_sets.size(); ++w) {
            const double obj = scaled_objective(weight_sets[w], current_tec, cmax);
            Best& b = best[w];
            if (!b.found || obj < b.objective - kCostTol ||
                (obj < b.objective + kCostTol && starts < b.starts)) {
                b.found = true;
                b.objective = obj;
                b.tec = current_tec;
                b.cmax = cmax;
                b.starts = starts;
            }
        }
    }

    void enumerate(std::size_t depth) {
        if (depth == order.size()) {
            complete();
            return;
        }
        const int id = order[static_cast<std::size_t>(depth)];
        const Task& t = inst.task(id);
        int lo = windows.lo[static_cast<std::size_t>(id)];
        const int hi = windows.hi[static_cast<std::size_t>(id)];
        for (int u : pred[static_cast<std::size_t>(id)])
            lo = std::max(lo, starts[static_cast<std::size_t>(u - 1)] + inst.task(u).duration);
        for (int s = lo; s <= hi; ++s) {
            bool ok = true;
            if (inst.is_energy(id)) {
                for (auto [bs, be] : energy_blocks)
                    if (s <= be && bs <= s + t.duration - 1) { ok = false; break; }
            } else {
                for (int i = s; ok && i <= s + t.duration - 1; ++i)
                    for (std::size_t k = 1; k < usage.size(); ++k)
                        if (usage[k][static_cast<std::size_t>(i)] + t.demand[k] > inst.capacities[k]) {
                            ok = false;
                            break;
                        }
            }
            if (!ok) continue;
            starts[static_cast<std::size_t>(id - 1)] = s;
            if (inst.is_energy(id)) {
                energy_blocks.emplace_back(s, s + t.duration - 1);
                --energy_remaining;
                bool descend = true;
                double saved_tec = current_tec;
                if (energy_remaining == 0) {
                    const auto gc = gaps_cost();
                    if (!gc) {
                        descend = false;
                    } else {
                        double jobs = 0.0;
                        for (auto [task, start] : energy_assignment())
                            jobs += table.job_cost(inst.task(task).duration, start);
                        current_tec = jobs + *gc;
                    }
                }
                if (descend) enumerate(depth + 1);
                current_tec = saved_tec;
                ++energy_remaining;
                energy_blocks.pop_back();
            } else {
                for (int i = s; i <= s + t.duration - 1; ++i)
                    for (std::size_t k = 1; k < usage.size(); ++k)
                        usage[k][static_cast<std::size_t>(i)] += t.demand[k];
                enumerate(depth + 1);
                for (int i = s; i <= s + t.duration - 1; ++i)
                    for (std::size_t k = 1; k < usage.size(); ++k)
                        usage[k][static_cast<std::size_t>(i)] -= t.demand[k];
            }
            starts[static_cast<std::size_t>(id - 1)] = 0;
        }
    }

    std::map<int, int> energy_assignment() const {
        std::map<int, int> a;
        for (int id : inst.energy_ids()) a[id] = starts[static_cast<std::size_t>(id - 1)];
        return a;
    }
};

inline Solution assemble(const Instance& inst, const spaces::SpacesTable& table,
                         const std::vector<int>& starts) {
    std::vector<std::pair<int, int>> blocks;
    for (int id : inst.energy_ids())
        blocks.emplace_back(starts[static_cast<std::size_t>(id - 1)],
                            starts[static_cast<std::size_t>(id - 1)] + inst.task(id).duration - 1);
    std::sort(blocks.begin(), blocks.end());
    std::vector<StatePair> omega;
    int prev_end = 0;
    for (auto [s, e] : blocks) {
        if (s != prev_end + 1)
            for (const StatePair& w : table.reconstruct(prev_end + 1, s)) omega.push_back(w);
        for (int i = s; i <= e; ++i) omega.push_back({State::proc, State::proc});
        prev_end = e;
    }
    for (const StatePair& w : table.reconstruct(prev_end + 1, inst.horizon + 1)) omega.push_back(w);
    return Solution{starts, std::move(omega)};
}

}  // namespace detail

inline void guard_size(const Instance& inst) {
    if (inst.num_tasks() > 10 || inst.horizon > 18)
        throw std::invalid_argument("oracle limited to 10 tasks and horizon 18");
}

/// Exhaustive optimum for several weight settings in one sweep of the
/// feasible start vectors. Ties break toward the lexicographically smallest
/// start vector.
inline std::vector<OracleResult> brute_force_multi(const Instance& inst,
                                                   const std::vector<ObjectiveWeights>& weight_sets,
                                                   FeasibleHook hook = nullptr) {
    guard_size(inst);
    inst.validate_or_throw();
    auto table = spaces::build_spaces(inst.transitions, inst.tariff);
    detail::Sweep sweep(inst, table, weight_sets);
    sweep.hook = std::move(hook);
    sweep.enumerate(0);
    std::vector<OracleResult> out;
    for (const auto& b : sweep.best) {
        if (!b.found) throw std::invalid_argument("no feasible solution exists within the horizon");
        OracleResult r;
        r.objective = b.objective;
        r.tec = b.tec;
        r.cmax = b.cmax;
        r.solution = detail::assemble(inst, table, b.starts);
        r.feasible_count = sweep.feasible_count;
        out.push_back(std::move(r));
    }
    return out;
}

inline OracleResult brute_force(const Instance& inst, const ObjectiveWeights& weights) {
    return brute_force_multi(inst, {weights}).front();
}

// ---------------------------------------------------------------------------
// Monolithic time-indexed model export
// ---------------------------------------------------------------------------

/// Full time-indexed model over all tasks, with explicit transition variables
/// and a dummy task tracking the makespan; LP text for external cross-checks.
inline void export_monolithic(const Instance& inst, const ObjectiveWeights& weights,
                              std::ostream& os) {
    const int h = inst.horizon;
    const int n = inst.num_tasks();
    const int dummy = n + 1;
    auto table = spaces::build_spaces(inst.transitions, inst.tariff);
    const auto ramp_up = inst.transitions.duration(State::off, State::proc);
    const auto ramp_down = inst.transitions.duration(State::proc, State::off);

    auto var_x = [](int j, int i) { return "x_" + std::to_string(j) + "_" + std::to_string(i); };
    auto var_z = [](int l, int m) { return "z_" + std::to_string(l) + "_" + std::to_string(m); };

    lp::Writer lp;
    lp.comment("monolithic time-indexed model for instance " + (inst.name.empty() ? "?" : inst.name));
    const double tec_scale = weights.alpha / weights.lb_tec;
    const double ms_scale = (1.0 - weights.alpha) / weights.lb_rcpsp;

    for (int j = 1; j <= n; ++j) {
        const int p = inst.task(j).duration;
        for (int i = 1; i + p - 1 <= h; ++i) {
            if (inst.is_energy(j)) lp.objective_term(tec_scale * table.job_cost(p, i), var_x(j, i));
            lp.binary(var_x(j, i));
        }
    }
    for (int t = 1; t <= h + 1; ++t) {
        lp.objective_term(ms_scale * static_cast<double>(t - 1), var_x(dummy, t));
        lp.binary(var_x(dummy, t));
    }
    for (int l = 1; l <= h; ++l)
        for (int m = l + 1; m <= h + 1; ++m)
            if (auto c = table.transition_cost(l, m)) {
                lp.objective_term(tec_scale * *c, var_z(l, m));
                lp.binary(var_z(l, m));
            }

    // resource capacities
    for (std::size_t k = 0; k < inst.capacities.size(); ++k)
        for (int i = 1; i <= h; ++i) {
            auto& r = lp.row("cap_" + std::to_string(k) + "_" + std::to_string(i), '<',
                             static_cast<double>(inst.capacities[k]));
            for (int j = 1; j <= n; ++j) {
                const int p = inst.task(j).duration;
                const int d = inst.task(j).demand[k];
                if (d == 0) continue;
                for (int s = std::max(1, i - p + 1); s <= i && s + p - 1 <= h; ++s)
                    r.terms.push_back({static_cast<double>(d), var_x(j, s)});
            }
        }
    // every task, the dummy included, is scheduled exactly once
    for (int j = 1; j <= n; ++j) {
        const int p = inst.task(j).duration;
        auto& r = lp.row("assign_" + std::to_string(j), '=', 1.0);
        for (int i = 1; i + p - 1 <= h; ++i) r.terms.push_back({1.0, var_x(j, i)});
    }
    {
        auto& r = lp.row("assign_" + std::to_string(dummy), '=', 1.0);
        for (int t = 1; t <= h + 1; ++t) r.terms.push_back({1.0, var_x(dummy, t)});
    }
    // precedence arcs
    for (auto [u, v] : inst.precedence) {
        auto& r = lp.row("prec_" + std::to_string(u) + "_" + std::to_string(v), '>',
                         static_cast<double>(inst.task(u).duration));
        for (int i = 1; i + inst.task(v).duration - 1 <= h; ++i)
            r.terms.push_back({static_cast<double>(i), var_x(v, i)});
        for (int i = 1; i + inst.task(u).duration - 1 <= h; ++i)
            r.terms.push_back({-static_cast<double>(i), var_x(u, i)});
    }
    // machine cover: processing or an optimal transition at every interval
    for (int i = 1; i <= h; ++i) {
        auto& r = lp.row("cover_" + std::to_string(i), '=', 1.0);
        for (int j : inst.energy_ids()) {
            const int p = inst.task(j).duration;
            for (int s = std::max(1, i - p + 1); s <= i && s + p - 1 <= h; ++s)
                r.terms.push_back({1.0, var_x(j, s)});
        }
        for (int l = 1; l <= i; ++l)
            for (int m = i + 1; m <= h + 1; ++m)
                if (table.transition_cost(l, m)) r.terms.push_back({1.0, var_z(l, m)});
    }
    // boundary exclusions: the machine starts and ends parked off
    for (int j : inst.energy_ids()) {
        const int p = inst.task(j).duration;
        for (int i = 1; i + p - 1 <= h; ++i) {
            const bool in_start = ramp_up && i <= 1 + *ramp_up;
            const bool in_end = ramp_down && i >= h - *ramp_down - p + 1;
            if (in_start || in_end) {
                auto& r = lp.row("fix_" + std::to_string(j) + "_" + std::to_string(i), '=', 0.0);
                r.terms.push_back({1.0, var_x(j, i)});
            }
        }
    }
    // the dummy starts only after every completion, so its start minus one is
    // the makespan
    for (int j = 1; j <= n; ++j) {
        auto& r = lp.row("dummy_" + std::to_string(j), '>',
                         static_cast<double>(inst.task(j).duration));
        for (int t = 1; t <= h + 1; ++t) r.terms.push_back({static_cast<double>(t), var_x(dummy, t)});
        for (int i = 1; i + inst.task(j).duration - 1 <= h; ++i)
            r.terms.push_back({-static_cast<double>(i), var_x(j, i)});
    }
    lp.write(os);
}

}  // namespace esched::oracle

#endif  // ESCHED_ORACLE_HPP
