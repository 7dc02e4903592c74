#ifndef ESCHED_SUBPROBLEM_HPP
#define ESCHED_SUBPROBLEM_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esched/core.hpp"

namespace esched::subproblem {

/// Start interval per energy-intensive task, as imposed by the master.
using FixedStarts = std::map<int, int>;

enum class Verdict { feasible, infeasible, unknown };

struct Result {
    Verdict verdict = Verdict::unknown;
    std::vector<int> schedule;        // full start vector when feasible
    double objective = 0.0;           // makespan or weighted tardiness
    bool proven_optimal = false;
    std::vector<int> conflict;        // energy-task ids when infeasible
    bool conflict_minimal = false;
    std::uint64_t nodes_used = 0;
};

/// Search budgets are node counts so results are reproducible; wall_ms is an
/// optional backstop for interactive use (0 disables it).
struct Budget {
    std::uint64_t nodes = 1'000'000;
    std::uint64_t wall_ms = 0;
};

namespace detail {

struct BudgetHit {};

class Engine {
public:
    enum class Goal { feasibility, makespan, tardiness };

    Engine(const Instance& inst, Goal goal)
        : inst_(inst), goal_(goal), horizon_(inst.horizon) {
        const int n = inst.num_tasks();
        est_.assign(static_cast<std::size_t>(n) + 1, 1);
        lst_.assign(static_cast<std::size_t>(n) + 1, 0);
        decided_.assign(static_cast<std::size_t>(n) + 1, false);
        for (int id = 1; id <= n; ++id)
            lst_[static_cast<std::size_t>(id)] = horizon_ - inst.task(id).duration + 1;
        succ_ = inst.successors();
        pred_ = inst.predecessors();
        capacity_.assign(inst.capacities.size(),
                         std::vector<int>(static_cast<std::size_t>(horizon_) + 1, 0));
        for (std::size_t k = 0; k < inst.capacities.size(); ++k)
            for (int i = 1; i <= horizon_; ++i)
                capacity_[k][static_cast<std::size_t>(i)] = inst.capacities[k];
        due_.assign(static_cast<std::size_t>(n) + 1, 0.0);
        weight_.assign(static_cast<std::size_t>(n) + 1, 0.0);
    }

    void set_capacity_profile(std::size_t resource, const std::vector<int>& per_interval) {
        if (resource >= capacity_.size() || static_cast<int>(per_interval.size()) != horizon_)
            throw std::invalid_argument("capacity profile shape mismatch");
        for (int i = 1; i <= horizon_; ++i)
            capacity_[resource][static_cast<std::size_t>(i)] = per_interval[static_cast<std::size_t>(i - 1)];
    }

    void set_tardiness(const std::vector<double>& due, const std::vector<double>& weight) {
        for (int id = 1; id <= inst_.num_tasks(); ++id) {
            due_[static_cast<std::size_t>(id)] = due[static_cast<std::size_t>(id - 1)];
            weight_[static_cast<std::size_t>(id)] = weight[static_cast<std::size_t>(id - 1)];
        }
    }

    void fix(int id, int start) {
        est_[static_cast<std::size_t>(id)] = std::max(est_[static_cast<std::size_t>(id)], start);
        lst_[static_cast<std::size_t>(id)] = std::min(lst_[static_cast<std::size_t>(id)], start);
        decided_[static_cast<std::size_t>(id)] = true;
    }

    Result solve(std::uint64_t node_budget, std::uint64_t wall_ms = 0) {
        Result res;
        nodes_left_ = node_budget;
        deadline_.reset();
        if (wall_ms > 0)
            deadline_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(wall_ms);
        try {
            if (propagate()) dfs();
            res.proven_optimal = true;
        } catch (const BudgetHit&) {
            res.proven_optimal = false;
        }
        res.nodes_used = node_budget - nodes_left_;
        if (best_schedule_.empty()) {
            res.verdict = res.proven_optimal ? Verdict::infeasible : Verdict::unknown;
        } else {
            res.verdict = Verdict::feasible;
            res.schedule = best_schedule_;
            res.objective = best_cost_;
        }
        return res;
    }

private:
    double completion_cost(const std::vector<int>& starts) const {
        if (goal_ == Goal::tardiness) {
            double twt = 0.0;
            for (int id = 1; id <= inst_.num_tasks(); ++id) {
                const double c = starts[static_cast<std::size_t>(id - 1)] + inst_.task(id).duration - 1;
                twt += weight_[static_cast<std::size_t>(id)] *
                       std::max(c - due_[static_cast<std::size_t>(id)], 0.0);
            }
            return twt;
        }
        int cmax = 0;
        for (int id = 1; id <= inst_.num_tasks(); ++id)
            cmax = std::max(cmax, starts[static_cast<std::size_t>(id - 1)] + inst_.task(id).duration - 1);
        return static_cast<double>(cmax);
    }

    double node_lower_bound() const {
        if (goal_ == Goal::tardiness) {
            double twt = 0.0;
            for (int id = 1; id <= inst_.num_tasks(); ++id) {
                const double c = est_[static_cast<std::size_t>(id)] + inst_.task(id).duration - 1;
                twt += weight_[static_cast<std::size_t>(id)] *
                       std::max(c - due_[static_cast<std::size_t>(id)], 0.0);
            }
            return twt;
        }
        int cmax = 0;
        for (int id = 1; id <= inst_.num_tasks(); ++id)
            cmax = std::max(cmax, est_[static_cast<std::size_t>(id)] + inst_.task(id).duration - 1);
        return static_cast<double>(cmax);
    }

    bool propagate() {
        const int n = inst_.num_tasks();
        bool changed = true;
        while (changed) {
            changed = false;
            for (int id = 1; id <= n; ++id) {
                auto& lo = est_[static_cast<std::size_t>(id)];
                auto& hi = lst_[static_cast<std::size_t>(id)];
                for (int u : pred_[static_cast<std::size_t>(id)]) {
                    const int b = est_[static_cast<std::size_t>(u)] + inst_.task(u).duration;
                    if (b > lo) { lo = b; changed = true; }
                }
                for (int v : succ_[static_cast<std::size_t>(id)]) {
                    const int b = lst_[static_cast<std::size_t>(v)] - inst_.task(id).duration;
                    if (b < hi) { hi = b; changed = true; }
                }
                if (lo > hi) return false;
            }
            if (!timetable_pass(changed)) return false;
        }
        return true;
    }

    // Compulsory-part filtering: the profile of interval demand every task must
    // carry regardless of its exact start, used to lift est and lower lst.
    bool timetable_pass(bool& changed) {
        const int n = inst_.num_tasks();
        const std::size_t nres = capacity_.size();
        std::vector<std::vector<int>> profile(nres,
                                              std::vector<int>(static_cast<std::size_t>(horizon_) + 2, 0));
        for (int id = 1; id <= n; ++id) {
            const int lo = lst_[static_cast<std::size_t>(id)];
            const int hi = est_[static_cast<std::size_t>(id)] + inst_.task(id).duration - 1;
            if (lo > hi) continue;
            for (std::size_t k = 0; k < nres; ++k) {
                const int d = inst_.task(id).demand[k];
                if (d == 0) continue;
                profile[k][static_cast<std::size_t>(lo)] += d;
                profile[k][static_cast<std::size_t>(hi) + 1] -= d;
            }
        }
        for (std::size_t k = 0; k < nres; ++k)
            for (int i = 1; i <= horizon_; ++i)
                profile[k][static_cast<std::size_t>(i)] += profile[k][static_cast<std::size_t>(i - 1)];

        for (int id = 1; id <= n; ++id) {
            const Task& t = inst_.task(id);
            auto& lo = est_[static_cast<std::size_t>(id)];
            auto& hi = lst_[static_cast<std::size_t>(id)];
            const int cp_lo = hi;                  // own compulsory part, to discount
            const int cp_hi = lo + t.duration - 1;
            auto fits_at = [&](int s) {
                for (int i = s; i <= s + t.duration - 1; ++i)
                    for (std::size_t k = 0; k < nres; ++k) {
                        const int d = t.demand[k];
                        if (d == 0) continue;
                        int used = profile[k][static_cast<std::size_t>(i)];
                        if (cp_lo <= i && i <= cp_hi) used -= d;
                        if (used + d > capacity_[k][static_cast<std::size_t>(i)]) return false;
                    }
                return true;
            };
            int s = lo;
            while (s <= hi && !fits_at(s)) ++s;
            if (s > hi) return false;
            if (s != lo) { lo = s; changed = true; }
            int e = hi;
            while (e >= lo && !fits_at(e)) --e;
            if (e < lo) return false;
            if (e != hi) { hi = e; changed = true; }
        }
        return true;
    }

    void dfs() {
        const int n = inst_.num_tasks();
        // incumbent-based pruning; for feasibility one witness ends the search
        if (!best_schedule_.empty()) {
            if (goal_ == Goal::feasibility) return;
            if (node_lower_bound() >= best_cost_ - kCostTol) return;
        }
        int pick = 0;
        for (int id = 1; id <= n; ++id) {
            if (decided_[static_cast<std::size_t>(id)]) continue;
            if (pick == 0 || est_[static_cast<std::size_t>(id)] < est_[static_cast<std::size_t>(pick)])
                pick = id;
        }
        if (pick == 0) {
            std::vector<int> starts(static_cast<std::size_t>(n));
            for (int id = 1; id <= n; ++id) starts[static_cast<std::size_t>(id - 1)] =
                est_[static_cast<std::size_t>(id)];
            if (!profile_ok(starts)) return;
            const double cost = completion_cost(starts);
            if (best_schedule_.empty() || cost < best_cost_ - kCostTol) {
                best_schedule_ = starts;
                best_cost_ = cost;
            }
            return;
        }
        const int lo = est_[static_cast<std::size_t>(pick)];
        const int hi = lst_[static_cast<std::size_t>(pick)];
        for (int s = lo; s <= hi; ++s) {
            if (nodes_left_ == 0) throw BudgetHit{};
            --nodes_left_;
            if (deadline_ && (nodes_left_ & 0xFFF) == 0 &&
                std::chrono::steady_clock::now() > *deadline_)
                throw BudgetHit{};
            auto saved_est = est_;
            auto saved_lst = lst_;
            est_[static_cast<std::size_t>(pick)] = s;
            lst_[static_cast<std::size_t>(pick)] = s;
            decided_[static_cast<std::size_t>(pick)] = true;
            if (propagate()) dfs();
            est_ = std::move(saved_est);
            lst_ = std::move(saved_lst);
            decided_[static_cast<std::size_t>(pick)] = false;
            if (goal_ == Goal::feasibility && !best_schedule_.empty()) return;
        }
    }

    bool profile_ok(const std::vector<int>& starts) const {
        const std::size_t nres = capacity_.size();
        std::vector<std::vector<int>> usage(nres,
                                            std::vector<int>(static_cast<std::size_t>(horizon_) + 1, 0));
        for (int id = 1; id <= inst_.num_tasks(); ++id) {
            const Task& t = inst_.task(id);
            const int s = starts[static_cast<std::size_t>(id - 1)];
            for (int i = s; i <= s + t.duration - 1; ++i)
                for (std::size_t k = 0; k < nres; ++k) usage[k][static_cast<std::size_t>(i)] += t.demand[k];
        }
        for (std::size_t k = 0; k < nres; ++k)
            for (int i = 1; i <= horizon_; ++i)
                if (usage[k][static_cast<std::size_t>(i)] > capacity_[k][static_cast<std::size_t>(i)])
                    return false;
        return true;
    }

    const Instance& inst_;
    Goal goal_;
    int horizon_;
    std::vector<int> est_, lst_;
    std::vector<bool> decided_;
    std::vector<std::vector<int>> succ_, pred_;
    std::vector<std::vector<int>> capacity_;
    std::vector<double> due_, weight_;
    std::vector<int> best_schedule_;
    double best_cost_ = 0.0;
    std::uint64_t nodes_left_ = 0;
    std::optional<std::chrono::steady_clock::time_point> deadline_;
};

inline void reject_malformed(const Instance& inst, const FixedStarts& fixed) {
    std::vector<std::pair<int, int>> blocks;
    for (auto [id, start] : fixed) {
        if (id < 1 || id > inst.num_tasks() || !inst.is_energy(id))
            throw std::invalid_argument("fixed start refers to a non-energy task " + std::to_string(id));
        const int p = inst.task(id).duration;
        if (start < 1 || start + p - 1 > inst.horizon)
            throw std::invalid_argument("fixed start of task " + std::to_string(id) + " leaves the horizon");
        blocks.emplace_back(start, start + p - 1);
    }
    std::sort(blocks.begin(), blocks.end());
    for (std::size_t i = 1; i < blocks.size(); ++i)
        if (blocks[i].first <= blocks[i - 1].second)
            throw std::invalid_argument("fixed starts overlap on the machine");
}

inline Engine make_engine(const Instance& inst, const FixedStarts& fixed, Engine::Goal goal) {
    reject_malformed(inst, fixed);
    Engine eng(inst, goal);
    for (auto [id, start] : fixed) eng.fix(id, start);
    return eng;
}

}  // namespace detail

/// Does any schedule of the remaining tasks exist once the energy tasks are
/// pinned to the master's starts?
inline Result solve_feasibility(const Instance& inst, const FixedStarts& fixed, const Budget& budget) {
    auto eng = detail::make_engine(inst, fixed, detail::Engine::Goal::feasibility);
    Result res = eng.solve(budget.nodes, budget.wall_ms);
    if (res.verdict == Verdict::infeasible)
        for (auto [id, start] : fixed) res.conflict.push_back(id);
    return res;
}

/// Minimal makespan under the pinned starts; proven_optimal reports whether
/// the search closed within budget.
inline Result minimize_makespan(const Instance& inst, const FixedStarts& fixed, const Budget& budget) {
    auto eng = detail::make_engine(inst, fixed, detail::Engine::Goal::makespan);
    Result res = eng.solve(budget.nodes, budget.wall_ms);
    if (res.verdict == Verdict::infeasible)
        for (auto [id, start] : fixed) res.conflict.push_back(id);
    return res;
}

/// Deletion-based minimization of an infeasible fixed-start set. Tasks are
/// tried in descending start order; each removal is kept only if the residual
/// problem is still proven infeasible under the per-check budget. The result
/// is always a genuine conflict; `conflict_minimal` is false when a budget
/// interruption left it possibly larger than necessary.
struct ConflictResult {
    std::vector<int> conflict;
    bool minimal = false;
};

inline ConflictResult extract_min_conflict(const Instance& inst, const FixedStarts& fixed,
                                           const Budget& per_check) {
    std::vector<int> order;
    for (auto [id, start] : fixed) order.push_back(id);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (fixed.at(a) != fixed.at(b)) return fixed.at(a) > fixed.at(b);
        return a > b;
    });
    ConflictResult out;
    out.minimal = true;
    std::vector<int> kept = order;
    for (int candidate : order) {
        FixedStarts trial;
        for (int id : kept)
            if (id != candidate) trial[id] = fixed.at(id);
        Result res = solve_feasibility(inst, trial, per_check);
        if (res.verdict == Verdict::infeasible) {
            kept.erase(std::remove(kept.begin(), kept.end(), candidate), kept.end());
        } else if (res.verdict == Verdict::unknown) {
            out.minimal = false;  // keep it: soundness over minimality
        }
    }
    std::sort(kept.begin(), kept.end());
    out.conflict = std::move(kept);
    return out;
}

/// The tardiness-and-blocking variant: due dates, tardiness weights, and
/// per-interval capacity profiles that may block a resource entirely.
struct TwtInstance {
    Instance base;
    std::vector<double> due;                         // one per task
    std::vector<double> weight;                      // one per task
    std::vector<std::vector<int>> capacity_profile;  // [resource][interval-1], optional per resource
};

inline Result solve_blocking_twt(const TwtInstance& variant, const FixedStarts& fixed,
                                 const Budget& budget) {
    const Instance& inst = variant.base;
    if (variant.due.size() != inst.tasks.size() || variant.weight.size() != inst.tasks.size())
        throw std::invalid_argument("due/weight arity mismatch");
    if (!variant.capacity_profile.empty() && !variant.capacity_profile[0].empty())
        for (int c : variant.capacity_profile[0])
            if (c != 1) throw std::invalid_argument("the machine keeps unit capacity at all times");
    auto eng = detail::make_engine(inst, fixed, detail::Engine::Goal::tardiness);
    for (std::size_t k = 0; k < variant.capacity_profile.size(); ++k)
        if (!variant.capacity_profile[k].empty()) eng.set_capacity_profile(k, variant.capacity_profile[k]);
    eng.set_tardiness(variant.due, variant.weight);
    Result res = eng.solve(budget.nodes, budget.wall_ms);
    if (res.verdict == Verdict::infeasible)
        for (auto [id, start] : fixed) res.conflict.push_back(id);
    return res;
}

}  // namespace esched::subproblem

#endif  // ESCHED_SUBPROBLEM_HPP
