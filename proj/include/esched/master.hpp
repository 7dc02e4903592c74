#ifndef ESCHED_MASTER_HPP
#define ESCHED_MASTER_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esched/core.hpp"
#include "esched/lp_format.hpp"
#include "esched/precedence.hpp"
#include "esched/spaces.hpp"
#include "esched/subproblem.hpp"

namespace esched::master {

using Assignment = subproblem::FixedStarts;  // energy-task id -> start interval

enum class CutKind { feasibility, nogood, optimality };

inline const char* to_string(CutKind k) {
    switch (k) {
        case CutKind::feasibility: return "feasibility";
        case CutKind::nogood: return "nogood";
        case CutKind::optimality: return "optimality";
    }
    return "?";
}

/// One lazy constraint of the cut pool.
///  - feasibility: the listed (task, start) pairs cannot all hold at once
///  - nogood:      the exact snapshot is forbidden
///  - optimality:  q >= obj_sub - big_m * (number of snapshot deviations)
struct Cut {
    CutKind kind;
    std::vector<std::pair<int, int>> members;
    double obj_sub = 0.0;
    int big_m = 0;
};

/// The energy-only scheduling model: per-task start domains shaped by the
/// ramp windows and minimal distances, the machine-gap costs from the SPACES
/// table, a makespan proxy q bounded from the minimal distances, and a
/// growing pool of lazy cuts.
struct MasterModel {
    const Instance* instance = nullptr;
    const spaces::SpacesTable* spaces = nullptr;
    const precedence::MDMatrix* md = nullptr;
    ObjectiveWeights weights;

    struct Domain {
        int task = 0;
        precedence::Window window;
        std::vector<std::pair<double, int>> candidates;  // (job cost, start), sorted
        int q_coeff = 0;  // q >= (start - 1) + q_coeff for this task
    };
    std::vector<Domain> domains;  // in topological order of the energy tasks
    std::vector<Cut> cuts;
    double gap_optimism = 0.0;  // lower bound on any total transition cost

    const Domain& domain_of(int task) const {
        for (const auto& d : domains)
            if (d.task == task) return d;
        throw std::invalid_argument("task " + std::to_string(task) + " is not in the master");
    }
};

inline MasterModel build_master(const Instance& inst, const spaces::SpacesTable& spaces,
                                const precedence::MDMatrix& md, const ObjectiveWeights& weights) {
    MasterModel model;
    model.instance = &inst;
    model.spaces = &spaces;
    model.md = &md;
    model.weights = weights;

    auto windows = precedence::start_end_windows(inst, md);  // throws when a domain is empty
    std::map<int, precedence::Window> by_task;
    for (const auto& w : windows) by_task[w.task] = w;

    auto succ_sets = inst.successors();
    for (int id : inst.topological_order()) {
        if (!inst.is_energy(id)) continue;
        MasterModel::Domain dom;
        dom.task = id;
        dom.window = by_task.at(id);
        const int p = inst.task(id).duration;
        for (int s = dom.window.lo; s <= dom.window.hi; ++s)
            dom.candidates.emplace_back(spaces.job_cost(p, s), s);
        std::sort(dom.candidates.begin(), dom.candidates.end());
        dom.q_coeff = p;  // the task's own completion
        for (int other = 1; other <= inst.num_tasks(); ++other)
            if (auto d = md.md(id, other))
                dom.q_coeff = std::max(dom.q_coeff, *d + inst.task(other).duration);
        model.domains.push_back(std::move(dom));
    }

    const int pmax = inst.transitions.max_finite_power();
    for (double c : inst.tariff)
        model.gap_optimism += std::min(0.0, c * static_cast<double>(pmax));
    return model;
}

inline void add_cut(MasterModel& model, Cut cut) {
    if (cut.kind != CutKind::optimality && cut.members.empty())
        throw std::invalid_argument("cut without members");
    for (auto [task, start] : cut.members) {
        const auto& dom = model.domain_of(task);
        if (!dom.window.contains(start))
            throw std::invalid_argument("cut refers to start " + std::to_string(start) +
                                        " outside the domain of task " + std::to_string(task));
    }
    model.cuts.push_back(std::move(cut));
}

enum class SolveStatus { optimal, infeasible, budget };

struct MasterResult {
    SolveStatus status = SolveStatus::infeasible;
    std::optional<Assignment> best;
    double objective = 0.0;   // master objective of the incumbent (or callback-accepted value)
    double bound = 0.0;       // proven lower bound
    std::uint64_t nodes_used = 0;
};

/// Called on every improving integer assignment; returns the accepted full
/// objective, or nullopt to reject the candidate (after adding cuts).
using IncumbentCallback =
    std::function<std::optional<double>(const Assignment&, double energy_cost, double q_floor)>;

namespace detail {

struct MasterBudgetHit {};

class Search {
public:
    Search(MasterModel& model, std::uint64_t node_budget, IncumbentCallback callback,
           std::optional<std::pair<Assignment, double>> initial)
        : model_(model), nodes_left_(node_budget), callback_(std::move(callback)) {
        const Instance& inst = *model_.instance;
        tec_scale_ = model_.weights.alpha / model_.weights.lb_tec;
        ms_scale_ = (1.0 - model_.weights.alpha) / model_.weights.lb_rcpsp;
        k_ = static_cast<int>(model_.domains.size());
        dur_.resize(static_cast<std::size_t>(k_));
        cur_.assign(static_cast<std::size_t>(k_), 0);
        md_.assign(static_cast<std::size_t>(k_), std::vector<int>(static_cast<std::size_t>(k_), -1));
        for (int i = 0; i < k_; ++i) {
            const int task = model_.domains[static_cast<std::size_t>(i)].task;
            dur_[static_cast<std::size_t>(i)] = inst.task(task).duration;
            pos_of_[task] = i;
            for (int j = 0; j < k_; ++j) {
                const int other = model_.domains[static_cast<std::size_t>(j)].task;
                if (auto d = model_.md->md(task, other))
                    md_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = *d;
            }
        }
        if (initial) {
            best_ = initial->first;
            best_obj_ = initial->second;
        }
    }

    MasterResult run() {
        MasterResult res;
        const std::uint64_t start_budget = nodes_left_;
        root_bound_ = node_bound().value_or(0.0);
        bool exhausted = true;
        try {
            dfs(0);
        } catch (const MasterBudgetHit&) {
            exhausted = false;
        }
        res.nodes_used = start_budget - nodes_left_;
        if (best_) {
            res.status = exhausted ? SolveStatus::optimal : SolveStatus::budget;
            res.best = best_;
            res.objective = best_obj_;
            res.bound = exhausted ? best_obj_ : root_bound_;
        } else {
            res.status = exhausted ? SolveStatus::infeasible : SolveStatus::budget;
            res.bound = exhausted ? 0.0 : root_bound_;
        }
        return res;
    }

    /// Energy cost of a complete assignment: job costs plus optimal transition
    /// costs of every machine gap; nullopt when some gap cannot be bridged.
    static std::optional<double> assignment_energy(const MasterModel& model, const Assignment& a) {
        const Instance& inst = *model.instance;
        double total = 0.0;
        std::vector<std::pair<int, int>> blocks;  // (start, end)
        for (auto [task, start] : a) {
            total += model.spaces->job_cost(inst.task(task).duration, start);
            blocks.emplace_back(start, start + inst.task(task).duration - 1);
        }
        std::sort(blocks.begin(), blocks.end());
        int prev_end = 0;  // virtual initial block ending before interval 1
        for (auto [s, e] : blocks) {
            if (prev_end == 0 && s == 1) return std::nullopt;  // interval 1 is off by statement
            if (s > prev_end + 1 || prev_end == 0) {
                const auto c = model.spaces->transition_cost(prev_end + 1, s);
                if (!c) return std::nullopt;
                total += *c;
            }
            prev_end = e;
        }
        if (prev_end >= inst.horizon) return std::nullopt;  // interval h is off as well
        const auto tail = model.spaces->transition_cost(prev_end + 1, inst.horizon + 1);
        if (!tail) return std::nullopt;
        return total + *tail;
    }

    /// Makespan floor of a (possibly partial) assignment under the static
    /// distance bounds and the optimality cuts.
    static double q_floor(const MasterModel& model, const Assignment& assigned,
                          const std::map<int, int>& unassigned_lo) {
        double q = 1.0;
        for (const auto& dom : model.domains) {
            auto it = assigned.find(dom.task);
            if (it != assigned.end())
                q = std::max(q, static_cast<double>(it->second - 1 + dom.q_coeff));
            else if (auto lo = unassigned_lo.find(dom.task); lo != unassigned_lo.end())
                q = std::max(q, static_cast<double>(lo->second - 1 + dom.q_coeff));
        }
        for (const Cut& cut : model.cuts) {
            if (cut.kind != CutKind::optimality) continue;
            int mismatches = 0;
            for (auto [task, start] : cut.members) {
                auto it = assigned.find(task);
                if (it != assigned.end() && it->second != start) ++mismatches;
            }
            q = std::max(q, cut.obj_sub - static_cast<double>(cut.big_m) * mismatches);
        }
        return q;
    }

private:
    // Residual start range of position `pos` under the assigned pairwise
    // distances; false when it closes.
    bool residual_range(int pos, int& lo, int& hi) const {
        const auto& dom = model_.domains[static_cast<std::size_t>(pos)];
        lo = dom.window.lo;
        hi = dom.window.hi;
        for (int other = 0; other < k_; ++other) {
            const int su = cur_[static_cast<std::size_t>(other)];
            if (su == 0 || other == pos) continue;
            const int fwd = md_[static_cast<std::size_t>(other)][static_cast<std::size_t>(pos)];
            if (fwd >= 0) lo = std::max(lo, su + fwd);
            const int bwd = md_[static_cast<std::size_t>(pos)][static_cast<std::size_t>(other)];
            if (bwd >= 0) hi = std::min(hi, su - bwd);
        }
        return lo <= hi;
    }

    bool overlaps_assigned(int pos, int s) const {
        const int e = s + dur_[static_cast<std::size_t>(pos)] - 1;
        for (int other = 0; other < k_; ++other) {
            const int su = cur_[static_cast<std::size_t>(other)];
            if (su == 0 || other == pos) continue;
            if (s <= su + dur_[static_cast<std::size_t>(other)] - 1 && su <= e) return true;
        }
        return false;
    }

    bool feasibility_cut_violated() const {
        for (const Cut& cut : model_.cuts) {
            if (cut.kind != CutKind::feasibility) continue;
            bool all = true;
            for (auto [task, start] : cut.members)
                if (cur_[static_cast<std::size_t>(pos_of_.at(task))] != start) { all = false; break; }
            if (all) return true;
        }
        return false;
    }

    bool nogood_matches() const {
        for (const Cut& cut : model_.cuts) {
            if (cut.kind != CutKind::nogood) continue;
            bool all = true;
            for (auto [task, start] : cut.members)
                if (cur_[static_cast<std::size_t>(pos_of_.at(task))] != start) { all = false; break; }
            if (all) return true;
        }
        return false;
    }

    // Assigned blocks in time order; reused scratch.
    void collect_blocks(std::vector<std::pair<int, int>>& blocks) const {
        blocks.clear();
        for (int pos = 0; pos < k_; ++pos) {
            const int s = cur_[static_cast<std::size_t>(pos)];
            if (s > 0) blocks.emplace_back(s, s + dur_[static_cast<std::size_t>(pos)] - 1);
        }
        std::sort(blocks.begin(), blocks.end());
    }

    // Some unassigned task could still be placed inside intervals l .. m-1.
    bool rescuable(int l, int m) const {
        for (int pos = 0; pos < k_; ++pos) {
            if (cur_[static_cast<std::size_t>(pos)] != 0) continue;
            const auto& w = model_.domains[static_cast<std::size_t>(pos)].window;
            if (std::max(w.lo, l) <= std::min(w.hi, m - 1)) return true;
        }
        return false;
    }

    // A machine gap between assigned blocks that no transition bridges kills
    // every completion unless a future task can still split it. Interior
    // back-to-back blocks need no bridge; the boundaries always do.
    bool dead_gap() const {
        collect_blocks(blocks_scratch_);
        const int h = model_.instance->horizon;
        int prev_end = 0;
        for (std::size_t i = 0; i <= blocks_scratch_.size(); ++i) {
            const int m = (i < blocks_scratch_.size()) ? blocks_scratch_[i].first : h + 1;
            const int l = prev_end + 1;
            const bool boundary = (prev_end == 0) || (i == blocks_scratch_.size());
            if (l != m || boundary) {
                const bool bridged =
                    l < m && l <= h && model_.spaces->transition_cost(l, m).has_value();
                if (!bridged && !rescuable(l, m)) return true;
            }
            if (i < blocks_scratch_.size()) prev_end = blocks_scratch_[i].second;
        }
        return false;
    }

    double q_floor_current(const int* unassigned_lo) const {
        double q = 1.0;
        for (int pos = 0; pos < k_; ++pos) {
            const int s = cur_[static_cast<std::size_t>(pos)];
            const int coeff = model_.domains[static_cast<std::size_t>(pos)].q_coeff;
            if (s > 0)
                q = std::max(q, static_cast<double>(s - 1 + coeff));
            else if (unassigned_lo)
                q = std::max(q, static_cast<double>(unassigned_lo[pos] - 1 + coeff));
        }
        for (const Cut& cut : model_.cuts) {
            if (cut.kind != CutKind::optimality) continue;
            int mismatches = 0;
            for (auto [task, start] : cut.members) {
                const int s = cur_[static_cast<std::size_t>(pos_of_.at(task))];
                if (s != 0 && s != start) ++mismatches;
            }
            q = std::max(q, cut.obj_sub - static_cast<double>(cut.big_m) * mismatches);
        }
        return q;
    }

    // Lower bound on the master objective over all completions of the current
    // partial assignment; nullopt when a residual domain empties.
    std::optional<double> node_bound() const {
        double energy = assigned_energy_ + model_.gap_optimism;
        std::vector<int> lo_starts(static_cast<std::size_t>(k_), 0);
        for (int pos = 0; pos < k_; ++pos) {
            if (cur_[static_cast<std::size_t>(pos)] != 0) continue;
            int lo, hi;
            if (!residual_range(pos, lo, hi)) return std::nullopt;
            bool any = false;
            double cheapest = 0.0;
            int first = 0;
            for (const auto& [cost, s] : model_.domains[static_cast<std::size_t>(pos)].candidates) {
                if (s < lo || s > hi || overlaps_assigned(pos, s)) continue;
                if (!any || cost < cheapest) cheapest = cost;
                if (!any || s < first) first = s;
                any = true;
            }
            if (!any) return std::nullopt;
            energy += cheapest;
            lo_starts[static_cast<std::size_t>(pos)] = first;
        }
        return tec_scale_ * energy + ms_scale_ * q_floor_current(lo_starts.data());
    }

    void dfs(int depth) {
        if (feasibility_cut_violated()) return;
        if (dead_gap()) return;
        const auto bound = node_bound();
        if (!bound) return;
        if (best_ && *bound >= best_obj_ - kCostTol) return;
        if (depth == k_) {
            leaf();
            return;
        }
        int lo, hi;
        if (!residual_range(depth, lo, hi)) return;
        for (const auto& [cost, s] : model_.domains[static_cast<std::size_t>(depth)].candidates) {
            if (s < lo || s > hi || overlaps_assigned(depth, s)) continue;
            if (nodes_left_ == 0) throw MasterBudgetHit{};
            --nodes_left_;
            cur_[static_cast<std::size_t>(depth)] = s;
            assigned_energy_ += cost;
            dfs(depth + 1);
            assigned_energy_ -= cost;
            cur_[static_cast<std::size_t>(depth)] = 0;
        }
    }

    void leaf() {
        collect_blocks(blocks_scratch_);
        const int h = model_.instance->horizon;
        double energy = assigned_energy_;
        int prev_end = 0;
        for (auto [s, e] : blocks_scratch_) {
            if (prev_end == 0 && s == 1) return;
            if (s > prev_end + 1 || prev_end == 0) {
                const auto c = model_.spaces->transition_cost(prev_end + 1, s);
                if (!c) return;  // unbridgeable gap: not master-feasible
                energy += *c;
            }
            prev_end = e;
        }
        if (prev_end >= h) return;
        const auto tail = model_.spaces->transition_cost(prev_end + 1, h + 1);
        if (!tail) return;
        energy += *tail;

        if (nogood_matches()) return;
        const double q = q_floor_current(nullptr);
        const double master_obj = tec_scale_ * energy + ms_scale_ * q;
        if (best_ && master_obj >= best_obj_ - kCostTol) return;
        Assignment assigned;
        for (int pos = 0; pos < k_; ++pos)
            assigned[model_.domains[static_cast<std::size_t>(pos)].task] =
                cur_[static_cast<std::size_t>(pos)];
        if (callback_) {
            const auto accepted = callback_(assigned, energy, q);
            if (!accepted) return;  // cuts were added; candidate rejected
            if (!best_ || *accepted < best_obj_ - kCostTol) {
                best_ = std::move(assigned);
                best_obj_ = *accepted;
            }
            return;
        }
        best_ = std::move(assigned);
        best_obj_ = master_obj;
    }

    MasterModel& model_;
    std::uint64_t nodes_left_;
    IncumbentCallback callback_;
    double tec_scale_ = 1.0, ms_scale_ = 0.0;
    int k_ = 0;
    std::vector<int> dur_;
    std::vector<int> cur_;  // start per position, 0 = unassigned
    std::vector<std::vector<int>> md_;  // -1 = unrelated
    std::map<int, int> pos_of_;
    double assigned_energy_ = 0.0;
    mutable std::vector<std::pair<int, int>> blocks_scratch_;
    std::optional<Assignment> best_;
    double best_obj_ = 0.0;
    double root_bound_ = 0.0;
};

}  // namespace detail

/// Exact depth-first branch and bound over the energy-task start choices.
/// The callback, when present, stands in for a lazy-constraint hook: it runs
/// on every improving complete assignment and decides acceptance. An initial
/// incumbent (assignment plus objective) seeds the pruning.
inline MasterResult solve_master(MasterModel& model, std::uint64_t node_budget,
                                 IncumbentCallback callback = nullptr,
                                 std::optional<std::pair<Assignment, double>> initial = std::nullopt) {
    detail::Search search(model, node_budget, std::move(callback), std::move(initial));
    return search.run();
}

/// Energy cost of a complete assignment (job costs plus bridged gaps).
inline std::optional<double> assignment_energy(const MasterModel& model, const Assignment& a) {
    return detail::Search::assignment_energy(model, a);
}

/// Makespan floor of a complete assignment under distance bounds and cuts.
inline double assignment_q_floor(const MasterModel& model, const Assignment& a) {
    return detail::Search::q_floor(model, a, {});
}

/// Master objective value of a complete assignment; nullopt if not
/// master-feasible (unbridgeable gap).
inline std::optional<double> assignment_objective(const MasterModel& model, const Assignment& a) {
    const auto energy = assignment_energy(model, a);
    if (!energy) return std::nullopt;
    const auto& w = model.weights;
    return w.alpha / w.lb_tec * *energy +
           (1.0 - w.alpha) / w.lb_rcpsp * assignment_q_floor(model, a);
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

inline std::string var_x(int task, int interval) {
    return "x_" + std::to_string(task) + "_" + std::to_string(interval);
}
inline std::string var_z(int l, int m) {
    return "z_" + std::to_string(l) + "_" + std::to_string(m);
}

/// Portable LP text of the master model, cuts included; z variables are
/// materialized here so an external MILP engine can cross-check the
/// collapsed in-memory model.
inline void export_lp(const MasterModel& model, std::ostream& os) {
    const Instance& inst = *model.instance;
    const int h = inst.horizon;
    const auto& w = model.weights;
    lp::Writer lp;
    lp.comment("energy-only master model for instance " + (inst.name.empty() ? "?" : inst.name));

    std::vector<int> energy = inst.energy_ids();
    const bool with_q = w.alpha < 1.0;

    for (int j : energy) {
        const int p = inst.task(j).duration;
        for (int i = 1; i + p - 1 <= h; ++i) {
            lp.objective_term(w.alpha / w.lb_tec * model.spaces->job_cost(p, i), var_x(j, i));
            lp.binary(var_x(j, i));
        }
    }
    for (int l = 1; l <= h; ++l)
        for (int m = l + 1; m <= h + 1; ++m)
            if (auto c = model.spaces->transition_cost(l, m)) {
                lp.objective_term(w.alpha / w.lb_tec * *c, var_z(l, m));
                lp.binary(var_z(l, m));
            }
    if (with_q) {
        lp.objective_term((1.0 - w.alpha) / w.lb_rcpsp, "q");
        lp.general("q");
        lp.bound("q >= 0");
    }

    for (int j : energy) {
        const int p = inst.task(j).duration;
        auto& r = lp.row("assign_" + std::to_string(j), '=', 1.0);
        for (int i = 1; i + p - 1 <= h; ++i) r.terms.push_back({1.0, var_x(j, i)});
    }
    for (int u : energy)
        for (int v : energy) {
            if (u == v) continue;
            const auto d = model.md->md(u, v);
            if (!d) continue;
            auto& r = lp.row("md_" + std::to_string(u) + "_" + std::to_string(v), '>',
                             static_cast<double>(*d));
            for (int i = 1; i + inst.task(v).duration - 1 <= h; ++i)
                r.terms.push_back({static_cast<double>(i), var_x(v, i)});
            for (int i = 1; i + inst.task(u).duration - 1 <= h; ++i)
                r.terms.push_back({-static_cast<double>(i), var_x(u, i)});
        }
    for (int i = 1; i <= h; ++i) {
        auto& r = lp.row("machine_" + std::to_string(i), '<', 1.0);
        for (int j : energy) {
            const int p = inst.task(j).duration;
            for (int k = std::max(1, i - p + 1); k <= i && k + p - 1 <= h; ++k)
                r.terms.push_back({1.0, var_x(j, k)});
        }
    }
    for (int i = 1; i <= h; ++i) {
        auto& r = lp.row("cover_" + std::to_string(i), '=', 1.0);
        for (int j : energy) {
            const int p = inst.task(j).duration;
            for (int k = std::max(1, i - p + 1); k <= i && k + p - 1 <= h; ++k)
                r.terms.push_back({1.0, var_x(j, k)});
        }
        for (int l = 1; l <= i; ++l)
            for (int m = i + 1; m <= h + 1; ++m)
                if (model.spaces->transition_cost(l, m)) r.terms.push_back({1.0, var_z(l, m)});
    }
    for (const auto& dom : model.domains) {
        const int j = dom.task;
        const int p = inst.task(j).duration;
        for (int i = 1; i + p - 1 <= h; ++i)
            if (!dom.window.contains(i)) {
                auto& r = lp.row("fix_" + std::to_string(j) + "_" + std::to_string(i), '=', 0.0);
                r.terms.push_back({1.0, var_x(j, i)});
            }
    }
    if (with_q) {
        for (const auto& dom : model.domains) {
            const int j = dom.task;
            const int p = inst.task(j).duration;
            for (int s = 1; s <= inst.num_tasks(); ++s) {
                const auto d = model.md->md(j, s);
                if (!d) continue;
                auto& r = lp.row("makespan_" + std::to_string(j) + "_" + std::to_string(s), '>',
                                 static_cast<double>(*d + inst.task(s).duration - 1));
                r.terms.push_back({1.0, "q"});
                for (int i = 1; i + p - 1 <= h; ++i)
                    r.terms.push_back({-static_cast<double>(i), var_x(j, i)});
            }
        }
    }
    int cut_no = 0;
    for (const Cut& cut : model.cuts) {
        ++cut_no;
        if (cut.kind == CutKind::feasibility || cut.kind == CutKind::nogood) {
            auto& r = lp.row("cut_" + std::to_string(cut_no), '<',
                             static_cast<double>(cut.members.size()) - 1.0);
            for (auto [task, start] : cut.members) r.terms.push_back({1.0, var_x(task, start)});
        } else {
            auto& r = lp.row("cut_" + std::to_string(cut_no), '>',
                             cut.obj_sub - static_cast<double>(cut.big_m) *
                                               static_cast<double>(cut.members.size()));
            r.terms.push_back({1.0, "q"});
            for (auto [task, start] : cut.members)
                r.terms.push_back({static_cast<double>(cut.big_m), var_x(task, start)});
        }
    }
    lp.write(os);
}

/// CSV dump of the cut pool: kind, members, rhs.
inline void dump_cuts_csv(const MasterModel& model, std::ostream& os) {
    os << "kind,members,rhs\n";
    for (const Cut& cut : model.cuts) {
        os << to_string(cut.kind) << ',';
        for (std::size_t i = 0; i < cut.members.size(); ++i) {
            if (i) os << '|';
            os << cut.members[i].first << '@' << cut.members[i].second;
        }
        os << ',';
        if (cut.kind == CutKind::optimality)
            os << lp::num(cut.obj_sub);
        else
            os << cut.members.size() - 1;
        os << '\n';
    }
}

}  // namespace esched::master

#endif  // ESCHED_MASTER_HPP
