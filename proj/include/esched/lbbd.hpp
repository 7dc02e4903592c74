#ifndef ESCHED_LBBD_HPP
#define ESCHED_LBBD_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esched/core.hpp"
#include "esched/master.hpp"
#include "esched/precedence.hpp"
#include "esched/spaces.hpp"
#include "esched/subproblem.hpp"

namespace esched::lbbd {

struct Config {
    double alpha = 1.0;  // must be positive; alpha = 0 reduces to plain RCPSP
    std::uint64_t master_budget = 50'000'000;
    std::uint64_t sub_budget = 2'000'000;
    std::uint64_t sub_wall_ms = 0;  // optional backstop; keep 0 for reproducible runs
    enum class Warmstart { none, fsws } warmstart = Warmstart::fsws;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("alpha must lie in (0, 1]");
    }
};

enum class RunStatus { optimal, feasible_unproven, infeasible, budget };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::optimal: return "optimal";
        case RunStatus::feasible_unproven: return "feasible-unproven";
        case RunStatus::infeasible: return "infeasible";
        case RunStatus::budget: return "budget";
    }
    return "?";
}

struct Stats {
    int feasibility_cuts = 0;
    int nogood_cuts = 0;
    int optimality_cuts = 0;
    int subproblem_invocations = 0;
    int subproblems_feasible = 0;  // accepted candidates (reported for alpha = 1)
    double mean_conflict_size = 0.0;
    std::uint64_t master_nodes = 0;
    bool normalization_guarded = false;
    bool lb_unproven = false;
    bool downgraded = false;  // some subproblem did not close: certificate lost
    double ms_precompute = 0.0;
    double ms_bounds = 0.0;
    double ms_search = 0.0;
};

struct RunResult {
    RunStatus status = RunStatus::infeasible;
    std::optional<Solution> solution;
    double objective = 0.0;  // normalized combined objective
    double tec = 0.0;
    int cmax = 0;
    ObjectiveWeights weights;
    Stats stats;
    std::vector<master::Cut> cuts;            // final pool, for verification and reporting
    std::vector<double> incumbent_objectives;  // accepted incumbents, in order
};

namespace detail {

/// Machine trajectory induced by an energy assignment: proc dwells under the
/// blocks, reconstructed optimal transitions in every gap.
inline std::optional<std::vector<StatePair>> build_omega(const Instance& inst,
                                                         const spaces::SpacesTable& table,
                                                         const master::Assignment& assignment) {
    const int h = inst.horizon;
    std::vector<std::pair<int, int>> blocks;
    for (auto [task, start] : assignment)
        blocks.emplace_back(start, start + inst.task(task).duration - 1);
    std::sort(blocks.begin(), blocks.end());
    std::vector<StatePair> omega;
    omega.reserve(static_cast<std::size_t>(h));
    int prev_end = 0;
    auto bridge = [&](int l, int m) -> bool {
        if (l == m) return true;
        if (l < 1 || m > h + 1 || l > m) return false;
        if (!table.transition_cost(l, m)) return false;
        for (const StatePair& w : table.reconstruct(l, m)) omega.push_back(w);
        return true;
    };
    for (auto [s, e] : blocks) {
        if (prev_end == 0 && s == 1) return std::nullopt;  // interval 1 stays off
        if (!bridge(prev_end + 1, s)) return std::nullopt;
        for (int i = s; i <= e; ++i) omega.push_back({State::proc, State::proc});
        prev_end = e;
    }
    if (prev_end >= h) return std::nullopt;  // interval h stays off
    if (!bridge(prev_end + 1, h + 1)) return std::nullopt;
    if (static_cast<int>(omega.size()) != h) return std::nullopt;
    return omega;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - from).count();
}

}  // namespace detail

struct LowerBound {
    double value = 0.0;
    bool proven = false;
};

/// The search ran out of nodes before either finding a value or proving that
/// none exists; distinct from infeasibility.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Optimal energy cost when the problem keeps only the energy-intensive
/// tasks, with the removed chains preserved through the minimal distances.
inline LowerBound compute_lb_tec(const Instance& inst, const spaces::SpacesTable& table,
                                 const precedence::MDMatrix& md,
                                 std::uint64_t budget = 50'000'000) {
    ObjectiveWeights unit{1.0, 1.0, 1.0};
    master::MasterModel reduced = master::build_master(inst, table, md, unit);
    master::MasterResult res = master::solve_master(reduced, budget);
    if (res.status == master::SolveStatus::infeasible)
        throw std::invalid_argument("energy-only reduction infeasible: instance infeasible");
    if (!res.best) throw BudgetError("energy-only reduction exhausted its budget");
    return {res.objective, res.status == master::SolveStatus::optimal};
}

inline LowerBound compute_lb_tec(const Instance& inst, std::uint64_t budget = 50'000'000) {
    auto table = spaces::build_spaces(inst.transitions, inst.tariff);
    auto md = precedence::compute_md(inst);
    return compute_lb_tec(inst, table, md, budget);
}

/// Optimal makespan of the plain RCPSP (machine states ignored, the unary
/// resource kept). When the search cannot even find a witness within budget,
/// the horizon stands in, flagged unproven.
inline LowerBound compute_lb_rcpsp(const Instance& inst, std::uint64_t budget = 50'000'000) {
    subproblem::Result res = subproblem::minimize_makespan(inst, {}, {budget, 0});
    if (res.verdict == subproblem::Verdict::infeasible)
        throw std::invalid_argument("plain RCPSP infeasible within the horizon");
    if (res.verdict == subproblem::Verdict::unknown)
        return {static_cast<double>(inst.horizon), false};
    return {res.objective, res.proven_optimal};
}

/// First-feasible warmstart: serial schedule generation over a topological
/// order, energy tasks packed onto the machine one after another inside
/// their windows, transitions filled from the SPACES table.
inline std::optional<Solution> warmstart_fsws(const Instance& inst) {
    const int h = inst.horizon;
    std::optional<spaces::SpacesTable> table;
    std::vector<precedence::Window> windows;
    try {
        auto md = precedence::compute_md(inst);
        windows = precedence::start_end_windows(inst, md);
        table.emplace(spaces::build_spaces(inst.transitions, inst.tariff));
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
    std::map<int, precedence::Window> window_of;
    for (const auto& w : windows) window_of[w.task] = w;

    const std::size_t nres = inst.capacities.size();
    std::vector<std::vector<int>> usage(nres, std::vector<int>(static_cast<std::size_t>(h) + 1, 0));
    std::vector<int> starts(inst.tasks.size(), 0);
    int machine_end = 0;  // last interval occupied by an energy task so far

    auto prec_bound = [&](int id) {
        int lo = 1;
        for (auto [u, v] : inst.precedence)
            if (v == id) lo = std::max(lo, starts[static_cast<std::size_t>(u - 1)] + inst.task(u).duration);
        return lo;
    };

    for (int id : inst.topological_order()) {
        const Task& t = inst.task(id);
        if (inst.is_energy(id)) {
            const auto& w = window_of.at(id);
            int s = std::max({w.lo, prec_bound(id), machine_end + 1});
            for (; s <= w.hi; ++s) {
                if (s > machine_end + 1 && !table->transition_cost(machine_end + 1, s)) continue;
                break;
            }
            if (s > w.hi) return std::nullopt;
            starts[static_cast<std::size_t>(id - 1)] = s;
            machine_end = s + t.duration - 1;
        } else {
            int s = prec_bound(id);
            auto fits = [&](int cand) {
                if (cand + t.duration - 1 > h) return false;
                for (int i = cand; i <= cand + t.duration - 1; ++i)
                    for (std::size_t k = 1; k < nres; ++k)
                        if (usage[k][static_cast<std::size_t>(i)] + t.demand[k] > inst.capacities[k])
                            return false;
                return true;
            };
            while (s + t.duration - 1 <= h && !fits(s)) ++s;
            if (s + t.duration - 1 > h) return std::nullopt;
            starts[static_cast<std::size_t>(id - 1)] = s;
            for (int i = s; i <= s + t.duration - 1; ++i)
                for (std::size_t k = 1; k < nres; ++k)
                    usage[k][static_cast<std::size_t>(i)] += t.demand[k];
        }
    }
    if (machine_end == 0 || !table->transition_cost(machine_end + 1, h + 1)) return std::nullopt;

    master::Assignment assignment;
    for (int id : inst.energy_ids()) assignment[id] = starts[static_cast<std::size_t>(id - 1)];
    auto omega = detail::build_omega(inst, *table, assignment);
    if (!omega) return std::nullopt;
    Solution sol{std::move(starts), std::move(*omega)};
    if (!validate_solution(inst, sol).empty()) return std::nullopt;
    return sol;
}

/// The decomposition loop: the master streams improving energy assignments,
/// the subproblem checks them (and prices the makespan when alpha < 1), and
/// feasibility, no-good, or optimality cuts feed back until the master search
/// closes.
inline RunResult run_lbbd(const Instance& inst, const Config& config) {
    config.validate();
    inst.validate_or_throw();
    RunResult run;
    const auto t0 = std::chrono::steady_clock::now();

    std::optional<spaces::SpacesTable> table;
    std::optional<precedence::MDMatrix> md;
    try {
        table.emplace(spaces::build_spaces(inst.transitions, inst.tariff));
        md.emplace(precedence::compute_md(inst));
        precedence::start_end_windows(inst, *md);
    } catch (const std::invalid_argument&) {
        run.status = RunStatus::infeasible;
        return run;
    }
    run.stats.ms_precompute = detail::elapsed_ms(t0);

    const auto t1 = std::chrono::steady_clock::now();
    LowerBound lb_tec, lb_rcpsp;
    try {
        lb_tec = compute_lb_tec(inst, *table, *md, config.master_budget);
        lb_rcpsp = compute_lb_rcpsp(inst, config.sub_budget);
    } catch (const BudgetError&) {
        run.status = RunStatus::budget;
        return run;
    } catch (const std::invalid_argument&) {
        run.status = RunStatus::infeasible;
        return run;
    }
    // at alpha = 1 the makespan bound never enters the objective, so an
    // unproven value there is a reporting detail, not a lost certificate
    run.stats.lb_unproven = !lb_tec.proven || (config.alpha < 1.0 && !lb_rcpsp.proven);
    double lb_tec_norm = lb_tec.value;
    if (lb_tec_norm <= 0.0) {
        lb_tec_norm = std::max(std::abs(lb_tec.value), 1.0);
        run.stats.normalization_guarded = true;
    }
    run.weights = ObjectiveWeights{config.alpha, lb_tec_norm, lb_rcpsp.value};
    run.stats.ms_bounds = detail::elapsed_ms(t1);

    const auto t2 = std::chrono::steady_clock::now();
    master::MasterModel model = master::build_master(inst, *table, *md, run.weights);
    const double tec_scale = run.weights.alpha / run.weights.lb_tec;
    const double ms_scale = (1.0 - run.weights.alpha) / run.weights.lb_rcpsp;
    const subproblem::Budget sub_budget{config.sub_budget, config.sub_wall_ms};

    std::optional<Solution> best_solution;
    std::optional<double> best_objective;
    std::optional<std::pair<master::Assignment, double>> seed_incumbent;
    if (config.warmstart == Config::Warmstart::fsws) {
        if (auto ws = warmstart_fsws(inst)) {
            master::Assignment a;
            for (int id : inst.energy_ids()) a[id] = ws->starts[static_cast<std::size_t>(id - 1)];
            best_solution = ws;
            best_objective = evaluate_objective(inst, *ws, run.weights);
            seed_incumbent = {a, *best_objective};
            run.incumbent_objectives.push_back(*best_objective);
        }
    }

    long long conflict_total = 0;
    bool aborted_infeasible = false;

    auto callback = [&](const master::Assignment& assignment, double energy_cost,
                        double /*q_floor*/) -> std::optional<double> {
        run.stats.subproblem_invocations++;
        subproblem::Result sub;
        if (config.alpha >= 1.0)
            sub = subproblem::solve_feasibility(inst, assignment, sub_budget);
        else
            sub = subproblem::minimize_makespan(inst, assignment, sub_budget);

        if (sub.verdict == subproblem::Verdict::feasible) {
            double accepted;
            if (config.alpha >= 1.0) {
                accepted = tec_scale * energy_cost;
            } else {
                accepted = tec_scale * energy_cost + ms_scale * sub.objective;
                std::vector<std::pair<int, int>> snapshot(assignment.begin(), assignment.end());
                master::add_cut(model, master::Cut{master::CutKind::optimality, std::move(snapshot),
                                                   sub.objective, inst.horizon + 1});
                run.stats.optimality_cuts++;
                if (!sub.proven_optimal) run.stats.downgraded = true;
            }
            run.stats.subproblems_feasible++;
            // mirror the master's strict-improvement rule so the recorded
            // solution always matches the search incumbent
            if (!best_objective || accepted < *best_objective - kCostTol) {
                auto omega = detail::build_omega(inst, *table, assignment);
                if (!omega) return std::nullopt;  // unreachable for master-feasible assignments
                best_solution = Solution{sub.schedule, std::move(*omega)};
                best_objective = accepted;
                run.incumbent_objectives.push_back(accepted);
            }
            return accepted;
        }
        if (sub.verdict == subproblem::Verdict::infeasible) {
            auto conflict = subproblem::extract_min_conflict(inst, assignment, sub_budget);
            if (conflict.conflict.empty()) {
                aborted_infeasible = true;  // the plain RCPSP itself has no schedule
                return std::nullopt;
            }
            std::vector<std::pair<int, int>> members;
            for (int id : conflict.conflict) members.emplace_back(id, assignment.at(id));
            master::add_cut(model, master::Cut{master::CutKind::feasibility, std::move(members), 0.0, 0});
            run.stats.feasibility_cuts++;
            conflict_total += static_cast<long long>(conflict.conflict.size());
            return std::nullopt;
        }
        // unknown: prune just this assignment and give up on the certificate
        std::vector<std::pair<int, int>> snapshot(assignment.begin(), assignment.end());
        master::add_cut(model, master::Cut{master::CutKind::nogood, std::move(snapshot), 0.0, 0});
        run.stats.nogood_cuts++;
        run.stats.downgraded = true;
        return std::nullopt;
    };

    master::MasterResult mres =
        master::solve_master(model, config.master_budget, callback, seed_incumbent);
    run.stats.master_nodes = mres.nodes_used;
    run.stats.ms_search = detail::elapsed_ms(t2);
    run.stats.mean_conflict_size =
        run.stats.feasibility_cuts > 0
            ? static_cast<double>(conflict_total) / run.stats.feasibility_cuts
            : 0.0;
    run.cuts = model.cuts;

    if (!best_solution) {
        if (aborted_infeasible || (mres.status == master::SolveStatus::infeasible &&
                                   !run.stats.downgraded))
            run.status = RunStatus::infeasible;
        else
            run.status = RunStatus::budget;
        return run;
    }

    // for alpha = 1 the loop never optimized the makespan; recover it for the
    // reported solution (the energy cost is untouched by non-energy moves)
    if (config.alpha >= 1.0) {
        master::Assignment a;
        for (int id : inst.energy_ids())
            a[id] = best_solution->starts[static_cast<std::size_t>(id - 1)];
        subproblem::Result polish = subproblem::minimize_makespan(inst, a, sub_budget);
        if (polish.verdict == subproblem::Verdict::feasible) {
            Solution candidate{polish.schedule, best_solution->omega};
            if (evaluate_makespan(inst, candidate) <= evaluate_makespan(inst, *best_solution))
                best_solution->starts = polish.schedule;
        }
    }

    run.solution = best_solution;
    run.tec = evaluate_tec(inst, *best_solution);
    run.cmax = evaluate_makespan(inst, *best_solution);
    run.objective = scaled_objective(run.weights, run.tec, run.cmax);
    if (mres.status == master::SolveStatus::optimal && !run.stats.downgraded &&
        !run.stats.lb_unproven && !aborted_infeasible)
        run.status = RunStatus::optimal;
    else if (mres.status == master::SolveStatus::budget)
        run.status = RunStatus::budget;
    else
        run.status = RunStatus::feasible_unproven;
    return run;
}

}  // namespace esched::lbbd

#endif  // ESCHED_LBBD_HPP
