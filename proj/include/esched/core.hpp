#ifndef ESCHED_CORE_HPP
#define ESCHED_CORE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace esched {

/// Absolute tolerance used for all cost comparisons in search and tests.
inline constexpr double kCostTol = 1e-9;

// ---------------------------------------------------------------------------
// Machine states and the transition system of the energy-intensive resource
// ---------------------------------------------------------------------------

enum class State : int { proc = 0, idle = 1, off = 2 };

inline constexpr std::array<State, 3> kAllStates{State::proc, State::idle, State::off};

inline const char* to_string(State s) {
    switch (s) {
        case State::proc: return "proc";
        case State::idle: return "idle";
        case State::off: return "off";
    }
    return "?";
}

inline std::optional<State> state_from_string(const std::string& s) {
    if (s == "proc") return State::proc;
    if (s == "idle") return State::idle;
    if (s == "off") return State::off;
    return std::nullopt;
}

/// One entry of the machine trajectory: the machine moves (or dwells)
/// from `from` to `to` during the interval. A step from s to s' occupies
/// T(s,s') consecutive intervals, all carrying the same pair.
struct StatePair {
    State from = State::off;
    State to = State::off;

    friend bool operator==(const StatePair&, const StatePair&) = default;
};

/// Transition times T and powers P over the three-state set.
/// An absent entry means the transition is infeasible; feasibility of T and P
/// always coincides and finite times are strictly positive.
struct TransitionSystem {
    std::array<std::array<std::optional<int>, 3>, 3> time{};
    std::array<std::array<std::optional<int>, 3>, 3> power{};

    std::optional<int> duration(State a, State b) const {
        return time[static_cast<int>(a)][static_cast<int>(b)];
    }
    std::optional<int> energy(State a, State b) const {
        return power[static_cast<int>(a)][static_cast<int>(b)];
    }
    void set(State a, State b, std::optional<int> t, std::optional<int> p) {
        time[static_cast<int>(a)][static_cast<int>(b)] = t;
        power[static_cast<int>(a)][static_cast<int>(b)] = p;
    }

    /// Highest finite power over all transitions; used for optimistic bounds
    /// under negative tariffs.
    int max_finite_power() const {
        int best = 0;
        for (const auto& row : power)
            for (const auto& p : row)
                if (p) best = std::max(best, *p);
        return best;
    }

    std::vector<std::string> check() const {
        std::vector<std::string> issues;
        for (State a : kAllStates) {
            for (State b : kAllStates) {
                const auto t = duration(a, b);
                const auto p = energy(a, b);
                if (t.has_value() != p.has_value())
                    issues.push_back(std::string("transition (") + to_string(a) + "," + to_string(b) +
                                     ") has mismatched time/power feasibility");
                if (t && *t < 1)
                    issues.push_back(std::string("transition time (") + to_string(a) + "," + to_string(b) +
                                     ") must be at least 1");
                if (p && *p < 0)
                    issues.push_back(std::string("transition power (") + to_string(a) + "," + to_string(b) +
                                     ") must be nonnegative");
            }
            if (!duration(a, a))
                issues.push_back(std::string("self-loop (") + to_string(a) + "," + to_string(a) +
                                 ") must be finite");
        }
        return issues;
    }
};

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

struct Task {
    int id = 0;                // 1-based, equal to position in Instance::tasks + 1
    int duration = 1;          // processing time in intervals, >= 1
    std::vector<int> demand;   // per-resource requirement, demand[0] is the machine
};

struct Instance {
    std::string name;
    std::vector<Task> tasks;
    std::vector<int> capacities;                 // capacities[0] == 1
    std::vector<std::pair<int, int>> precedence; // arcs (u, v): u completes before v starts
    int horizon = 0;                             // number of unitary intervals
    std::vector<double> tariff;                  // per-interval energy cost, length == horizon
    TransitionSystem transitions;

    int num_tasks() const { return static_cast<int>(tasks.size()); }
    const Task& task(int id) const { return tasks[static_cast<std::size_t>(id - 1)]; }

    bool is_energy(int id) const { return task(id).demand.empty() ? false : task(id).demand[0] > 0; }

    std::vector<int> energy_ids() const {
        std::vector<int> ids;
        for (const Task& t : tasks)
            if (!t.demand.empty() && t.demand[0] > 0) ids.push_back(t.id);
        return ids;
    }

    std::vector<std::vector<int>> successors() const {
        std::vector<std::vector<int>> succ(tasks.size() + 1);
        for (auto [u, v] : precedence) succ[static_cast<std::size_t>(u)].push_back(v);
        return succ;
    }
    std::vector<std::vector<int>> predecessors() const {
        std::vector<std::vector<int>> pred(tasks.size() + 1);
        for (auto [u, v] : precedence) pred[static_cast<std::size_t>(v)].push_back(u);
        return pred;
    }

    /// Task ids in a deterministic topological order. Empty result iff the
    /// precedence graph has a cycle.
    std::vector<int> topological_order() const {
        const int n = num_tasks();
        std::vector<int> indeg(static_cast<std::size_t>(n) + 1, 0);
        auto succ = successors();
        for (auto [u, v] : precedence) indeg[static_cast<std::size_t>(v)]++;
        std::vector<int> ready;
        for (int id = 1; id <= n; ++id)
            if (indeg[static_cast<std::size_t>(id)] == 0) ready.push_back(id);
        std::vector<int> order;
        order.reserve(static_cast<std::size_t>(n));
        while (!ready.empty()) {
            // smallest id first keeps the order stable across runs
            auto it = std::min_element(ready.begin(), ready.end());
            int u = *it;
            ready.erase(it);
            order.push_back(u);
            for (int v : succ[static_cast<std::size_t>(u)])
                if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
        }
        if (static_cast<int>(order.size()) != n) return {};
        return order;
    }

    std::vector<std::string> check() const {
        std::vector<std::string> issues = transitions.check();
        const int n = num_tasks();
        if (horizon < 1) issues.push_back("horizon must be at least 1");
        if (static_cast<int>(tariff.size()) != horizon)
            issues.push_back("tariff length must equal the horizon");
        if (capacities.empty() || capacities[0] != 1)
            issues.push_back("resource 0 must exist with unit capacity");
        bool any_energy = false;
        for (int id = 1; id <= n; ++id) {
            const Task& t = task(id);
            if (t.id != id) issues.push_back("task ids must be 1..n in order");
            if (t.duration < 1) issues.push_back("task " + std::to_string(id) + " has nonpositive duration");
            if (t.demand.size() != capacities.size())
                issues.push_back("task " + std::to_string(id) + " demand arity mismatch");
            else if (t.demand[0] > 0) {
                any_energy = true;
                if (t.demand[0] != 1)
                    issues.push_back("task " + std::to_string(id) + " must demand exactly one machine unit");
                for (std::size_t k = 1; k < t.demand.size(); ++k)
                    if (t.demand[k] != 0)
                        issues.push_back("energy task " + std::to_string(id) +
                                         " must have zero demand outside the machine");
            }
        }
        if (!any_energy) issues.push_back("at least one energy-intensive task is required");
        for (auto [u, v] : precedence)
            if (u < 1 || u > n || v < 1 || v > n || u == v)
                issues.push_back("invalid precedence arc (" + std::to_string(u) + "," + std::to_string(v) + ")");
        if (topological_order().empty() && n > 0) issues.push_back("precedence graph has a cycle");
        return issues;
    }

    void validate_or_throw() const {
        auto issues = check();
        if (!issues.empty()) throw std::invalid_argument("invalid instance: " + issues.front());
    }
};

// ---------------------------------------------------------------------------
// Solution
// ---------------------------------------------------------------------------

/// Start intervals are 1-based: a task starting at sigma occupies intervals
/// sigma .. sigma + p - 1 and completes at sigma + p - 1 (the end of its last
/// interval). Precedence (u, v) therefore reads sigma_v >= sigma_u + p_u.
struct Solution {
    std::vector<int> starts;          // one per task, 1-based intervals
    std::vector<StatePair> omega;     // one per interval
};

struct ObjectiveWeights {
    double alpha = 1.0;     // in [0, 1]
    double lb_tec = 1.0;    // nonzero
    double lb_rcpsp = 1.0;  // nonzero
};

enum class ViolationKind {
    malformed,
    out_of_horizon,
    resource_capacity,
    precedence,
    uncovered_proc,        // a running energy task without a proc dwell, or vice versa
    boundary_state,
    transition_infeasible,
    transition_duration,
    transition_chain,
};

inline const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::malformed: return "malformed";
        case ViolationKind::out_of_horizon: return "out_of_horizon";
        case ViolationKind::resource_capacity: return "resource_capacity";
        case ViolationKind::precedence: return "precedence";
        case ViolationKind::uncovered_proc: return "uncovered_proc";
        case ViolationKind::boundary_state: return "boundary_state";
        case ViolationKind::transition_infeasible: return "transition_infeasible";
        case ViolationKind::transition_duration: return "transition_duration";
        case ViolationKind::transition_chain: return "transition_chain";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    int subject = 0;  // task id or interval, depending on kind
    std::string detail;
};

/// Checks a candidate solution against every feasibility condition of the
/// problem. Never throws on malformed input; every defect is reported as a
/// violation instead.
inline std::vector<Violation> validate_solution(const Instance& inst, const Solution& sol) {
    std::vector<Violation> out;
    const int n = inst.num_tasks();
    const int h = inst.horizon;

    if (static_cast<int>(sol.starts.size()) != n) {
        out.push_back({ViolationKind::malformed, 0, "start vector size mismatch"});
        return out;
    }
    if (static_cast<int>(sol.omega.size()) != h) {
        out.push_back({ViolationKind::malformed, 0, "omega length mismatch"});
        return out;
    }

    for (int id = 1; id <= n; ++id) {
        const int s = sol.starts[static_cast<std::size_t>(id - 1)];
        const int p = inst.task(id).duration;
        if (s < 1 || s + p - 1 > h)
            out.push_back({ViolationKind::out_of_horizon, id,
                           "start " + std::to_string(s) + " leaves the horizon"});
    }
    if (!out.empty()) return out;  // interval-indexed checks below need in-range starts

    // per-interval resource usage
    const std::size_t nres = inst.capacities.size();
    std::vector<std::vector<int>> usage(nres, std::vector<int>(static_cast<std::size_t>(h) + 1, 0));
    for (int id = 1; id <= n; ++id) {
        const Task& t = inst.task(id);
        const int s = sol.starts[static_cast<std::size_t>(id - 1)];
        for (int i = s; i <= s + t.duration - 1; ++i)
            for (std::size_t k = 0; k < nres; ++k) usage[k][static_cast<std::size_t>(i)] += t.demand[k];
    }
    for (std::size_t k = 0; k < nres; ++k)
        for (int i = 1; i <= h; ++i)
            if (usage[k][static_cast<std::size_t>(i)] > inst.capacities[k])
                out.push_back({ViolationKind::resource_capacity, i,
                               "resource " + std::to_string(k) + " usage " +
                                   std::to_string(usage[k][static_cast<std::size_t>(i)]) + " exceeds " +
                                   std::to_string(inst.capacities[k])});

    for (auto [u, v] : inst.precedence) {
        const int cu = sol.starts[static_cast<std::size_t>(u - 1)] + inst.task(u).duration;
        if (sol.starts[static_cast<std::size_t>(v - 1)] < cu)
            out.push_back({ViolationKind::precedence, v,
                           "task " + std::to_string(v) + " starts before task " + std::to_string(u) +
                               " completes"});
    }

    // machine coverage: each interval is either a proc dwell of exactly one
    // running energy task, or part of a transition step
    std::vector<int> energy_running(static_cast<std::size_t>(h) + 1, 0);
    for (int id : inst.energy_ids()) {
        const int s = sol.starts[static_cast<std::size_t>(id - 1)];
        for (int i = s; i <= s + inst.task(id).duration - 1; ++i)
            energy_running[static_cast<std::size_t>(i)]++;
    }
    for (int i = 1; i <= h; ++i) {
        const StatePair w = sol.omega[static_cast<std::size_t>(i - 1)];
        const bool dwell_proc = (w.from == State::proc && w.to == State::proc);
        const int running = energy_running[static_cast<std::size_t>(i)];
        if (running > 0 && !dwell_proc)
            out.push_back({ViolationKind::uncovered_proc, i, "energy task runs without a proc dwell"});
        if (running == 0 && dwell_proc)
            out.push_back({ViolationKind::uncovered_proc, i, "proc dwell with no running energy task"});
    }

    // the machine is off during the first and last interval
    if (!(sol.omega.front() == StatePair{State::off, State::off}))
        out.push_back({ViolationKind::boundary_state, 1, "machine not off in the first interval"});
    if (!(sol.omega.back() == StatePair{State::off, State::off}))
        out.push_back({ViolationKind::boundary_state, h, "machine not off in the last interval"});

    // transition step structure: maximal runs of one pair
    int i = 1;
    StatePair prev_pair{};
    bool have_prev = false;
    while (i <= h) {
        const StatePair w = sol.omega[static_cast<std::size_t>(i - 1)];
        int end = i;
        while (end < h && sol.omega[static_cast<std::size_t>(end)] == w) ++end;
        const int len = end - i + 1;
        const auto t = inst.transitions.duration(w.from, w.to);
        if (!t) {
            out.push_back({ViolationKind::transition_infeasible, i,
                           std::string("infeasible pair (") + to_string(w.from) + "," + to_string(w.to) + ")"});
        } else if (w.from == w.to) {
            // proc dwells are governed by task coverage; other dwells repeat whole steps
            if (w.from != State::proc && len % *t != 0)
                out.push_back({ViolationKind::transition_duration, i,
                               "dwell run of length " + std::to_string(len) + " is not a multiple of " +
                                   std::to_string(*t)});
        } else if (len != *t) {
            out.push_back({ViolationKind::transition_duration, i,
                           std::string("step (") + to_string(w.from) + "," + to_string(w.to) + ") spans " +
                               std::to_string(len) + " intervals instead of " + std::to_string(*t)});
        }
        if (have_prev && prev_pair.to != w.from)
            out.push_back({ViolationKind::transition_chain, i,
                           std::string("state ") + to_string(w.from) + " does not continue " +
                               to_string(prev_pair.to)});
        prev_pair = w;
        have_prev = true;
        i = end + 1;
    }

    return out;
}

/// Total energy cost: sum over intervals of tariff times transition power.
inline double evaluate_tec(const Instance& inst, const Solution& sol) {
    if (static_cast<int>(sol.omega.size()) != inst.horizon)
        throw std::invalid_argument("omega length mismatch");
    double tec = 0.0;
    for (int i = 1; i <= inst.horizon; ++i) {
        const StatePair w = sol.omega[static_cast<std::size_t>(i - 1)];
        const auto p = inst.transitions.energy(w.from, w.to);
        if (!p) throw std::invalid_argument("omega contains an infeasible transition at interval " +
                                            std::to_string(i));
        tec += inst.tariff[static_cast<std::size_t>(i - 1)] * static_cast<double>(*p);
    }
    return tec;
}

/// Latest completion over all tasks, where a task starting at interval sigma
/// with duration p completes at sigma + p - 1.
inline int evaluate_makespan(const Instance& inst, const Solution& sol) {
    if (sol.starts.size() != inst.tasks.size())
        throw std::invalid_argument("start vector size mismatch");
    int cmax = 0;
    for (int id = 1; id <= inst.num_tasks(); ++id)
        cmax = std::max(cmax, sol.starts[static_cast<std::size_t>(id - 1)] + inst.task(id).duration - 1);
    return cmax;
}

inline double scaled_objective(const ObjectiveWeights& w, double tec, int cmax) {
    return w.alpha / w.lb_tec * tec + (1.0 - w.alpha) / w.lb_rcpsp * static_cast<double>(cmax);
}

inline double evaluate_objective(const Instance& inst, const Solution& sol, const ObjectiveWeights& w) {
    return scaled_objective(w, evaluate_tec(inst, sol), evaluate_makespan(inst, sol));
}

}  // namespace esched

#endif  // ESCHED_CORE_HPP
