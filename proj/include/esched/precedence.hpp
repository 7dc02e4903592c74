#ifndef ESCHED_PRECEDENCE_HPP
#define ESCHED_PRECEDENCE_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esched/core.hpp"

namespace esched::precedence {

/// Pairwise minimal processing distances over the precedence DAG.
///
/// md(u, v) = p_u plus the largest total processing time over the inner tasks
/// of any path u -> ... -> v; finite exactly when v is a descendant of u.
/// A start-time reading: sigma_v >= sigma_u + md(u, v).
class MDMatrix {
public:
    MDMatrix(const Instance& inst, std::vector<int> topo)
        : num_tasks_(inst.num_tasks()), topo_(std::move(topo)) {
        durations_.resize(static_cast<std::size_t>(num_tasks_) + 1);
        for (int id = 1; id <= num_tasks_; ++id)
            durations_[static_cast<std::size_t>(id)] = inst.task(id).duration;
        succ_ = inst.successors();
        rows_.resize(static_cast<std::size_t>(num_tasks_) + 1);
        // small graphs are materialized eagerly; larger ones row-by-row on demand
        if (num_tasks_ <= kDenseLimit)
            for (int id = 1; id <= num_tasks_; ++id) ensure_row(id);
    }

    std::optional<int> md(int u, int v) const {
        ensure_row(u);
        return rows_[static_cast<std::size_t>(u)]->at(static_cast<std::size_t>(v));
    }

    int num_tasks() const { return num_tasks_; }

    /// Descendants of u in id order.
    std::vector<int> descendants(int u) const {
        ensure_row(u);
        std::vector<int> out;
        for (int v = 1; v <= num_tasks_; ++v)
            if (rows_[static_cast<std::size_t>(u)]->at(static_cast<std::size_t>(v))) out.push_back(v);
        return out;
    }

private:
    static constexpr int kDenseLimit = 2000;

    void ensure_row(int u) const {
        if (u < 1 || u > num_tasks_) throw std::invalid_argument("task id out of range");
        auto& row = rows_[static_cast<std::size_t>(u)];
        if (row) return;
        row.emplace(static_cast<std::size_t>(num_tasks_) + 1, std::nullopt);
        // longest path in topological order; arcs leaving w add p_w
        std::vector<std::optional<int>> best(static_cast<std::size_t>(num_tasks_) + 1, std::nullopt);
        best[static_cast<std::size_t>(u)] = 0;
        for (int w : topo_) {
            const auto bw = best[static_cast<std::size_t>(w)];
            if (!bw) continue;
            const int reach = *bw + durations_[static_cast<std::size_t>(w)];
            for (int v : succ_[static_cast<std::size_t>(w)]) {
                auto& bv = best[static_cast<std::size_t>(v)];
                if (!bv || *bv < reach) bv = reach;
            }
        }
        for (int v = 1; v <= num_tasks_; ++v)
            if (v != u) row->at(static_cast<std::size_t>(v)) = best[static_cast<std::size_t>(v)];
    }

    int num_tasks_;
    std::vector<int> topo_;
    std::vector<int> durations_;
    std::vector<std::vector<int>> succ_;
    mutable std::vector<std::optional<std::vector<std::optional<int>>>> rows_;
};

inline MDMatrix compute_md(const Instance& inst) {
    auto topo = inst.topological_order();
    if (topo.empty() && inst.num_tasks() > 0) {
        // surface one offending cycle for diagnostics
        auto succ = inst.successors();
        std::vector<int> color(static_cast<std::size_t>(inst.num_tasks()) + 1, 0);
        std::vector<int> stack, cycle;
        auto dfs = [&](auto&& self, int u) -> bool {
            color[static_cast<std::size_t>(u)] = 1;
            stack.push_back(u);
            for (int v : succ[static_cast<std::size_t>(u)]) {
                if (color[static_cast<std::size_t>(v)] == 1) {
                    auto it = std::find(stack.begin(), stack.end(), v);
                    cycle.assign(it, stack.end());
                    return true;
                }
                if (color[static_cast<std::size_t>(v)] == 0 && self(self, v)) return true;
            }
            stack.pop_back();
            color[static_cast<std::size_t>(u)] = 2;
            return false;
        };
        for (int id = 1; id <= inst.num_tasks() && cycle.empty(); ++id)
            if (color[static_cast<std::size_t>(id)] == 0) dfs(dfs, id);
        std::string msg = "precedence cycle:";
        for (int id : cycle) msg += " " + std::to_string(id);
        throw std::invalid_argument(msg);
    }
    return MDMatrix(inst, std::move(topo));
}

/// Inclusive start-interval window of one energy task.
struct Window {
    int task = 0;
    int lo = 1;
    int hi = 0;

    bool empty() const { return lo > hi; }
    bool contains(int s) const { return lo <= s && s <= hi; }
};

/// Admissible start windows for the energy-intensive tasks.
///
/// The machine must ramp up from off before the first processing interval and
/// shut down after the last one, which removes the leading and trailing
/// intervals of the horizon. Ancestors and descendants (of any kind) tighten
/// the window further through their minimal distances.
inline std::vector<Window> start_end_windows(const Instance& inst, const MDMatrix& md) {
    const int h = inst.horizon;
    const auto ramp_up = inst.transitions.duration(State::off, State::proc);
    const auto ramp_down = inst.transitions.duration(State::proc, State::off);
    if (!ramp_up || !ramp_down)
        throw std::invalid_argument("machine cannot both start and stop from off");
    std::vector<Window> windows;
    for (int j : inst.energy_ids()) {
        Window w;
        w.task = j;
        w.lo = 2 + *ramp_up;
        w.hi = h - *ramp_down - inst.task(j).duration;
        for (int other = 1; other <= inst.num_tasks(); ++other) {
            if (other == j) continue;
            if (auto d = md.md(other, j)) w.lo = std::max(w.lo, 1 + *d);
            if (auto d = md.md(j, other)) w.hi = std::min(w.hi, h - *d);
        }
        if (w.empty())
            throw std::invalid_argument("task " + std::to_string(j) +
                                        " has an empty start window: instance infeasible");
        windows.push_back(w);
    }
    return windows;
}

}  // namespace esched::precedence

#endif  // ESCHED_PRECEDENCE_HPP
