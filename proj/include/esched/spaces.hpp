#ifndef ESCHED_SPACES_HPP
#define ESCHED_SPACES_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "esched/core.hpp"

namespace esched::spaces {

/// Optimal transition costs over the time-expanded state graph.
///
/// cstar(l, m) is the cheapest way to bridge intervals l .. m-1: the machine
/// leaves proc after interval l-1 (or the initial off state when l == 1) and
/// is back in proc for interval m (or parked in the final off state when
/// m == h+1). Paths walk transition steps only; a proc dwell is reserved for
/// task processing and never appears inside a transition.
class SpacesTable {
public:
    SpacesTable(TransitionSystem transitions, std::vector<double> tariff)
        : transitions_(std::move(transitions)), tariff_(std::move(tariff)) {
        const int h = horizon();
        if (h < 1) throw std::invalid_argument("tariff must cover at least one interval");
        tariff_prefix_.assign(static_cast<std::size_t>(h) + 1, 0.0);
        for (int i = 1; i <= h; ++i)
            tariff_prefix_[static_cast<std::size_t>(i)] =
                tariff_prefix_[static_cast<std::size_t>(i - 1)] + tariff_[static_cast<std::size_t>(i - 1)];
        cstar_.assign(static_cast<std::size_t>(h) + 1, {});
        for (int l = 1; l <= h; ++l) {
            Layer layer = run_layer(l);
            auto& row = cstar_[static_cast<std::size_t>(l)];
            row.assign(static_cast<std::size_t>(h) + 2, std::nullopt);
            for (int m = l + 1; m <= h; ++m)
                row[static_cast<std::size_t>(m)] = layer.node(m - 1, State::proc).cost;
            row[static_cast<std::size_t>(h) + 1] = final_off_cost(l, layer);
        }
    }

    int horizon() const { return static_cast<int>(tariff_.size()); }
    const TransitionSystem& transitions() const { return transitions_; }
    const std::vector<double>& tariff() const { return tariff_; }

    /// cstar(l, m); nullopt when no state sequence of that exact span exists.
    std::optional<double> transition_cost(int l, int m) const {
        require_pair(l, m);
        return cstar_[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)];
    }

    /// Cost of processing for `duration` intervals starting at `start`.
    double job_cost(int duration, int start) const {
        const int h = horizon();
        if (duration < 1 || start < 1 || start + duration - 1 > h)
            throw std::invalid_argument("job placement leaves the horizon");
        const auto p = transitions_.energy(State::proc, State::proc);
        if (!p) throw std::invalid_argument("proc dwell has no finite power");
        return static_cast<double>(*p) * (tariff_prefix_[static_cast<std::size_t>(start + duration - 1)] -
                                          tariff_prefix_[static_cast<std::size_t>(start - 1)]);
    }

    /// Sum of tariff over intervals start .. start+len-1.
    double tariff_sum(int start, int len) const {
        return tariff_prefix_[static_cast<std::size_t>(start + len - 1)] -
               tariff_prefix_[static_cast<std::size_t>(start - 1)];
    }

    /// State-pair sequence of an optimal transition, one entry per interval
    /// l .. m-1. Ties are broken toward sequences entering off earliest.
    std::vector<StatePair> reconstruct(int l, int m) const {
        require_pair(l, m);
        if (!cstar_[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)])
            throw std::invalid_argument("no transition spans (" + std::to_string(l) + "," +
                                        std::to_string(m) + ")");
        const int h = horizon();
        Layer layer = run_layer(l);
        std::vector<StatePair> seq;
        int point = m - 1;
        State state = State::proc;
        if (m == h + 1) {
            // the trailing off dwell that parks the machine through interval h
            const int dwell = *transitions_.duration(State::off, State::off);
            for (int k = 0; k < dwell; ++k) seq.push_back({State::off, State::off});
            point = h - dwell;
            state = State::off;
        }
        while (point > l - 1) {
            const Node& nd = layer.node(point, state);
            const auto t = transitions_.duration(nd.from, state);
            for (int k = 0; k < *t; ++k) seq.push_back({nd.from, state});
            point -= *t;
            state = nd.from;
        }
        std::reverse(seq.begin(), seq.end());
        return seq;
    }

    /// Debug dump, one row per admissible (l, m) pair.
    void dump_csv(std::ostream& os) const {
        os << "l,m,cost\n";
        const int h = horizon();
        for (int l = 1; l <= h; ++l)
            for (int m = l + 1; m <= h + 1; ++m) {
                const auto& c = cstar_[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)];
                os << l << ',' << m << ',';
                if (c)
                    os << *c << '\n';
                else
                    os << "inf\n";
            }
    }

private:
    struct Node {
        std::optional<double> cost;
        int first_off = std::numeric_limits<int>::max();  // earliest point spent in off
        State from = State::off;                          // state before the step reaching this node
    };

    struct Layer {
        int base = 0;  // first point of the layer
        std::vector<std::array<Node, 3>> nodes;
        Node& node(int point, State s) {
            return nodes[static_cast<std::size_t>(point - base)][static_cast<std::size_t>(static_cast<int>(s))];
        }
        const Node& node(int point, State s) const {
            return nodes[static_cast<std::size_t>(point - base)][static_cast<std::size_t>(static_cast<int>(s))];
        }
    };

    void require_pair(int l, int m) const {
        if (l < 1 || l > horizon() || m <= l || m > horizon() + 1)
            throw std::invalid_argument("transition pair (" + std::to_string(l) + "," + std::to_string(m) +
                                        ") out of range");
    }

    // Arrival at the final off state: the machine must already be off for the
    // last interval, so the path closes with one off dwell covering it.
    std::optional<double> final_off_cost(int l, const Layer& layer) const {
        const int h = horizon();
        const int dwell = *transitions_.duration(State::off, State::off);
        const int anchor = h - dwell;
        if (anchor < l - 1) return std::nullopt;
        const auto& node = layer.node(anchor, State::off);
        if (!node.cost) return std::nullopt;
        const double power = static_cast<double>(*transitions_.energy(State::off, State::off));
        return *node.cost + power * tariff_sum(anchor + 1, dwell);
    }

    // Single-source sweep over points l-1 .. h. The graph is layered by time,
    // so one pass in point order is exact even under negative tariffs. When
    // departing the initial off state, the machine stays off through the
    // whole first interval, so the step out of point 0 must be an off dwell.
    Layer run_layer(int l) const {
        const int h = horizon();
        Layer layer;
        layer.base = l - 1;
        layer.nodes.assign(static_cast<std::size_t>(h - l + 2), {});
        const State source = (l == 1) ? State::off : State::proc;
        Node& start = layer.node(l - 1, source);
        start.cost = 0.0;
        start.first_off = (source == State::off) ? l - 1 : std::numeric_limits<int>::max();
        for (int point = l - 1; point <= h; ++point) {
            for (State a : kAllStates) {
                const Node cur = layer.node(point, a);
                if (!cur.cost) continue;
                for (State b : kAllStates) {
                    if (a == State::proc && b == State::proc) continue;  // dwell means processing
                    if (l == 1 && point == 0 && !(a == State::off && b == State::off))
                        continue;  // interval 1 is an off dwell by problem statement
                    const auto t = transitions_.duration(a, b);
                    if (!t || point + *t > h) continue;
                    const auto p = transitions_.energy(a, b);
                    const double step = static_cast<double>(*p) * tariff_sum(point + 1, *t);
                    Node& nxt = layer.node(point + *t, b);
                    const double cand = *cur.cost + step;
                    const int cand_off =
                        std::min(cur.first_off, b == State::off ? point + *t : std::numeric_limits<int>::max());
                    if (!nxt.cost || cand < *nxt.cost || (cand == *nxt.cost && cand_off < nxt.first_off)) {
                        nxt.cost = cand;
                        nxt.first_off = cand_off;
                        nxt.from = a;
                    }
                }
            }
        }
        return layer;
    }

    TransitionSystem transitions_;
    std::vector<double> tariff_;
    std::vector<double> tariff_prefix_;
    std::vector<std::vector<std::optional<double>>> cstar_;
};

inline SpacesTable build_spaces(const TransitionSystem& transitions, const std::vector<double>& tariff) {
    return SpacesTable(transitions, tariff);
}

}  // namespace esched::spaces

#endif  // ESCHED_SPACES_HPP
