#ifndef ESCHED_IO_HPP
#define ESCHED_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "esched/core.hpp"
#include "esched/lbbd.hpp"

namespace esched::io {

using nlohmann::json;

struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& what, int line_no)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

// ---------------------------------------------------------------------------
// Instance documents (versioned JSON)
// ---------------------------------------------------------------------------

inline constexpr int kInstanceFileVersion = 1;

struct InstanceFile {
    Instance instance;
    json metadata = json::object();
};

namespace detail {

inline json matrix_to_json(const std::array<std::array<std::optional<int>, 3>, 3>& m) {
    json rows = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& cell : row)
            r.push_back(cell ? json(*cell) : json(nullptr));
        rows.push_back(r);
    }
    return rows;
}

inline void matrix_from_json(const json& j, std::array<std::array<std::optional<int>, 3>, 3>& m) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("transition matrix must be 3x3");
    for (int a = 0; a < 3; ++a) {
        if (!j[a].is_array() || j[a].size() != 3)
            throw std::invalid_argument("transition matrix must be 3x3");
        for (int b = 0; b < 3; ++b)
            m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                j[a][b].is_null() ? std::optional<int>{} : std::optional<int>{j[a][b].get<int>()};
    }
}

}  // namespace detail

inline json to_json(const InstanceFile& file) {
    const Instance& inst = file.instance;
    json j;
    j["version"] = kInstanceFileVersion;
    j["name"] = inst.name;
    if (!file.metadata.empty()) j["metadata"] = file.metadata;
    j["horizon"] = inst.horizon;
    j["capacities"] = inst.capacities;
    j["tariff"] = inst.tariff;
    j["transitions"] = {{"states", {"proc", "idle", "off"}},
                        {"time", detail::matrix_to_json(inst.transitions.time)},
                        {"power", detail::matrix_to_json(inst.transitions.power)}};
    json tasks = json::array();
    for (const Task& t : inst.tasks)
        tasks.push_back({{"id", t.id}, {"duration", t.duration}, {"demand", t.demand}});
    j["tasks"] = tasks;
    json arcs = json::array();
    for (auto [u, v] : inst.precedence) arcs.push_back({u, v});
    j["precedence"] = arcs;
    return j;
}

inline InstanceFile instance_from_json(const json& j) {
    if (!j.contains("version") || j["version"].get<int>() != kInstanceFileVersion)
        throw std::invalid_argument("unsupported instance file version");
    InstanceFile file;
    Instance& inst = file.instance;
    inst.name = j.value("name", std::string{});
    if (j.contains("metadata")) file.metadata = j["metadata"];
    inst.horizon = j.at("horizon").get<int>();
    inst.capacities = j.at("capacities").get<std::vector<int>>();
    inst.tariff = j.at("tariff").get<std::vector<double>>();
    detail::matrix_from_json(j.at("transitions").at("time"), inst.transitions.time);
    detail::matrix_from_json(j.at("transitions").at("power"), inst.transitions.power);
    for (const auto& t : j.at("tasks"))
        inst.tasks.push_back(Task{t.at("id").get<int>(), t.at("duration").get<int>(),
                                  t.at("demand").get<std::vector<int>>()});
    for (const auto& arc : j.at("precedence"))
        inst.precedence.emplace_back(arc[0].get<int>(), arc[1].get<int>());
    inst.validate_or_throw();
    return file;
}

inline json solution_to_json(const Solution& sol) {
    json j;
    j["starts"] = sol.starts;
    json omega = json::array();
    for (const StatePair& w : sol.omega) omega.push_back({to_string(w.from), to_string(w.to)});
    j["omega"] = omega;
    return j;
}

inline Solution solution_from_json(const json& j) {
    Solution sol;
    sol.starts = j.at("starts").get<std::vector<int>>();
    for (const auto& pair : j.at("omega")) {
        auto from = state_from_string(pair[0].get<std::string>());
        auto to = state_from_string(pair[1].get<std::string>());
        if (!from || !to) throw std::invalid_argument("unknown machine state in solution");
        sol.omega.push_back({*from, *to});
    }
    return sol;
}

// ---------------------------------------------------------------------------
// PSPLIB single-mode ingestion
// ---------------------------------------------------------------------------

/// A plain RCPSP as read from a .sm file: renewable capacities, durations,
/// demands, precedence arcs. Format dummies (supersource and sink) are
/// already stripped and the remaining jobs renumbered from 1.
struct BaseRcpsp {
    std::vector<int> durations;
    std::vector<std::vector<int>> demands;  // per task, per renewable resource
    std::vector<int> capacities;
    std::vector<std::pair<int, int>> precedence;

    int num_tasks() const { return static_cast<int>(durations.size()); }
};

inline BaseRcpsp parse_psplib(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    int jobs = -1, renewables = -1;
    std::vector<std::vector<int>> successors;
    std::vector<int> durations;
    std::vector<std::vector<int>> demands;
    std::vector<int> capacities;

    auto next_line = [&](std::string& out) {
        if (!std::getline(in, out)) return false;
        ++line_no;
        return true;
    };

    while (next_line(line)) {
        if (line.find("jobs") != std::string::npos && line.find(':') != std::string::npos) {
            std::istringstream ls(line.substr(line.find(':') + 1));
            if (!(ls >> jobs) || jobs < 3) throw ParseError("unreadable job count", line_no);
        } else if (line.find("- renewable") != std::string::npos &&
                   line.find(':') != std::string::npos) {
            std::istringstream ls(line.substr(line.find(':') + 1));
            if (!(ls >> renewables) || renewables < 1)
                throw ParseError("unreadable renewable resource count", line_no);
        } else if (line.find("PRECEDENCE RELATIONS") != std::string::npos) {
            if (jobs < 0) throw ParseError("precedence section before job count", line_no);
            if (!next_line(line)) throw ParseError("missing precedence header", line_no);
            successors.assign(static_cast<std::size_t>(jobs) + 1, {});
            for (int row = 0; row < jobs; ++row) {
                if (!next_line(line)) throw ParseError("truncated precedence section", line_no);
                std::istringstream ls(line);
                int jobnr, modes, count;
                if (!(ls >> jobnr >> modes >> count))
                    throw ParseError("unreadable precedence row", line_no);
                if (jobnr < 1 || jobnr > jobs) throw ParseError("job number out of range", line_no);
                for (int k = 0; k < count; ++k) {
                    int s;
                    if (!(ls >> s) || s < 1 || s > jobs)
                        throw ParseError("unreadable successor list", line_no);
                    successors[static_cast<std::size_t>(jobnr)].push_back(s);
                }
            }
        } else if (line.find("REQUESTS/DURATIONS") != std::string::npos) {
            if (jobs < 0 || renewables < 0)
                throw ParseError("durations section before the header counts", line_no);
            if (!next_line(line)) throw ParseError("missing durations header", line_no);
            durations.assign(static_cast<std::size_t>(jobs) + 1, 0);
            demands.assign(static_cast<std::size_t>(jobs) + 1,
                           std::vector<int>(static_cast<std::size_t>(renewables), 0));
            int rows = 0;
            while (rows < jobs) {
                if (!next_line(line)) throw ParseError("truncated durations section", line_no);
                if (line.find_first_not_of(" -\t\r") == std::string::npos) continue;  // ruler line
                std::istringstream ls(line);
                int jobnr, mode, dur;
                if (!(ls >> jobnr >> mode >> dur)) throw ParseError("unreadable duration row", line_no);
                if (jobnr < 1 || jobnr > jobs) throw ParseError("job number out of range", line_no);
                durations[static_cast<std::size_t>(jobnr)] = dur;
                for (int k = 0; k < renewables; ++k) {
                    int d;
                    if (!(ls >> d)) throw ParseError("unreadable demand row", line_no);
                    demands[static_cast<std::size_t>(jobnr)][static_cast<std::size_t>(k)] = d;
                }
                ++rows;
            }
        } else if (line.find("RESOURCEAVAILABILITIES") != std::string::npos) {
            if (renewables < 0) throw ParseError("availabilities before resource count", line_no);
            if (!next_line(line)) throw ParseError("missing availabilities header", line_no);
            if (!next_line(line)) throw ParseError("missing availabilities row", line_no);
            std::istringstream ls(line);
            for (int k = 0; k < renewables; ++k) {
                int c;
                if (!(ls >> c)) throw ParseError("unreadable capacities", line_no);
                capacities.push_back(c);
            }
        }
    }
    if (jobs < 0 || renewables < 0 || successors.empty() || durations.empty() || capacities.empty())
        throw ParseError("missing sections", line_no);

    // strip the supersource (job 1) and sink (job `jobs`)
    BaseRcpsp base;
    base.capacities = capacities;
    const int inner = jobs - 2;
    for (int j = 2; j <= jobs - 1; ++j) {
        base.durations.push_back(std::max(1, durations[static_cast<std::size_t>(j)]));
        base.demands.push_back(demands[static_cast<std::size_t>(j)]);
    }
    for (int j = 2; j <= jobs - 1; ++j)
        for (int s : successors[static_cast<std::size_t>(j)])
            if (s >= 2 && s <= jobs - 1) base.precedence.emplace_back(j - 1, s - 1);

    // acyclicity over the stripped graph
    std::vector<int> indeg(static_cast<std::size_t>(inner) + 1, 0);
    std::vector<std::vector<int>> succ(static_cast<std::size_t>(inner) + 1);
    for (auto [u, v] : base.precedence) {
        succ[static_cast<std::size_t>(u)].push_back(v);
        indeg[static_cast<std::size_t>(v)]++;
    }
    std::vector<int> ready;
    for (int j = 1; j <= inner; ++j)
        if (indeg[static_cast<std::size_t>(j)] == 0) ready.push_back(j);
    int seen = 0;
    while (!ready.empty()) {
        int u = ready.back();
        ready.pop_back();
        ++seen;
        for (int v : succ[static_cast<std::size_t>(u)])
            if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    }
    if (seen != inner) throw ParseError("precedence relation contains a cycle", line_no);
    return base;
}

// ---------------------------------------------------------------------------
// Tariff CSV
// ---------------------------------------------------------------------------

/// `idx,cost` rows in any order; indices must be contiguous.
inline std::vector<double> parse_costs_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty tariff file", 1);
    ++line_no;
    if (line.find("idx") == std::string::npos || line.find("cost") == std::string::npos)
        throw ParseError("expected header idx,cost", line_no);
    std::vector<std::pair<long long, double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected idx,cost", line_no);
        try {
            rows.emplace_back(std::stoll(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ParseError("unreadable idx,cost row", line_no);
        }
    }
    if (rows.empty()) throw ParseError("tariff file has no rows", line_no);
    std::sort(rows.begin(), rows.end());
    std::vector<double> tariff;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first == rows[i - 1].first)
            throw ParseError("duplicate index " + std::to_string(rows[i].first), line_no);
        if (i > 0 && rows[i].first != rows[i - 1].first + 1)
            throw ParseError("gap before index " + std::to_string(rows[i].first), line_no);
        tariff.push_back(rows[i].second);
    }
    return tariff;
}

// ---------------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------------

enum class Density { sparse, standard, dense };

inline const char* to_string(Density d) {
    switch (d) {
        case Density::sparse: return "sparse";
        case Density::standard: return "standard";
        case Density::dense: return "dense";
    }
    return "?";
}

inline std::optional<Density> density_from_string(const std::string& s) {
    if (s == "sparse") return Density::sparse;
    if (s == "standard") return Density::standard;
    if (s == "dense") return Density::dense;
    return std::nullopt;
}

inline double density_ratio(Density d) {
    switch (d) {
        case Density::sparse: return 0.05;
        case Density::standard: return 0.175;
        case Density::dense: return 0.50;
    }
    return 0.175;
}

struct GeneratorOptions {
    Density density = Density::standard;
    double gamma = 2.0;  // horizon slack factor
    std::uint64_t seed = 1;
    std::string name;
    std::vector<std::string> source_files;
};

/// Merge base problems into one instance: disjoint precedence union, five
/// resources with the unary machine in front, a seeded share of tasks turned
/// energy-intensive, the tariff tiled over a horizon with headroom.
inline InstanceFile generate_instance(const std::vector<BaseRcpsp>& bases,
                                      const std::vector<double>& tariff_pattern,
                                      const GeneratorOptions& opt) {
    if (bases.empty()) throw std::invalid_argument("at least one base problem is required");
    if (tariff_pattern.empty()) throw std::invalid_argument("tariff pattern must not be empty");

    constexpr int kRenewables = 4;
    Instance inst;
    inst.name = opt.name.empty() ? ("gen-" + std::string(to_string(opt.density)) + "-" +
                                    std::to_string(opt.seed))
                                 : opt.name;
    inst.capacities.assign(1 + kRenewables, 0);
    inst.capacities[0] = 1;

    int offset = 0;
    for (const BaseRcpsp& base : bases) {
        for (int j = 1; j <= base.num_tasks(); ++j) {
            Task t;
            t.id = offset + j;
            t.duration = base.durations[static_cast<std::size_t>(j - 1)];
            t.demand.assign(1 + kRenewables, 0);
            const auto& d = base.demands[static_cast<std::size_t>(j - 1)];
            for (int k = 0; k < kRenewables; ++k)
                t.demand[static_cast<std::size_t>(k + 1)] =
                    k < static_cast<int>(d.size()) ? d[static_cast<std::size_t>(k)] : 0;
            inst.tasks.push_back(std::move(t));
        }
        for (auto [u, v] : base.precedence) inst.precedence.emplace_back(offset + u, offset + v);
        for (int k = 0; k < kRenewables; ++k)
            if (k < static_cast<int>(base.capacities.size()))
                inst.capacities[static_cast<std::size_t>(k + 1)] =
                    std::max(inst.capacities[static_cast<std::size_t>(k + 1)],
                             base.capacities[static_cast<std::size_t>(k)]);
        offset += base.num_tasks();
    }

    const int n = inst.num_tasks();
    std::mt19937_64 rng(opt.seed);
    const int n_energy =
        std::max(1, static_cast<int>(std::floor(density_ratio(opt.density) * n)));
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) ids[static_cast<std::size_t>(j - 1)] = j;
    for (int k = 0; k < n_energy; ++k) {
        const int pick = k + static_cast<int>(rng() % static_cast<std::uint64_t>(n - k));
        std::swap(ids[static_cast<std::size_t>(k)], ids[static_cast<std::size_t>(pick)]);
    }
    for (int k = 0; k < n_energy; ++k) {
        Task& t = inst.tasks[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)] - 1)];
        std::fill(t.demand.begin(), t.demand.end(), 0);
        t.demand[0] = 1;
    }

    inst.transitions = [] {
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
    }();

    // horizon: critical path plus the serial machine load plus the ramps,
    // inflated by gamma
    std::vector<int> lp(static_cast<std::size_t>(n) + 1, 0);
    int critical = 0;
    {
        std::vector<std::vector<int>> pred(static_cast<std::size_t>(n) + 1);
        for (auto [u, v] : inst.precedence) pred[static_cast<std::size_t>(v)].push_back(u);
        for (int v : inst.topological_order()) {
            int best = 0;
            for (int u : pred[static_cast<std::size_t>(v)])
                best = std::max(best, lp[static_cast<std::size_t>(u)]);
            lp[static_cast<std::size_t>(v)] = best + inst.task(v).duration;
            critical = std::max(critical, lp[static_cast<std::size_t>(v)]);
        }
    }
    int energy_load = 0;
    for (int id : inst.energy_ids()) energy_load += inst.task(id).duration;
    const int ramps = *inst.transitions.duration(State::off, State::proc) +
                      *inst.transitions.duration(State::proc, State::off);
    inst.horizon =
        static_cast<int>(std::ceil(opt.gamma * static_cast<double>(critical + energy_load + ramps)));

    inst.tariff.resize(static_cast<std::size_t>(inst.horizon));
    for (int i = 0; i < inst.horizon; ++i)
        inst.tariff[static_cast<std::size_t>(i)] =
            tariff_pattern[static_cast<std::size_t>(i) % tariff_pattern.size()];

    inst.validate_or_throw();
    if (!lbbd::warmstart_fsws(inst))
        throw std::invalid_argument("generated horizon admits no first-feasible schedule");

    InstanceFile file;
    file.instance = std::move(inst);
    file.metadata = {{"density", to_string(opt.density)},
                     {"seed", opt.seed},
                     {"gamma", opt.gamma},
                     {"sources", opt.source_files}};
    return file;
}

}  // namespace esched::io

#endif  // ESCHED_IO_HPP
