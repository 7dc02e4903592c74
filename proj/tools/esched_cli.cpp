// Command-line front end: solve, export-model, generate, validate, bench.
//
// Exit codes: 0 success, 2 parse/usage failure, 3 infeasible, 4 budget
// exhausted.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "esched/core.hpp"
#include "esched/io.hpp"
#include "esched/lbbd.hpp"
#include "esched/master.hpp"
#include "esched/oracle.hpp"
#include "esched/precedence.hpp"
#include "esched/spaces.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

esched::io::InstanceFile load_instance(const std::string& path) {
    return esched::io::instance_from_json(json::parse(slurp(path)));
}

json run_to_json(const esched::lbbd::RunResult& run, double wall_ms) {
    json j;
    j["status"] = esched::lbbd::to_string(run.status);
    j["objective"] = run.objective;
    j["tec"] = run.tec;
    j["cmax"] = run.cmax;
    j["lb_tec"] = run.weights.lb_tec;
    j["lb_rcpsp"] = run.weights.lb_rcpsp;
    j["alpha"] = run.weights.alpha;
    j["wall_ms"] = wall_ms;
    j["stats"] = {{"feasibility_cuts", run.stats.feasibility_cuts},
                  {"nogood_cuts", run.stats.nogood_cuts},
                  {"optimality_cuts", run.stats.optimality_cuts},
                  {"subproblem_invocations", run.stats.subproblem_invocations},
                  {"subproblems_feasible", run.stats.subproblems_feasible},
                  {"mean_conflict_size", run.stats.mean_conflict_size},
                  {"master_nodes", run.stats.master_nodes},
                  {"normalization_guarded", run.stats.normalization_guarded},
                  {"downgraded", run.stats.downgraded}};
    if (run.solution) j["solution"] = esched::io::solution_to_json(*run.solution);
    return j;
}

int status_exit(esched::lbbd::RunStatus status) {
    switch (status) {
        case esched::lbbd::RunStatus::infeasible: return kExitInfeasible;
        case esched::lbbd::RunStatus::budget: return kExitBudget;
        default: return 0;
    }
}

struct SolveArgs {
    std::string instance_path;
    std::string method = "lbbd";
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t master_budget = 50'000'000;
    std::uint64_t sub_budget = 2'000'000;
    std::uint64_t sub_wall_ms = 10'000;
    std::string warmstart = "fsws";
    std::string out;
};

int cmd_solve(const SolveArgs& args) {
    if (!(args.alpha > 0.0) || args.alpha > 1.0)
        throw CLI::ValidationError("--alpha must lie in (0, 1]");
    const auto file = load_instance(args.instance_path);
    const auto t0 = std::chrono::steady_clock::now();
    json result;
    int exit_code = 0;

    if (args.method == "oracle") {
        auto lb_tec = esched::lbbd::compute_lb_tec(file.instance);
        auto lb_rcpsp = esched::lbbd::compute_lb_rcpsp(file.instance);
        esched::ObjectiveWeights w{args.alpha, std::max(lb_tec.value, 1e-9), lb_rcpsp.value};
        auto oracle = esched::oracle::brute_force(file.instance, w);
        const double wall =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        result = {{"status", "optimal"},
                  {"objective", oracle.objective},
                  {"tec", oracle.tec},
                  {"cmax", oracle.cmax},
                  {"lb_tec", w.lb_tec},
                  {"lb_rcpsp", w.lb_rcpsp},
                  {"alpha", args.alpha},
                  {"feasible_count", oracle.feasible_count},
                  {"wall_ms", wall},
                  {"solution", esched::io::solution_to_json(oracle.solution)}};
    } else if (args.method == "lbbd") {
        esched::lbbd::Config config;
        config.alpha = args.alpha;
        config.master_budget = args.master_budget;
        config.sub_budget = args.sub_budget;
        config.sub_wall_ms = args.sub_wall_ms;
        config.seed = args.seed;
        config.warmstart = args.warmstart == "none" ? esched::lbbd::Config::Warmstart::none
                                                    : esched::lbbd::Config::Warmstart::fsws;
        auto run = esched::lbbd::run_lbbd(file.instance, config);
        const double wall =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        result = run_to_json(run, wall);
        exit_code = status_exit(run.status);
    } else {
        throw CLI::ValidationError("--method must be lbbd or oracle");
    }

    const std::string text = result.dump(2) + "\n";
    std::cout << text;
    if (!args.out.empty()) spill(args.out, text);
    return exit_code;
}

int cmd_export(const std::string& instance_path, const std::string& kind, double alpha,
               const std::string& out) {
    if (alpha < 0.0 || alpha > 1.0) throw CLI::ValidationError("--alpha must lie in [0, 1]");
    const auto file = load_instance(instance_path);
    const auto& inst = file.instance;
    auto lb_tec = esched::lbbd::compute_lb_tec(inst);
    auto lb_rcpsp = esched::lbbd::compute_lb_rcpsp(inst);
    esched::ObjectiveWeights w{alpha, std::max(lb_tec.value, 1e-9), lb_rcpsp.value};
    std::ostringstream os;
    if (kind == "monolithic") {
        esched::oracle::export_monolithic(inst, w, os);
    } else if (kind == "master") {
        auto table = esched::spaces::build_spaces(inst.transitions, inst.tariff);
        auto md = esched::precedence::compute_md(inst);
        auto model = esched::master::build_master(inst, table, md, w);
        esched::master::export_lp(model, os);
    } else {
        throw CLI::ValidationError("--kind must be master or monolithic");
    }
    if (out.empty())
        std::cout << os.str();
    else
        spill(out, os.str());
    return 0;
}

int cmd_generate(const std::vector<std::string>& base_paths, const std::string& tariff_path,
                 const std::string& density, double gamma, std::uint64_t seed,
                 const std::string& name, const std::string& out) {
    std::vector<esched::io::BaseRcpsp> bases;
    for (const auto& p : base_paths) bases.push_back(esched::io::parse_psplib(slurp(p)));
    const auto tariff = esched::io::parse_costs_csv(slurp(tariff_path));
    esched::io::GeneratorOptions opt;
    const auto d = esched::io::density_from_string(density);
    if (!d) throw CLI::ValidationError("--density must be sparse, standard, or dense");
    opt.density = *d;
    opt.gamma = gamma;
    opt.seed = seed;
    opt.name = name;
    opt.source_files = base_paths;
    const auto file = esched::io::generate_instance(bases, tariff, opt);
    const std::string text = esched::io::to_json(file).dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        spill(out, text);
    return 0;
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path) {
    const auto file = load_instance(instance_path);
    const auto sol = esched::io::solution_from_json(json::parse(slurp(solution_path)));
    const auto violations = esched::validate_solution(file.instance, sol);
    json out = json::array();
    for (const auto& v : violations)
        out.push_back({{"kind", esched::to_string(v.kind)}, {"subject", v.subject}, {"detail", v.detail}});
    if (violations.empty()) {
        std::cout << "{\"ok\": true}\n";
        return 0;
    }
    std::cout << json{{"ok", false}, {"violations", out}}.dump(2) << "\n";
    return kExitInfeasible;
}

int cmd_bench(const std::string& dir, const std::string& alphas_arg,
              std::uint64_t master_budget, std::uint64_t sub_budget, const std::string& out) {
    std::vector<double> alphas;
    {
        std::istringstream ss(alphas_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) alphas.push_back(std::stod(tok));
    }
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());

    std::ostringstream csv;
    csv << "instance,alpha,status,objective,tec,cmax,feasibility_cuts,nogood_cuts,optimality_cuts,"
           "subproblems_feasible,subproblem_invocations,mean_conflict_size,wall_ms\n";
    for (const auto& path : paths) {
        const auto file = load_instance(path);
        for (double alpha : alphas) {
            esched::lbbd::Config config;
            config.alpha = alpha;
            config.master_budget = master_budget;
            config.sub_budget = sub_budget;
            const auto t0 = std::chrono::steady_clock::now();
            auto run = esched::lbbd::run_lbbd(file.instance, config);
            const double wall =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
            csv << file.instance.name << ',' << alpha << ',' << esched::lbbd::to_string(run.status)
                << ',' << run.objective << ',' << run.tec << ',' << run.cmax << ','
                << run.stats.feasibility_cuts << ',' << run.stats.nogood_cuts << ','
                << run.stats.optimality_cuts << ',' << run.stats.subproblems_feasible << ','
                << run.stats.subproblem_invocations << ',' << run.stats.mean_conflict_size << ','
                << wall << "\n";
        }
    }
    if (out.empty())
        std::cout << csv.str();
    else
        spill(out, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact solvers for project scheduling with a stateful energy machine"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "solve one instance");
    solve->add_option("instance", solve_args.instance_path, "instance JSON")->required();
    solve->add_option("--method", solve_args.method, "lbbd or oracle");
    solve->add_option("--alpha", solve_args.alpha, "energy weight in (0, 1]");
    solve->add_option("--seed", solve_args.seed, "run seed (recorded)");
    solve->add_option("--master-budget", solve_args.master_budget, "master node budget");
    solve->add_option("--sub-budget", solve_args.sub_budget, "subproblem node budget");
    solve->add_option("--sub-wall-ms", solve_args.sub_wall_ms, "subproblem wall backstop (ms)");
    solve->add_option("--warmstart", solve_args.warmstart, "fsws or none");
    solve->add_option("--out", solve_args.out, "also write the result JSON here");

    std::string export_instance, export_kind = "master", export_out;
    double export_alpha = 1.0;
    auto* exp = app.add_subcommand("export-model", "write an LP model file");
    exp->add_option("instance", export_instance, "instance JSON")->required();
    exp->add_option("--kind", export_kind, "master or monolithic");
    exp->add_option("--alpha", export_alpha, "energy weight in (0, 1]");
    exp->add_option("--out", export_out, "output path (stdout when omitted)");

    std::vector<std::string> gen_bases;
    std::string gen_tariff, gen_density = "standard", gen_name, gen_out;
    double gen_gamma = 2.0;
    std::uint64_t gen_seed = 1;
    auto* gen = app.add_subcommand("generate", "merge base problems into an instance");
    gen->add_option("--base", gen_bases, "PSPLIB .sm file (repeatable)")->required();
    gen->add_option("--tariff", gen_tariff, "tariff CSV (idx,cost)")->required();
    gen->add_option("--density", gen_density, "sparse, standard, or dense");
    gen->add_option("--gamma", gen_gamma, "horizon slack factor");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--name", gen_name, "instance name");
    gen->add_option("--out", gen_out, "output path (stdout when omitted)");

    std::string val_instance, val_solution;
    auto* val = app.add_subcommand("validate", "check a solution file");
    val->add_option("instance", val_instance, "instance JSON")->required();
    val->add_option("solution", val_solution, "solution JSON")->required();

    std::string bench_dir, bench_alphas = "0.25,0.5,0.75,1.0", bench_out;
    std::uint64_t bench_master = 50'000'000, bench_sub = 2'000'000;
    auto* bench = app.add_subcommand("bench", "run a directory of instances over alpha values");
    bench->add_option("--dir", bench_dir, "directory of instance JSON files")->required();
    bench->add_option("--alphas", bench_alphas, "comma-separated alpha list");
    bench->add_option("--master-budget", bench_master, "master node budget");
    bench->add_option("--sub-budget", bench_sub, "subproblem node budget");
    bench->add_option("--out", bench_out, "CSV output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return cmd_solve(solve_args);
        if (exp->parsed())
            return cmd_export(export_instance, export_kind, export_alpha, export_out);
        if (gen->parsed())
            return cmd_generate(gen_bases, gen_tariff, gen_density, gen_gamma, gen_seed, gen_name,
                                gen_out);
        if (val->parsed()) return cmd_validate(val_instance, val_solution);
        if (bench->parsed())
            return cmd_bench(bench_dir, bench_alphas, bench_master, bench_sub, bench_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitParse;
    } catch (const esched::io::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const esched::lbbd::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return 0;
}
