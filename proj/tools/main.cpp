// Command-line front end: solve an instance with the two-stage GA (logging
// every soft-stage evaluation as a training example), train surrogate models
// over a logged dataset with the per-batch protocol, and merge report files
// into an aligned table.
//
// Exit codes: 0 success, 1 input error, 2 best-effort infeasible result,
// 64 usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "uctt/dataset.hpp"
#include "uctt/ga.hpp"
#include "uctt/instance.hpp"
#include "uctt/manifest.hpp"
#include "uctt/metrics.hpp"
#include "uctt/surrogate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUsage = 64;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

struct SolveOptions {
    std::string instance_path;
    std::string out_solution;
    std::string out_dataset;
    std::string out_trace;
    std::optional<uint64_t> seed;
    uctt::GaConfig ga;
};

int run_solve(const SolveOptions& opt) {
    uctt::RunManifest manifest;
    manifest.command = "solve";
    manifest.started_at = uctt::utc_timestamp();

    uctt::GaConfig cfg = opt.ga;
    cfg.rng_seed = opt.seed ? *opt.seed : std::random_device{}();

    std::string text;
    try {
        text = read_text_file(opt.instance_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }

    std::optional<uctt::Instance> parsed;
    try {
        parsed = uctt::parse_instance(text);
    } catch (const uctt::parse_error& e) {
        std::cerr << "error: " << opt.instance_path << ": " << e.what() << '\n';
        return kExitInputError;
    }
    const uctt::Instance& inst = *parsed;

    try {
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    uctt::DatasetLog log(inst.name(), inst.num_events());
    const auto sink = [&log](const std::vector<int>& genes, long long fitness, bool feasible) {
        log.record(genes, fitness, feasible);
    };

    uctt::SolveResult result;
    try {
        result = uctt::solve(inst, cfg, sink);
        uctt::save_dataset(opt.out_dataset, log);
        write_text_file(opt.out_solution, uctt::solution_to_text(inst, result.timetable));
        std::ostringstream trace;
        result.trace.write_csv(trace);
        write_text_file(opt.out_trace, trace.str());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }

    manifest.input_path = opt.instance_path;
    manifest.seed = cfg.rng_seed;
    manifest.config = {{"population", cfg.population_size},
                       {"lambda", cfg.offspring_count},
                       {"cxpb", cfg.crossover_probability},
                       {"mutpb", cfg.mutation_probability},
                       {"tournament", cfg.tournament_size},
                       {"switch_stagnant", cfg.non_improving_switch},
                       {"stop_stagnant", cfg.stop_non_improving},
                       {"max_evals", cfg.max_evaluations},
                       {"threads", cfg.threads}};
    if (cfg.target_fitness) manifest.config["target"] = *cfg.target_fitness;
    manifest.outputs = {{opt.out_solution, uctt::crc32_of_file(opt.out_solution)},
                        {opt.out_dataset, uctt::crc32_of_file(opt.out_dataset)},
                        {opt.out_trace, uctt::crc32_of_file(opt.out_trace)}};
    manifest.finished_at = uctt::utc_timestamp();
    uctt::write_manifest(opt.out_solution + ".manifest.json", manifest);

    std::cout << "instance " << inst.name() << ": " << (result.feasible ? "feasible" : "infeasible")
              << ", fitness " << result.soft_fitness << ", evaluations " << result.evaluations
              << " (stage 1: " << result.stage1_evaluations << "), examples " << log.size() << '\n';
    return result.feasible ? kExitOk : kExitInfeasible;
}

struct TrainOptions {
    std::string dataset_path;
    std::string task = "regression";
    std::string mode = "traditional";
    std::string out_model;
    std::string out_report;
    size_t batch_size = 10000;
    double split = 0.7;
    uctt::Hyperparameters hyper;
};

int run_train(const TrainOptions& opt) {
    uctt::RunManifest manifest;
    manifest.command = "train";
    manifest.started_at = uctt::utc_timestamp();

    uctt::DatasetLog log;
    try {
        log = uctt::load_dataset(opt.dataset_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << opt.dataset_path << ": " << e.what() << '\n';
        return kExitInputError;
    }

    const uctt::Task task =
        opt.task == "regression" ? uctt::Task::Regression : uctt::Task::Classification;
    const uctt::LearningMode mode = opt.mode == "traditional" ? uctt::LearningMode::Traditional
                                                              : uctt::LearningMode::Incremental;
    uctt::ProtocolResult result;
    try {
        result = uctt::batch_protocol(log, mode, task, opt.hyper, opt.batch_size, opt.split);
        if (result.report.single_block_warning)
            std::cerr << "warning: dataset smaller than one batch, scored as a single block\n";
        uctt::save_model(opt.out_model, result.final_model);
        uctt::save_report(opt.out_report, result.report);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }

    manifest.input_path = opt.dataset_path;
    manifest.seed = opt.hyper.seed;
    manifest.config = {{"task", opt.task},
                       {"mode", opt.mode},
                       {"batch_size", opt.batch_size},
                       {"split", opt.split},
                       {"eta0", opt.hyper.eta0},
                       {"alpha", opt.hyper.alpha},
                       {"epochs", opt.hyper.epochs},
                       {"epsilon", opt.hyper.epsilon}};
    manifest.outputs = {{opt.out_model, uctt::crc32_of_file(opt.out_model)},
                        {opt.out_report, uctt::crc32_of_file(opt.out_report)}};
    manifest.finished_at = uctt::utc_timestamp();
    uctt::write_manifest(opt.out_model + ".manifest.json", manifest);

    std::cout << "dataset " << result.report.dataset << ": " << result.report.rows.size()
              << " batches, mean score " << result.report.mean_score() << '\n';
    return kExitOk;
}

int run_report(const std::vector<std::string>& paths) {
    std::vector<uctt::BatchReport> reports;
    for (const std::string& path : paths) {
        try {
            reports.push_back(uctt::load_report(path));
        } catch (const std::exception& e) {
            std::cerr << "error: " << path << ": " << e.what() << '\n';
            return kExitInputError;
        }
    }
    try {
        std::cout << uctt::render_report_table(reports);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curriculum-based course timetabling: two-stage GA solver with "
                 "surrogate-model training over the logged evaluations"};
    app.require_subcommand(1);
    // TOML-style config file; keys live in [solve] / [train] sections and
    // sit between built-in defaults and command-line flags.
    app.set_config("--config", "", "TOML config file with [solve] / [train] sections");

    SolveOptions solve_opt;
    uint64_t seed_value = 0;
    CLI::App* solve = app.add_subcommand("solve", "solve an instance and log a dataset");
    solve->fallthrough();
    solve->add_option("--instance", solve_opt.instance_path, "ITC-2007 .ctt instance")->required();
    CLI::Option* seed_opt = solve->add_option("--seed", seed_value, "RNG seed (auto if omitted)");
    solve->add_option("--population", solve_opt.ga.population_size, "population size");
    solve->add_option("--lambda", solve_opt.ga.offspring_count, "offspring per generation");
    solve->add_option("--cxpb", solve_opt.ga.crossover_probability, "crossover probability");
    solve->add_option("--mutpb", solve_opt.ga.mutation_probability, "mutation probability");
    solve->add_option("--tournament", solve_opt.ga.tournament_size, "tournament size");
    solve->add_option("--max-evals", solve_opt.ga.max_evaluations, "total evaluation budget");
    long long target_value = 0;
    CLI::Option* target_opt =
        solve->add_option("--target", target_value, "stop once this soft fitness is reached");
    solve->add_option("--stop-stagnant", solve_opt.ga.stop_non_improving,
                      "stop after this many non-improving generations");
    solve->add_option("--switch-stagnant", solve_opt.ga.non_improving_switch,
                      "soft stage: toggle simple/chain moves after this many stagnant generations");
    solve->add_option("--threads", solve_opt.ga.threads, "evaluation threads (1 = serial)")
        ->envname("TT_THREADS");
    solve->add_option("--out-solution", solve_opt.out_solution, "solution file")->required();
    solve->add_option("--out-dataset", solve_opt.out_dataset, "dataset CSV")->required();
    solve->add_option("--out-trace", solve_opt.out_trace, "evolution trace CSV")->required();

    TrainOptions train_opt;
    CLI::App* train = app.add_subcommand("train", "train a surrogate model over a dataset");
    train->fallthrough();
    train->add_option("--dataset", train_opt.dataset_path, "dataset CSV (plain or .gz)")->required();
    train->add_option("--task", train_opt.task, "regression | classification")
        ->check(CLI::IsMember({"regression", "classification"}));
    train->add_option("--mode", train_opt.mode, "traditional | incremental")
        ->check(CLI::IsMember({"traditional", "incremental"}));
    train->add_option("--batch-size", train_opt.batch_size, "examples per training batch");
    train->add_option("--split", train_opt.split, "train fraction of each batch")
        ->check(CLI::Range(0.000001, 0.999999));
    train->add_option("--seed", train_opt.hyper.seed, "split/shuffle seed");
    train->add_option("--eta0", train_opt.hyper.eta0, "initial SGD learning rate");
    train->add_option("--alpha", train_opt.hyper.alpha, "L2 regularization strength");
    train->add_option("--epochs", train_opt.hyper.epochs, "SGD passes per fit");
    train->add_option("--epsilon", train_opt.hyper.epsilon, "regression insensitive band");
    train->add_option("--out-model", train_opt.out_model, "model file")->required();
    train->add_option("--out-report", train_opt.out_report, "per-batch report CSV")->required();

    std::vector<std::string> report_paths;
    CLI::App* report = app.add_subcommand("report", "merge report CSVs into one table");
    report->add_option("paths", report_paths, "report files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (solve->parsed()) {
        if (*seed_opt) solve_opt.seed = seed_value;
        if (*target_opt) solve_opt.ga.target_fitness = target_value;
        return run_solve(solve_opt);
    }
    if (train->parsed()) return run_train(train_opt);
    return run_report(report_paths);
}
