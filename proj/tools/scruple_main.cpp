#include "scruple/agent.hpp"
#include "scruple/errors.hpp"
#include "scruple/experiment.hpp"
#include "scruple/generator.hpp"
#include "scruple/metrics.hpp"
#include "scruple/roc.hpp"
#include "scruple/script.hpp"
#include "scruple/suite.hpp"
#include "scruple/text.hpp"
#include "scruple/validate.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace scruple;

std::string degrees_str(const MoralAnnotation& a) {
    std::ostringstream out;
    out << "<" << a.degrees[0] << "," << a.degrees[1] << "," << a.degrees[2] << ","
        << a.degrees[3] << ">";
    return out.str();
}

int cmd_play(const std::string& game, int start) {
    auto world = load_game(game);
    EnvConfig config;
    config.game_id = world->game_id;
    config.starting_percentage = start;
    config.step_limit = 1000000;
    Episode env(world, config);

    std::cout << "[" << world->game_id << " | score " << env.score() << " | start " << start
              << "%]\n";
    std::cout << env.observation() << "\n";
    std::string line;
    while (!env.done() && std::getline(std::cin, line)) {
        if (line == ":quit") break;
        if (line == ":score") {
            std::cout << env.score() << "\n";
            continue;
        }
        if (line == ":tree") {
            std::cout << snapshot_to_text(object_tree_snapshot(env.state(), *world));
            continue;
        }
        if (line == ":valid") {
            for (const auto& a : env.valid_actions()) std::cout << a << "\n";
            continue;
        }
        if (line.empty()) continue;
        StepResult res = env.step(line);
        std::cout << res.observation << "\n";
        std::cout << "[reward " << res.reward << " | score " << res.score << " | moves "
                  << res.moves << "]\n";
        for (const auto& a : res.annotations) {
            std::cout << "[annotation " << degrees_str(a) << " \"" << a.description << "\""
                      << (a.attempt ? " (attempt)" : "") << " rule " << a.source_rule << "]\n";
        }
    }
    if (env.done()) {
        std::cout << "*** The story is over (score " << env.score() << "/" << env.s_max()
                  << "). ***\n";
    }
    return 0;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"morality-annotated text-adventure suite"};
    app.require_subcommand(1);

    // play
    auto* play = app.add_subcommand("play", "interactive episode with a debug banner");
    std::string play_game;
    int play_start = 0;
    play->add_option("game", play_game, "bundled game id or script path")->required();
    play->add_option("--start", play_start, "starting percentage (0,20,40,60,80)");

    // validate
    auto* validate = app.add_subcommand("validate", "parse and validate game scripts");
    std::vector<std::string> validate_games;
    validate->add_option("games", validate_games, "game ids or script paths")->required();

    // export-map
    auto* expmap = app.add_subcommand("export-map", "emit the room graph as DOT");
    std::string map_game, map_out;
    expmap->add_option("game", map_game)->required();
    expmap->add_option("--out", map_out, "output file (default stdout)");

    // generate
    auto* gen = app.add_subcommand("generate", "emit a procedurally generated game script");
    GenParams gen_params;
    std::string gen_out;
    gen->add_option("--seed", gen_params.seed);
    gen->add_option("--rooms", gen_params.rooms);
    gen->add_option("--objects", gen_params.objects);
    gen->add_option("--annotated", gen_params.annotated_rules);
    gen->add_option("--walkthrough", gen_params.walkthrough_length);
    gen->add_option("--id", gen_params.game_id);
    gen->add_option("--out", gen_out, "output file (default stdout)");

    // audit
    auto* audit = app.add_subcommand("audit", "reward-bias audit over walkthroughs");
    std::string audit_games;
    audit->add_option("--games", audit_games, "comma-separated ids (default: all bundled)");

    // eval-scorer
    auto* eval = app.add_subcommand("eval-scorer", "ROC dataset, AUROC, threshold calibration");
    std::string eval_games, eval_kind = "NOISY_ORACLE", eval_lexicon;
    double eval_sigma = -1.0, eval_auroc = 0.725, eval_fpr = 0.10;
    double eval_base_hi = 0.7, eval_base_lo = 0.3;
    int eval_n = 100;
    uint64_t eval_seed = 9001;
    eval->add_option("--games", eval_games, "comma-separated ids (default: all bundled)");
    eval->add_option("--scorer", eval_kind, "ORACLE | NOISY_ORACLE | LEXICON | UTILITY");
    eval->add_option("--sigma", eval_sigma, "noise scale; < 0 fits to --target-auroc");
    eval->add_option("--target-auroc", eval_auroc);
    eval->add_option("--fpr", eval_fpr);
    eval->add_option("--base-hi", eval_base_hi);
    eval->add_option("--base-lo", eval_base_lo);
    eval->add_option("--n-per-step", eval_n);
    eval->add_option("--seed", eval_seed);
    eval->add_option("--lexicon", eval_lexicon, "lexicon file (word weight per line)");

    // run
    auto* run = app.add_subcommand("run", "run an experiment plan");
    std::string run_plan, run_games, run_starts, run_methods, run_out;
    int run_steps = -1, run_workers = -1;
    long run_seed = -1;
    run->add_option("--plan", run_plan, "plan file (JSON); flags override");
    run->add_option("--games", run_games, "comma-separated ids");
    run->add_option("--starts", run_starts, "comma-separated starting percentages");
    run->add_option("--methods", run_methods, "comma-separated methods");
    run->add_option("--seed", run_seed, "master seed");
    run->add_option("--steps", run_steps, "training steps per cell");
    run->add_option("--out", run_out, "output directory");
    run->add_option("--workers", run_workers, "worker threads (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*play) return cmd_play(play_game, play_start);

        if (*validate) {
            bool all_ok = true;
            for (const auto& g : validate_games) {
                DiagnosticList diags;
                try {
                    auto world = load_game(g);
                    diags = validate_world(*world);
                } catch (const EngineError& e) {
                    std::cout << g << ": " << e.what() << "\n";
                    all_ok = false;
                    continue;
                }
                if (diags.empty()) {
                    std::cout << g << ": ok\n";
                } else {
                    std::cout << g << ":\n" << format_diagnostics(diags);
                    all_ok = false;
                }
            }
            return all_ok ? 0 : 1;
        }

        if (*expmap) {
            auto world = load_game(map_game);
            std::string dot = export_map(*world);
            if (map_out.empty()) {
                std::cout << dot;
            } else {
                std::ofstream out(map_out);
                out << dot;
            }
            return 0;
        }

        if (*gen) {
            std::string script = generate_game(gen_params);
            if (gen_out.empty()) {
                std::cout << script;
            } else {
                std::ofstream out(gen_out);
                out << script;
            }
            return 0;
        }

        if (*audit) {
            auto ids = audit_games.empty() ? bundled_game_ids() : split_csv(audit_games);
            BiasAuditCounts total;
            for (const auto& id : ids) {
                auto world = load_game(id);
                BiasAuditCounts c = reward_bias_counts(*world);
                total.rewarded_steps += c.rewarded_steps;
                total.rewarded_immoral_steps += c.rewarded_immoral_steps;
                std::cout << id << ": " << c.rewarded_immoral_steps << "/" << c.rewarded_steps
                          << " rewarded actions are immoral (" << reward_bias_audit(*world)
                          << ")\n";
            }
            if (total.rewarded_steps > 0) {
                std::cout << "suite: " << total.rewarded_immoral_steps << "/"
                          << total.rewarded_steps << " ("
                          << static_cast<double>(total.rewarded_immoral_steps) /
                                 total.rewarded_steps
                          << ")\n";
            }
            return 0;
        }

        if (*eval) {
            auto ids = eval_games.empty() ? bundled_game_ids() : split_csv(eval_games);
            std::vector<RocExample> dataset;
            for (const auto& id : ids) {
                auto world = load_game(id);
                auto part = build_roc_dataset(world, eval_n, hash_combine(eval_seed, fnv1a64(id)));
                dataset.insert(dataset.end(), part.begin(), part.end());
            }
            size_t positives = 0;
            for (const auto& ex : dataset) positives += ex.label ? 1 : 0;
            std::cout << "dataset: " << dataset.size() << " examples, " << positives
                      << " positive\n";

            ScorerConfig config;
            if (eval_kind == "ORACLE") config.kind = ScorerKind::Oracle;
            else if (eval_kind == "NOISY_ORACLE") config.kind = ScorerKind::NoisyOracle;
            else if (eval_kind == "LEXICON") config.kind = ScorerKind::Lexicon;
            else if (eval_kind == "UTILITY") config.kind = ScorerKind::Utility;
            else throw EngineError("unknown scorer '" + eval_kind + "'");
            config.seed = eval_seed;
            config.base_hi = eval_base_hi;
            config.base_lo = eval_base_lo;
            if (!eval_lexicon.empty()) {
                std::ifstream in(eval_lexicon);
                if (!in) throw EngineError("cannot open lexicon '" + eval_lexicon + "'");
                config.lexicon = parse_lexicon(in);
            } else if (config.kind == ScorerKind::Lexicon) {
                config.lexicon = default_harm_lexicon();
            } else if (config.kind == ScorerKind::Utility) {
                config.lexicon = default_utility_lexicon();
            }
            if (config.kind == ScorerKind::NoisyOracle) {
                config.noise_scale =
                    eval_sigma >= 0 ? eval_sigma
                                    : fit_noise_scale(config, dataset, eval_auroc, 0.005);
                std::cout << "sigma: " << config.noise_scale << "\n";
            }
            CalibrationReport report = calibrate_threshold(Scorer(config), dataset, eval_fpr);
            std::cout << calibration_report_json(report, config) << "\n";
            return 0;
        }

        if (*run) {
            ExperimentPlan plan;
            if (!run_plan.empty()) plan = load_plan_file(run_plan);
            if (!run_games.empty()) plan.games = split_csv(run_games);
            if (!run_starts.empty()) {
                plan.starts.clear();
                for (const auto& s : split_csv(run_starts)) plan.starts.push_back(std::stoi(s));
            }
            if (!run_methods.empty()) {
                plan.methods.clear();
                for (const auto& m : split_csv(run_methods)) {
                    auto method = parse_method(m);
                    if (!method) throw EngineError("unknown method '" + m + "'");
                    plan.methods.push_back(*method);
                }
            }
            if (run_seed >= 0) plan.seeds = {static_cast<uint64_t>(run_seed)};
            if (run_steps > 0) plan.agent.training_steps = run_steps;
            if (!run_out.empty()) plan.out_dir = run_out;
            if (run_workers >= 0) plan.workers = run_workers;

            ExperimentResults results = run_experiment(plan);
            std::cout << "cells: " << results.cells.size() << "\n";
            std::cout << "summary: " << results.summary_csv_path << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
