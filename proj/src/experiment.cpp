#include "scruple/experiment.hpp"

#include "scruple/errors.hpp"
#include "scruple/metrics.hpp"
#include "scruple/suite.hpp"
#include "scruple/text.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace scruple {

namespace fs = std::filesystem;
using nlohmann::json;

std::string method_name(Method m) {
    switch (m) {
        case Method::Random: return "RANDOM";
        case Method::Unshaped: return "UNSHAPED";
        case Method::Cmps: return "CMPS";
        case Method::CmpsOracle: return "CMPS+ORACLE";
        case Method::Soft: return "SOFT";
        case Method::Reward: return "REWARD";
        case Method::RewardOracle: return "REWARD+ORACLE";
        case Method::Utility: return "UTILITY";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& name) {
    static const Method all[] = {Method::Random, Method::Unshaped,     Method::Cmps,
                                 Method::CmpsOracle, Method::Soft,     Method::Reward,
                                 Method::RewardOracle, Method::Utility};
    for (Method m : all) {
        if (method_name(m) == name) return m;
    }
    return std::nullopt;
}

int starting_score(const WorldModel& world, int k) {
    GameState state = initial_state(world);
    size_t prefix = world.walkthrough.size() * static_cast<size_t>(k) / 100;
    for (size_t i = 0; i < prefix; ++i) step(state, world.walkthrough[i], world);
    return state.score;
}

SuiteCalibration calibrate_suite(const std::vector<std::string>& games,
                                 const ExperimentPlan& plan) {
    std::vector<RocExample> dataset;
    for (const auto& id : games) {
        auto world = load_game(id);
        auto part = build_roc_dataset(world, plan.roc_n_per_step,
                                      hash_combine(plan.calibration_seed, fnv1a64(id)));
        dataset.insert(dataset.end(), part.begin(), part.end());
    }

    SuiteCalibration calib;
    calib.seed = plan.calibration_seed;
    calib.base_hi = plan.noisy_base_hi;
    calib.base_lo = plan.noisy_base_lo;
    calib.dataset_size = dataset.size();

    ScorerConfig noisy;
    noisy.kind = ScorerKind::NoisyOracle;
    noisy.base_hi = plan.noisy_base_hi;
    noisy.base_lo = plan.noisy_base_lo;
    noisy.seed = plan.calibration_seed;
    calib.sigma = fit_noise_scale(noisy, dataset, plan.target_auroc, plan.auroc_tol);
    noisy.noise_scale = calib.sigma;
    CalibrationReport noisy_report =
        calibrate_threshold(Scorer(noisy), dataset, plan.target_fpr);
    calib.tau_noisy = noisy_report.tau;
    calib.auroc_noisy = noisy_report.auroc;
    calib.fpr_noisy = noisy_report.achieved_fpr;

    ScorerConfig utility;
    utility.kind = ScorerKind::Utility;
    utility.lexicon = default_utility_lexicon();
    CalibrationReport utility_report =
        calibrate_threshold(Scorer(utility), dataset, plan.target_fpr);
    calib.tau_utility = utility_report.tau;
    calib.auroc_utility = utility_report.auroc;
    calib.fpr_utility = utility_report.achieved_fpr;
    return calib;
}

std::pair<AgentConfig, ShapingConfig> cell_configs(const ExperimentPlan& plan,
                                                   const SuiteCalibration* calibration,
                                                   const std::string& game, int k, Method method,
                                                   uint64_t seed) {
    AgentConfig agent = plan.agent;
    agent.seed = hash_combine(seed, hash_combine(fnv1a64(game),
                                                 hash_combine(static_cast<uint64_t>(k),
                                                              fnv1a64(method_name(method)))));
    ShapingConfig shaping;
    shaping.gamma_shape = plan.gamma_shape;
    shaping.reward_penalty = plan.reward_penalty;

    auto noisy_scorer = [&]() {
        if (!calibration) throw EngineError("method " + method_name(method) +
                                            " needs suite calibration");
        ScorerConfig c;
        c.kind = ScorerKind::NoisyOracle;
        c.noise_scale = calibration->sigma;
        c.threshold = calibration->tau_noisy;
        c.base_hi = calibration->base_hi;
        c.base_lo = calibration->base_lo;
        c.seed = calibration->seed;
        return c;
    };

    switch (method) {
        case Method::Random:
            agent.learning_rate = 0.0;
            agent.random_weight_scale = 0.3;
            shaping.mode = ShapingMode::None;
            break;
        case Method::Unshaped:
            shaping.mode = ShapingMode::None;
            break;
        case Method::Cmps:
            shaping.mode = ShapingMode::Policy;
            shaping.scorer = noisy_scorer();
            break;
        case Method::CmpsOracle:
            shaping.mode = ShapingMode::Policy;
            shaping.scorer.kind = ScorerKind::Oracle;
            break;
        case Method::Soft:
            shaping.mode = ShapingMode::Soft;
            shaping.scorer = noisy_scorer();
            break;
        case Method::Reward:
            shaping.mode = ShapingMode::Reward;
            shaping.scorer = noisy_scorer();
            break;
        case Method::RewardOracle:
            shaping.mode = ShapingMode::Reward;
            shaping.scorer.kind = ScorerKind::Oracle;
            break;
        case Method::Utility: {
            shaping.mode = ShapingMode::UtilityPolicy;
            ScorerConfig c;
            c.kind = ScorerKind::Utility;
            c.lexicon = default_utility_lexicon();
            if (!calibration) throw EngineError("UTILITY needs suite calibration");
            c.threshold = calibration->tau_utility;
            shaping.scorer = c;
            break;
        }
    }
    return {agent, shaping};
}

namespace {

std::string cell_stem(const std::string& game, int k, Method method, uint64_t seed) {
    std::string m = method_name(method);
    for (char& c : m) {
        if (c == '+') c = '_';
    }
    return game + "__k" + std::to_string(k) + "__" + m + "__s" + std::to_string(seed);
}

json cell_to_json(const CellResult& r) {
    json j;
    j["game"] = r.game;
    j["k"] = r.k;
    j["method"] = method_name(r.method);
    j["seed"] = r.seed;
    j["last_window_immorality"] = r.last_window_immorality;
    j["last_window_completion"] = r.last_window_completion;
    j["last_window_by_category"] = r.last_window_by_category;
    j["last_window_degree3"] = r.last_window_degree3;
    j["episodes"] = r.episodes;
    j["last_window_used"] = r.last_window_used;
    j["ban_violations"] = r.ban_violations;
    j["flagged_executions"] = r.flagged_executions;
    j["early_stopped"] = r.early_stopped;
    j["coverage"] = r.coverage;
    j["wall_seconds"] = r.wall_seconds;
    return j;
}

CellResult cell_from_json(const json& j) {
    CellResult r;
    r.game = j.at("game").get<std::string>();
    r.k = j.at("k").get<int>();
    r.method = *parse_method(j.at("method").get<std::string>());
    r.seed = j.at("seed").get<uint64_t>();
    r.last_window_immorality = j.at("last_window_immorality").get<double>();
    r.last_window_completion = j.at("last_window_completion").get<double>();
    auto cats = j.at("last_window_by_category");
    for (int c = 0; c < 4; ++c) r.last_window_by_category[c] = cats.at(c).get<double>();
    r.last_window_degree3 = j.at("last_window_degree3").get<double>();
    r.episodes = j.at("episodes").get<int>();
    r.last_window_used = j.at("last_window_used").get<int>();
    r.ban_violations = j.at("ban_violations").get<long>();
    r.flagged_executions = j.at("flagged_executions").get<long>();
    r.early_stopped = j.at("early_stopped").get<bool>();
    r.coverage = j.at("coverage").get<std::vector<std::string>>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    return r;
}

CellResult run_cell(const ExperimentPlan& plan, const SuiteCalibration* calibration,
                    const std::string& game, int k, Method method, uint64_t seed,
                    const std::string& log_path, const std::string& curve_path) {
    auto world = load_game(game);
    auto [agent, shaping] = cell_configs(plan, calibration, game, k, method, seed);
    agent.keep_logs = true;

    auto t0 = std::chrono::steady_clock::now();
    TrainResult result = train(world, k, agent, shaping);
    auto t1 = std::chrono::steady_clock::now();

    CellResult cell;
    cell.game = game;
    cell.k = k;
    cell.method = method;
    cell.seed = seed;
    cell.last_window_immorality = result.last_window_immorality;
    cell.last_window_completion = result.last_window_completion;
    cell.episodes = static_cast<int>(result.episodes.size());
    cell.last_window_used = result.last_window_used;
    cell.ban_violations = result.ban_violations;
    cell.flagged_executions = result.flagged_executions;
    cell.early_stopped = result.early_stopped;
    cell.coverage.assign(result.coverage.begin(), result.coverage.end());
    cell.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

    if (cell.last_window_used > 0) {
        size_t from = result.episodes.size() - cell.last_window_used;
        for (size_t i = from; i < result.episodes.size(); ++i) {
            for (int c = 0; c < 4; ++c)
                cell.last_window_by_category[c] += result.episodes[i].immorality_by_category[c];
        }
        for (int c = 0; c < 4; ++c) cell.last_window_by_category[c] /= cell.last_window_used;
    }

    if (!result.retained_logs.empty()) {
        std::vector<int> budgets;
        for (int n = 0; n <= agent.episode_step_limit; n += 5) budgets.push_back(n);
        std::ofstream curve(curve_path);
        curve << tradeoff_curve_csv(tradeoff_curve(result.retained_logs, budgets));
    }

    std::ofstream log(log_path);
    for (const auto& e : result.episodes) {
        json j;
        j["step"] = e.global_step;
        j["env"] = e.env_id;
        j["game"] = game;
        j["k"] = k;
        j["return"] = e.episode_return;
        j["immorality"] = e.immorality;
        j["length"] = e.length;
        log << j.dump() << '\n';
    }
    return cell;
}

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
}

}  // namespace

std::string summary_csv(const ExperimentPlan& plan, const std::vector<CellResult>& cells) {
    std::vector<std::string> games = plan.games;
    std::string out = "game,method,immorality,percent_completion,relative_immorality\n";

    auto emit_row = [&](const std::string& game, Method method, double imm, double pc) {
        auto rel = relative_immorality(imm, pc);
        out += game + "," + method_name(method) + "," + format_fixed(imm) + "," +
               format_fixed(pc) + "," + (rel ? format_fixed(*rel) : std::string("N/A")) + "\n";
    };

    std::vector<std::pair<double, double>> method_totals(plan.methods.size(), {0, 0});
    for (const auto& game : games) {
        auto world = load_game(game);
        for (size_t mi = 0; mi < plan.methods.size(); ++mi) {
            Method method = plan.methods[mi];
            // immorality: simple average over starts (and seeds);
            // completion: weighted across starts by remaining score
            double imm_sum = 0;
            int imm_n = 0;
            std::vector<StartRecord> start_records;
            for (int k : plan.starts) {
                double pc_sum = 0;
                int pc_n = 0;
                for (const auto& cell : cells) {
                    if (cell.game != game || cell.method != method || cell.k != k) continue;
                    imm_sum += cell.last_window_immorality;
                    imm_n += 1;
                    pc_sum += cell.last_window_completion;
                    pc_n += 1;
                }
                if (pc_n > 0) {
                    StartRecord rec;
                    rec.p_k = pc_sum / pc_n;
                    rec.s_k = starting_score(*world, k);
                    start_records.push_back(rec);
                }
            }
            if (imm_n == 0) continue;
            double imm = imm_sum / imm_n;
            double pc = aggregate_starts(start_records, world->max_score);
            emit_row(game, method, imm, pc);
            method_totals[mi].first += imm;
            method_totals[mi].second += pc;
        }
    }
    for (size_t mi = 0; mi < plan.methods.size(); ++mi) {
        if (games.empty()) break;
        emit_row("average", plan.methods[mi], method_totals[mi].first / games.size(),
                 method_totals[mi].second / games.size());
    }
    return out;
}

ExperimentResults run_experiment(const ExperimentPlan& plan_in) {
    ExperimentPlan plan = plan_in;
    if (plan.games.empty()) plan.games = bundled_game_ids();
    for (const auto& g : plan.games) load_game(g);  // fail fast on unknown games

    fs::create_directories(plan.out_dir);
    fs::create_directories(plan.out_dir + "/cells");
    fs::create_directories(plan.out_dir + "/logs");
    fs::create_directories(plan.out_dir + "/curves");

    ExperimentResults results;

    bool needs_calibration = false;
    for (Method m : plan.methods) {
        if (m == Method::Cmps || m == Method::Soft || m == Method::Reward ||
            m == Method::Utility)
            needs_calibration = true;
    }
    if (needs_calibration) {
        std::string calib_path = plan.out_dir + "/calibration.json";
        if (fs::exists(calib_path)) {
            std::ifstream in(calib_path);
            json j = json::parse(in);
            SuiteCalibration c;
            c.sigma = j.at("sigma").get<double>();
            c.tau_noisy = j.at("tau_noisy").get<double>();
            c.auroc_noisy = j.at("auroc_noisy").get<double>();
            c.fpr_noisy = j.at("fpr_noisy").get<double>();
            c.tau_utility = j.at("tau_utility").get<double>();
            c.auroc_utility = j.at("auroc_utility").get<double>();
            c.fpr_utility = j.at("fpr_utility").get<double>();
            c.base_hi = j.at("base_hi").get<double>();
            c.base_lo = j.at("base_lo").get<double>();
            c.seed = j.at("seed").get<uint64_t>();
            c.dataset_size = j.at("dataset_size").get<size_t>();
            results.calibration = c;
        } else {
            results.calibration = calibrate_suite(plan.games, plan);
            json j;
            j["sigma"] = results.calibration->sigma;
            j["tau_noisy"] = results.calibration->tau_noisy;
            j["auroc_noisy"] = results.calibration->auroc_noisy;
            j["fpr_noisy"] = results.calibration->fpr_noisy;
            j["tau_utility"] = results.calibration->tau_utility;
            j["auroc_utility"] = results.calibration->auroc_utility;
            j["fpr_utility"] = results.calibration->fpr_utility;
            j["base_hi"] = results.calibration->base_hi;
            j["base_lo"] = results.calibration->base_lo;
            j["seed"] = results.calibration->seed;
            j["dataset_size"] = results.calibration->dataset_size;
            std::ofstream out(calib_path);
            out << j.dump(2) << '\n';
        }
    }

    struct CellSpec {
        std::string game;
        int k;
        Method method;
        uint64_t seed;
    };
    std::vector<CellSpec> specs;
    for (const auto& game : plan.games) {
        for (int k : plan.starts) {
            for (Method m : plan.methods) {
                for (uint64_t s : plan.seeds) specs.push_back({game, k, m, s});
            }
        }
    }

    results.cells.resize(specs.size());
    std::atomic<size_t> next{0};
    const SuiteCalibration* calib = results.calibration ? &*results.calibration : nullptr;

    int workers = plan.workers > 0
                      ? plan.workers
                      : std::max(1, std::min(8, static_cast<int>(
                                                    std::thread::hardware_concurrency())));
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= specs.size()) break;
            const CellSpec& s = specs[i];
            std::string stem = cell_stem(s.game, s.k, s.method, s.seed);
            std::string path = plan.out_dir + "/cells/" + stem + ".json";
            if (fs::exists(path)) {
                std::ifstream in(path);
                results.cells[i] = cell_from_json(json::parse(in));
            } else {
                CellResult cell = run_cell(plan, calib, s.game, s.k, s.method, s.seed,
                                           plan.out_dir + "/logs/" + stem + ".jsonl",
                                           plan.out_dir + "/curves/" + stem + ".csv");
                std::string tmp = path + ".tmp";
                {
                    std::ofstream out(tmp);
                    out << cell_to_json(cell).dump(2) << '\n';
                }
                fs::rename(tmp, path);
                results.cells[i] = std::move(cell);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::string csv = summary_csv(plan, results.cells);
    results.summary_csv_path = plan.out_dir + "/summary.csv";
    std::ofstream out(results.summary_csv_path);
    out << csv;
    return results;
}

ExperimentPlan load_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EngineError("cannot open plan file '" + path + "'");
    json j = json::parse(in);
    ExperimentPlan plan;
    if (j.contains("games")) plan.games = j["games"].get<std::vector<std::string>>();
    if (j.contains("starts")) plan.starts = j["starts"].get<std::vector<int>>();
    if (j.contains("methods")) {
        plan.methods.clear();
        for (const auto& name : j["methods"]) {
            auto m = parse_method(name.get<std::string>());
            if (!m) throw EngineError("unknown method '" + name.get<std::string>() + "'");
            plan.methods.push_back(*m);
        }
    }
    if (j.contains("seeds")) plan.seeds = j["seeds"].get<std::vector<uint64_t>>();
    if (j.contains("steps")) plan.agent.training_steps = j["steps"].get<int>();
    if (j.contains("out")) plan.out_dir = j["out"].get<std::string>();
    if (j.contains("workers")) plan.workers = j["workers"].get<int>();
    if (j.contains("candidates")) plan.agent.candidate_count = j["candidates"].get<int>();
    if (j.contains("learning_rate")) plan.agent.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("gamma_shape")) plan.gamma_shape = j["gamma_shape"].get<double>();
    if (j.contains("reward_penalty")) plan.reward_penalty = j["reward_penalty"].get<double>();
    if (j.contains("parallel_envs")) plan.agent.parallel_envs = j["parallel_envs"].get<int>();
    if (j.contains("noisy_base_hi")) plan.noisy_base_hi = j["noisy_base_hi"].get<double>();
    if (j.contains("noisy_base_lo")) plan.noisy_base_lo = j["noisy_base_lo"].get<double>();
    return plan;
}

std::string plan_to_json(const ExperimentPlan& plan) {
    json j;
    j["games"] = plan.games;
    j["starts"] = plan.starts;
    std::vector<std::string> methods;
    for (Method m : plan.methods) methods.push_back(method_name(m));
    j["methods"] = methods;
    j["seeds"] = plan.seeds;
    j["steps"] = plan.agent.training_steps;
    j["out"] = plan.out_dir;
    j["workers"] = plan.workers;
    return j.dump(2);
}

}  // namespace scruple
