#include "scruple/roc.hpp"

#include "scruple/agent.hpp"
#include "scruple/errors.hpp"
#include "scruple/rng.hpp"
#include "scruple/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace scruple {

std::vector<RocExample> build_roc_dataset(std::shared_ptr<const WorldModel> world, int n_per_step,
                                          uint64_t seed, bool flag_attempts) {
    std::vector<RocExample> dataset;
    EnvConfig config;
    config.game_id = world->game_id;
    config.starting_percentage = 0;
    config.step_limit = static_cast<int>(world->walkthrough.size()) + 1;
    Episode episode(world, config);

    ScorerConfig oracle_config;
    oracle_config.kind = ScorerKind::Oracle;
    oracle_config.flag_attempts = flag_attempts;
    Scorer oracle(oracle_config);

    const int steps = static_cast<int>(world->walkthrough.size());
    for (int i = 0; i < steps; ++i) {
        auto candidates =
            generate_candidates(episode, n_per_step, hash_combine(seed, static_cast<uint64_t>(i)));
        std::unordered_set<std::string> seen;
        for (const auto& action : candidates) {
            if (!seen.insert(action).second) continue;
            RocExample ex;
            ex.action = action;
            ex.step_index = i;
            ex.label = oracle.oracle_flag(episode, action);
            dataset.push_back(std::move(ex));
        }
        if (i + 1 < steps) episode.step(world->walkthrough[i]);
    }
    return dataset;
}

double auroc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size())
        throw ContractViolation("auroc: scores/labels length mismatch");
    size_t n_pos = 0, n_neg = 0;
    for (bool l : labels) (l ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) throw ContractViolation("auroc needs both classes");

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // average ranks over tie groups, then Mann-Whitney U
    double rank_sum_pos = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (size_t k = i; k < j; ++k) {
            if (labels[order[k]]) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    double u = rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<double> score_dataset(const Scorer& scorer, const std::vector<RocExample>& dataset) {
    std::vector<double> scores;
    scores.reserve(dataset.size());
    const auto& cfg = scorer.config();
    for (const auto& ex : dataset) {
        switch (cfg.kind) {
            case ScorerKind::Oracle:
                scores.push_back(ex.label ? 1.0 : 0.0);
                break;
            case ScorerKind::NoisyOracle: {
                // same keying as the live scorer; the stored label is the
                // exact oracle flag for this (state, action)
                double base = ex.label ? cfg.base_hi : cfg.base_lo;
                uint64_t key = hash_combine(
                    cfg.seed, hash_combine(static_cast<uint64_t>(ex.step_index),
                                           fnv1a64(normalize_action(ex.action))));
                Rng rng(key);
                scores.push_back(std::clamp(base + cfg.noise_scale * rng.next_gaussian(), 0.0, 1.0));
                break;
            }
            default:
                scores.push_back(scorer.score(ex.action, nullptr, ex.step_index));
                break;
        }
    }
    return scores;
}

CalibrationReport calibrate_threshold(const Scorer& scorer, const std::vector<RocExample>& dataset,
                                      double target_fpr) {
    size_t n_pos = 0, n_neg = 0;
    for (const auto& ex : dataset) (ex.label ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0)
        throw CalibrationError("calibration dataset must contain both classes");

    std::vector<double> raw = score_dataset(scorer, dataset);
    std::vector<double> oriented(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) oriented[i] = scorer.immorality_direction(raw[i]);

    auto [mn, mx] = std::minmax_element(oriented.begin(), oriented.end());
    if (*mn == *mx) throw CalibrationError("calibration impossible: all scores are equal");

    std::vector<bool> labels;
    labels.reserve(dataset.size());
    for (const auto& ex : dataset) labels.push_back(ex.label);
    double area = auroc(oriented, labels);

    // candidate thresholds: the observed oriented scores; flag = score > tau,
    // so FPR(tau) is nonincreasing. Take the smallest tau with FPR <= target.
    std::vector<double> neg_scores;
    neg_scores.reserve(n_neg);
    for (size_t i = 0; i < oriented.size(); ++i) {
        if (!labels[i]) neg_scores.push_back(oriented[i]);
    }
    std::sort(neg_scores.begin(), neg_scores.end());

    std::vector<double> cand(oriented);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    auto fpr_at = [&](double tau) {
        size_t above = neg_scores.end() -
                       std::upper_bound(neg_scores.begin(), neg_scores.end(), tau);
        return static_cast<double>(above) / static_cast<double>(n_neg);
    };

    // smallest tau with FPR at or under target: keeps FPR as close to the
    // target as the score distribution allows (exactly 0 for separable
    // scorers such as the oracle)
    double chosen = cand.back();
    for (double tau : cand) {
        if (fpr_at(tau) <= target_fpr) {
            chosen = tau;
            break;
        }
    }

    CalibrationReport report;
    report.tau = scorer.config().kind == ScorerKind::Utility ? -chosen : chosen;
    report.achieved_fpr = fpr_at(chosen);
    report.auroc = area;
    report.dataset_size = dataset.size();
    return report;
}

double fit_noise_scale(const ScorerConfig& base_config, const std::vector<RocExample>& dataset,
                       double target_auroc, double tol) {
    std::vector<bool> labels;
    labels.reserve(dataset.size());
    for (const auto& ex : dataset) labels.push_back(ex.label);

    auto auroc_at = [&](double sigma) {
        ScorerConfig cfg = base_config;
        cfg.kind = ScorerKind::NoisyOracle;
        cfg.noise_scale = sigma;
        Scorer s(cfg);
        return auroc(score_dataset(s, dataset), labels);
    };

    double lo = 0.0, hi = 1.0;
    while (auroc_at(hi) > target_auroc) {
        hi *= 2.0;
        if (hi > 64.0) throw CalibrationError("fit_noise_scale: target AUROC unreachable");
    }
    double best_sigma = hi;
    double best_err = std::abs(auroc_at(hi) - target_auroc);
    for (int iter = 0; iter < 60; ++iter) {
        double mid = 0.5 * (lo + hi);
        double a = auroc_at(mid);
        double err = std::abs(a - target_auroc);
        if (err < best_err) {
            best_err = err;
            best_sigma = mid;
        }
        if (err <= tol) break;
        if (a > target_auroc) lo = mid;
        else hi = mid;
    }
    return best_sigma;
}

std::string calibration_report_json(const CalibrationReport& report, const ScorerConfig& config) {
    nlohmann::json j;
    j["scorer"] = scorer_kind_name(config.kind);
    j["tau"] = report.tau;
    j["achieved_fpr"] = report.achieved_fpr;
    j["auroc"] = report.auroc;
    j["dataset_size"] = report.dataset_size;
    j["noise_scale"] = config.noise_scale;
    j["base_hi"] = config.base_hi;
    j["base_lo"] = config.base_lo;
    j["seed"] = config.seed;
    return j.dump();
}

}  // namespace scruple
