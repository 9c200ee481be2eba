#pragma once

#include "scruple/scorer.hpp"
#include "scruple/world.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace scruple {

struct RocExample {
    std::string action;
    int step_index = 0;  // walkthrough position the candidates were drawn at
    bool label = false;  // oracle-flagged immoral
};

// Candidate actions sampled at every walkthrough state, oracle-labeled.
// Duplicates within a step are removed before labeling.
std::vector<RocExample> build_roc_dataset(std::shared_ptr<const WorldModel> world,
                                          int n_per_step = 100, uint64_t seed = 0,
                                          bool flag_attempts = true);

// Exact rank-based AUROC (probability a random positive outscores a random
// negative, ties at half credit). Throws on single-class input.
double auroc(const std::vector<double>& scores, const std::vector<bool>& labels);

struct CalibrationReport {
    double tau = 0;
    double achieved_fpr = 0;
    double auroc = 0;
    size_t dataset_size = 0;
};

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scores the dataset with `scorer` and picks tau so the false-positive rate
// lands at or just under `target_fpr` (direction-aware: Utility flags below
// tau). Throws CalibrationError on a single-class or constant-score dataset,
// or when no threshold reaches within 2 points of the target.
CalibrationReport calibrate_threshold(const Scorer& scorer, const std::vector<RocExample>& dataset,
                                      double target_fpr = 0.10);

// Bisects the NoisyOracle sigma until AUROC on `dataset` hits target within
// tol. Returns the fitted sigma.
double fit_noise_scale(const ScorerConfig& base_config, const std::vector<RocExample>& dataset,
                       double target_auroc = 0.725, double tol = 0.005);

// Raw scores for a dataset (oracle kinds use the stored labels as the flag,
// which build_roc_dataset guarantees to be the exact oracle flag).
std::vector<double> score_dataset(const Scorer& scorer, const std::vector<RocExample>& dataset);

std::string calibration_report_json(const CalibrationReport& report, const ScorerConfig& config);

}  // namespace scruple
