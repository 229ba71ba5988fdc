#pragma once

#include "fusebench/core_model.hpp"
#include "fusebench/metrics.hpp"
#include "fusebench/reliability.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fusebench {

enum class Strategy { Mdrr, Vote, WeightedVote, Sum, WeightedSum };

// "mdrr", "vote", "wvote", "sum", "wsum".
std::string_view strategy_name(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);

struct ScoreRange {
  double min = 0.0;
  double max = 1.0;

  friend bool operator==(const ScoreRange&, const ScoreRange&) = default;
};

struct FusionConfig {
  Strategy strategy = Strategy::Mdrr;
  Eigen::VectorXd weights;
  double lambda = 2.0;
  // Per-classifier accept thresholds feeding vote and wvote.
  Eigen::VectorXd decision_thresholds;
  // Accept threshold on the fused score of sum and wsum.
  double fused_threshold = 0.5;
  std::vector<ScoreRange> minmax;
};

// Throws InvalidConfig unless weights are positive and sum to 1 within 1e-9,
// lambda > 0, every range has min < max and all lengths equal `classifiers`.
void validate_config(const FusionConfig& config, std::size_t classifiers);

struct FusedDecision {
  Label label = Label::Imposter;
  std::vector<ReliabilityPair> ratios;  // MDRR only
  std::optional<double> gap;            // MDRR only
  bool fallback_used = false;
  std::optional<double> fused_score;    // sum and wsum only
};

// Normalized inverse training EER. Throws ZeroEer if an EER is 0 and
// std::invalid_argument if one lies outside (0, 0.5] or the list is empty.
Eigen::VectorXd compute_weights(std::span<const double> training_eers);

// Majority vote, ties to Imposter.
Label fuse_voting(std::span<const Label> decisions);

// Relative tolerance under which two weighted totals are treated as tied.
inline constexpr double kTieTolerance = 1e-12;

// Weighted vote, ties to Imposter.
Label fuse_weighted_voting(std::span<const Label> decisions,
                           const Eigen::VectorXd& weights);

// Min-max normalization into [0, 1], clamping scores outside the training
// range. Throws DegenerateRange if a range has min == max.
Eigen::VectorXd normalize_min_max(const Eigen::VectorXd& scores,
                                  std::span<const ScoreRange> minmax);

struct SumDecision {
  Label label = Label::Imposter;
  double fused_score = 0.0;
};

// Mean of normalized scores; Genuine iff fused >= threshold.
SumDecision fuse_sum(const Eigen::VectorXd& scores,
                     std::span<const ScoreRange> minmax, double threshold);

// Weighted sum of normalized scores; Genuine iff fused >= threshold.
SumDecision fuse_sum(const Eigen::VectorXd& scores,
                     std::span<const ScoreRange> minmax, double threshold,
                     const Eigen::VectorXd& weights);

// Ratio of the larger to the smaller of the per-class maxima of the
// unweighted reliability ratios. Always >= 1.
double compute_gap(std::span<const ReliabilityPair> rr_pairs);

// Maximum decision reliability ratio fusion. If the gap exceeds lambda the
// class with the largest weighted ratio over all classifiers wins (ties to
// Imposter); otherwise the single-classifier decisions go through weighted
// voting and fallback_used is set.
FusedDecision fuse_mdrr(std::span<const ReliabilityPair> rr_pairs,
                        std::span<const Label> single_decisions,
                        const FusionConfig& config);

// Applies `config.strategy` to one sample's score vector.
FusedDecision fuse_sample(const Eigen::VectorXd& scores,
                          const ReliabilityModel& model,
                          const FusionConfig& config);

// Training-set quantities every strategy derives its parameters from.
struct Calibration {
  std::vector<double> training_eers;
  Eigen::VectorXd decision_thresholds;
  std::vector<ScoreRange> minmax;
  Eigen::VectorXd weights;
  double sum_threshold = 0.5;
  double wsum_threshold = 0.5;
};

// Computes per-classifier training EERs and EER operating points, min-max
// ranges, weights (normalized inverse EER unless `weights` is given), and the
// EER operating points of the sum and weighted-sum fused training scores.
// Training EERs are clamped into [1 / (n_genuine + n_imposter), 0.5] before
// weighting so that a separable classifier still receives a finite weight.
Calibration calibrate(const Dataset& train,
                      std::optional<Eigen::VectorXd> weights = std::nullopt);

FusionConfig make_config(const Calibration& calibration, Strategy strategy,
                         double lambda = 2.0);

// Runs `config.strategy` over every test sample. Sum strategies also get the
// ROC and EER of their fused test scores.
StrategyReport evaluate_strategy(const Dataset& test,
                                 const ReliabilityModel& model,
                                 const FusionConfig& config);

// One classifier on its own, thresholded at `threshold`, with the ROC and EER
// of its raw test scores.
StrategyReport evaluate_individual(const Dataset& test, std::size_t classifier,
                                   double threshold);

}  // namespace fusebench
