#include "fusebench/fusion.hpp"

#include "fusebench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fusebench {

std::string_view strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::Mdrr:
      return "mdrr";
    case Strategy::Vote:
      return "vote";
    case Strategy::WeightedVote:
      return "wvote";
    case Strategy::Sum:
      return "sum";
    case Strategy::WeightedSum:
      return "wsum";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (auto s : {Strategy::Mdrr, Strategy::Vote, Strategy::WeightedVote,
                 Strategy::Sum, Strategy::WeightedSum}) {
    if (strategy_name(s) == name) return s;
  }
  return std::nullopt;
}

void validate_config(const FusionConfig& config, std::size_t classifiers) {
  const auto n = static_cast<Eigen::Index>(classifiers);
  if (config.weights.size() != n) {
    throw InvalidConfig("expected " + std::to_string(classifiers) + " weights");
  }
  if ((config.weights.array() <= 0.0).any() || !config.weights.allFinite()) {
    throw InvalidConfig("weights must be positive and finite");
  }
  if (std::abs(config.weights.sum() - 1.0) > 1e-9) {
    throw InvalidConfig("weights must sum to 1");
  }
  if (!(config.lambda > 0.0)) {
    throw InvalidConfig("lambda must be positive");
  }
  if (config.decision_thresholds.size() != n) {
    throw InvalidConfig("expected " + std::to_string(classifiers) +
                        " decision thresholds");
  }
  if (config.minmax.size() != classifiers) {
    throw InvalidConfig("expected " + std::to_string(classifiers) +
                        " min-max ranges");
  }
  for (const auto& r : config.minmax) {
    if (!(r.min < r.max)) throw InvalidConfig("min-max range needs min < max");
  }
}

Eigen::VectorXd compute_weights(std::span<const double> training_eers) {
  if (training_eers.empty()) {
    throw std::invalid_argument("compute_weights: no EERs given");
  }
  Eigen::VectorXd inverse(static_cast<Eigen::Index>(training_eers.size()));
  for (std::size_t i = 0; i < training_eers.size(); ++i) {
    const double e = training_eers[i];
    if (e == 0.0) {
      throw ZeroEer("classifier " + std::to_string(i) +
                    " has zero training EER; its weight is undefined");
    }
    if (!(e > 0.0 && e <= 0.5)) {
      throw std::invalid_argument("training EER must lie in (0, 0.5]");
    }
    inverse(static_cast<Eigen::Index>(i)) = 1.0 / e;
  }
  return inverse / inverse.sum();
}

namespace {

// Totals that agree to within rounding count as a tie, so a tie in exact
// arithmetic stays a tie when every weight is rescaled.
bool clearly_greater(double a, double b) {
  return a - b > kTieTolerance * (std::abs(a) + std::abs(b));
}

}  // namespace

Label fuse_voting(std::span<const Label> decisions) {
  const auto genuine = std::count(decisions.begin(), decisions.end(), Label::Genuine);
  const auto imposter = static_cast<std::ptrdiff_t>(decisions.size()) - genuine;
  return genuine > imposter ? Label::Genuine : Label::Imposter;
}

Label fuse_weighted_voting(std::span<const Label> decisions,
                           const Eigen::VectorXd& weights) {
  if (weights.size() != static_cast<Eigen::Index>(decisions.size())) {
    throw std::invalid_argument("fuse_weighted_voting: weight count mismatch");
  }
  double genuine = 0.0;
  double imposter = 0.0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const double w = weights(static_cast<Eigen::Index>(i));
    (decisions[i] == Label::Genuine ? genuine : imposter) += w;
  }
  return clearly_greater(genuine, imposter) ? Label::Genuine : Label::Imposter;
}

Eigen::VectorXd normalize_min_max(const Eigen::VectorXd& scores,
                                  std::span<const ScoreRange> minmax) {
  if (scores.size() != static_cast<Eigen::Index>(minmax.size())) {
    throw std::invalid_argument("normalize_min_max: range count mismatch");
  }
  Eigen::VectorXd lo(scores.size());
  Eigen::VectorXd span(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const auto& r = minmax[static_cast<std::size_t>(i)];
    if (r.min == r.max) {
      throw DegenerateRange("classifier " + std::to_string(i) +
                            " has an empty min-max range");
    }
    lo(i) = r.min;
    span(i) = r.max - r.min;
  }
  return ((scores - lo).array() / span.array()).cwiseMax(0.0).cwiseMin(1.0);
}

SumDecision fuse_sum(const Eigen::VectorXd& scores,
                     std::span<const ScoreRange> minmax, double threshold) {
  const double fused = normalize_min_max(scores, minmax).mean();
  return {fused >= threshold ? Label::Genuine : Label::Imposter, fused};
}

SumDecision fuse_sum(const Eigen::VectorXd& scores,
                     std::span<const ScoreRange> minmax, double threshold,
                     const Eigen::VectorXd& weights) {
  if (weights.size() != scores.size()) {
    throw std::invalid_argument("fuse_sum: weight count mismatch");
  }
  const double fused = normalize_min_max(scores, minmax).dot(weights);
  return {fused >= threshold ? Label::Genuine : Label::Imposter, fused};
}

double compute_gap(std::span<const ReliabilityPair> rr_pairs) {
  if (rr_pairs.empty()) throw std::invalid_argument("compute_gap: no classifiers");
  double max_genuine = 0.0;
  double max_imposter = 0.0;
  for (const auto& p : rr_pairs) {
    max_genuine = std::max(max_genuine, p.rr_genuine);
    max_imposter = std::max(max_imposter, p.rr_imposter);
  }
  return std::max(max_imposter / max_genuine, max_genuine / max_imposter);
}

FusedDecision fuse_mdrr(std::span<const ReliabilityPair> rr_pairs,
                        std::span<const Label> single_decisions,
                        const FusionConfig& config) {
  const auto n = rr_pairs.size();
  if (single_decisions.size() != n ||
      config.weights.size() != static_cast<Eigen::Index>(n)) {
    throw std::invalid_argument("fuse_mdrr: classifier count mismatch");
  }
  FusedDecision out;
  out.ratios.assign(rr_pairs.begin(), rr_pairs.end());
  out.gap = compute_gap(rr_pairs);

  if (*out.gap > config.lambda) {
    double best_genuine = 0.0;
    double best_imposter = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = config.weights(static_cast<Eigen::Index>(i));
      best_genuine = std::max(best_genuine, w * rr_pairs[i].rr_genuine);
      best_imposter = std::max(best_imposter, w * rr_pairs[i].rr_imposter);
    }
    out.label = clearly_greater(best_genuine, best_imposter) ? Label::Genuine
                                                             : Label::Imposter;
  } else {
    out.label = fuse_weighted_voting(single_decisions, config.weights);
    out.fallback_used = true;
  }
  return out;
}

namespace {

std::vector<Label> threshold_decisions(const Eigen::VectorXd& scores,
                                       const Eigen::VectorXd& thresholds) {
  std::vector<Label> out(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    out[static_cast<std::size_t>(i)] =
        scores(i) >= thresholds(i) ? Label::Genuine : Label::Imposter;
  }
  return out;
}

}  // namespace

FusedDecision fuse_sample(const Eigen::VectorXd& scores,
                          const ReliabilityModel& model,
                          const FusionConfig& config) {
  FusedDecision out;
  switch (config.strategy) {
    case Strategy::Mdrr: {
      const auto n = model.size();
      if (scores.size() != static_cast<Eigen::Index>(n)) {
        throw std::invalid_argument("fuse_sample: score arity mismatch");
      }
      std::vector<ReliabilityPair> pairs(n);
      std::vector<Label> singles(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto counts =
            rank_counts(model, i, scores(static_cast<Eigen::Index>(i)));
        pairs[i] = reliability_ratio(counts);
        singles[i] = decide_single(counts);
      }
      return fuse_mdrr(pairs, singles, config);
    }
    case Strategy::Vote:
      out.label = fuse_voting(threshold_decisions(scores, config.decision_thresholds));
      return out;
    case Strategy::WeightedVote:
      out.label = fuse_weighted_voting(
          threshold_decisions(scores, config.decision_thresholds), config.weights);
      return out;
    case Strategy::Sum: {
      const auto s = fuse_sum(scores, config.minmax, config.fused_threshold);
      out.label = s.label;
      out.fused_score = s.fused_score;
      return out;
    }
    case Strategy::WeightedSum: {
      const auto s = fuse_sum(scores, config.minmax, config.fused_threshold,
                              config.weights);
      out.label = s.label;
      out.fused_score = s.fused_score;
      return out;
    }
  }
  return out;
}

namespace {

// Fused training scores of a sum rule, split by label.
std::pair<std::vector<double>, std::vector<double>> fused_scores(
    const Dataset& data, std::span<const ScoreRange> minmax,
    const Eigen::VectorXd* weights) {
  std::vector<double> gen;
  std::vector<double> imp;
  gen.reserve(data.genuine_count);
  imp.reserve(data.imposter_count);
  for (const auto& s : data.samples) {
    const auto normalized = normalize_min_max(s.scores, minmax);
    const double fused = weights ? normalized.dot(*weights) : normalized.mean();
    (s.label == Label::Genuine ? gen : imp).push_back(fused);
  }
  return {std::move(gen), std::move(imp)};
}

}  // namespace

Calibration calibrate(const Dataset& train,
                      std::optional<Eigen::VectorXd> weights) {
  const auto n = train.classifier_count();
  if (train.genuine_count == 0 || train.imposter_count == 0) {
    throw EmptyClass("calibration needs genuine and imposter training samples");
  }
  Calibration cal;
  cal.training_eers.resize(n);
  cal.decision_thresholds.resize(static_cast<Eigen::Index>(n));
  cal.minmax.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto gen = classifier_scores(train, i, Label::Genuine);
    const auto imp = classifier_scores(train, i, Label::Imposter);
    const auto roc = roc_sweep(gen, imp);
    cal.training_eers[i] = eer(roc);
    cal.decision_thresholds(static_cast<Eigen::Index>(i)) =
        eer_operating_point(roc).threshold;
    const auto [gmin, gmax] = std::minmax_element(gen.begin(), gen.end());
    const auto [imin, imax] = std::minmax_element(imp.begin(), imp.end());
    cal.minmax[i] = {std::min(*gmin, *imin), std::max(*gmax, *imax)};
  }

  if (weights) {
    if (weights->size() != static_cast<Eigen::Index>(n)) {
      throw InvalidConfig("expected " + std::to_string(n) + " weights");
    }
    cal.weights = *weights;
  } else {
    const double floor =
        1.0 / static_cast<double>(train.genuine_count + train.imposter_count);
    std::vector<double> clamped(cal.training_eers);
    for (auto& e : clamped) e = std::clamp(e, floor, 0.5);
    cal.weights = compute_weights(clamped);
  }

  {
    const auto [gen, imp] = fused_scores(train, cal.minmax, nullptr);
    cal.sum_threshold = eer_operating_point(roc_sweep(gen, imp)).threshold;
  }
  {
    const auto [gen, imp] = fused_scores(train, cal.minmax, &cal.weights);
    cal.wsum_threshold = eer_operating_point(roc_sweep(gen, imp)).threshold;
  }
  return cal;
}

FusionConfig make_config(const Calibration& calibration, Strategy strategy,
                         double lambda) {
  FusionConfig config;
  config.strategy = strategy;
  config.weights = calibration.weights;
  config.lambda = lambda;
  config.decision_thresholds = calibration.decision_thresholds;
  config.minmax = calibration.minmax;
  config.fused_threshold = strategy == Strategy::WeightedSum
                               ? calibration.wsum_threshold
                               : calibration.sum_threshold;
  return config;
}

StrategyReport evaluate_strategy(const Dataset& test,
                                 const ReliabilityModel& model,
                                 const FusionConfig& config) {
  validate_config(config, test.classifier_count());
  if (model.size() != test.classifier_count()) {
    throw InvalidModel("model and test set disagree on the classifier count");
  }
  ConfusionCounts counts;
  std::vector<double> fused_gen;
  std::vector<double> fused_imp;
  for (const auto& sample : test.samples) {
    const auto decision = fuse_sample(sample.scores, model, config);
    counts.add(decision.label, sample.label);
    if (decision.fused_score) {
      (sample.label == Label::Genuine ? fused_gen : fused_imp)
          .push_back(*decision.fused_score);
    }
  }
  auto report =
      make_strategy_report(std::string(strategy_name(config.strategy)), counts);
  if (!fused_gen.empty() && !fused_imp.empty()) {
    report.roc = roc_sweep(fused_gen, fused_imp);
    report.eer = eer(report.roc);
  }
  return report;
}

StrategyReport evaluate_individual(const Dataset& test, std::size_t classifier,
                                   double threshold) {
  const auto gen = classifier_scores(test, classifier, Label::Genuine);
  const auto imp = classifier_scores(test, classifier, Label::Imposter);
  ConfusionCounts counts;
  for (double s : gen) counts.add(s >= threshold ? Label::Genuine : Label::Imposter, Label::Genuine);
  for (double s : imp) counts.add(s >= threshold ? Label::Genuine : Label::Imposter, Label::Imposter);
  auto report = make_strategy_report(test.registry.name(classifier), counts);
  report.roc = roc_sweep(gen, imp);
  report.eer = eer(report.roc);
  return report;
}

}  // namespace fusebench
