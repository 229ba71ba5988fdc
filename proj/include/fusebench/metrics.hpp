#pragma once

#include "fusebench/core_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fusebench {

struct ConfusionCounts {
  std::size_t fa = 0;
  std::size_t fr = 0;
  std::size_t n_genuine = 0;
  std::size_t n_imposter = 0;

  void add(Label predicted, Label truth);
  ConfusionCounts& operator+=(const ConfusionCounts& other);

  friend bool operator==(const ConfusionCounts&,
                         const ConfusionCounts&) = default;
};

struct Rates {
  double far = 0.0;
  double frr = 0.0;
  double hter = 0.0;
};

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct LabeledDecision {
  Label predicted;
  Label truth;
};

// Throws EmptyInput on an empty list.
ConfusionCounts confusion(std::span<const LabeledDecision> decisions);

// FAR over imposter accesses, FRR over genuine accesses. Throws
// DegenerateCounts when either class is empty.
Rates rates(const ConfusionCounts& counts);

// Accept iff score >= threshold. Candidates are every distinct score plus one
// sentinel just below the minimum and one just above the maximum, ascending.
// Throws EmptyInput if either list is empty.
std::vector<RocPoint> roc_sweep(std::span<const double> genuine_scores,
                                std::span<const double> imposter_scores);

// Rate at the FAR = FRR crossing, linearly interpolated between the two
// points bracketing the sign change of FAR - FRR. Throws InvalidRoc if the
// sequence is empty or not monotone.
double eer(std::span<const RocPoint> roc);

// ROC point used to turn a score into a decision: smallest |FAR - FRR|,
// then smallest FAR + FRR, then lowest threshold. Throws InvalidRoc on an
// empty or non-monotone sequence.
RocPoint eer_operating_point(std::span<const RocPoint> roc);

// Percentage of `rate` rounded half-up to two decimals, e.g. 0.0019400 -> "0.19".
std::string format_percent(double rate);

// Evaluation of one decision-producing strategy over a labeled test set.
// Score-output strategies (single classifiers, sum rules) also carry their
// test ROC and EER.
struct StrategyReport {
  std::string name;
  ConfusionCounts counts;
  Rates rates;
  std::optional<double> eer;
  std::vector<RocPoint> roc;
};

struct EvaluationReport {
  std::vector<StrategyReport> strategies;

  const StrategyReport* find(std::string_view name) const;
};

StrategyReport make_strategy_report(std::string name, ConfusionCounts counts);

}  // namespace fusebench
