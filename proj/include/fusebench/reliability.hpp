#pragma once

#include "fusebench/core_model.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fusebench {

// Empirical training score populations of one classifier, ascending and with
// duplicates kept.
struct ClassifierTable {
  std::vector<double> genuine_sorted;
  std::vector<double> imposter_sorted;

  std::size_t n_genuine() const noexcept { return genuine_sorted.size(); }
  std::size_t n_imposter() const noexcept { return imposter_sorted.size(); }

  friend bool operator==(const ClassifierTable&,
                         const ClassifierTable&) = default;
};

// Per-classifier reliability tables. Immutable once built; every query is a
// read-only rank lookup.
class ReliabilityModel {
 public:
  static constexpr std::string_view kSmoothing = "laplace-add-one";

  ReliabilityModel() = default;

  // Throws InvalidModel if names and tables disagree in length, an array is
  // unsorted or non-finite, and EmptyClass if a population is empty.
  ReliabilityModel(ClassifierRegistry registry,
                   std::vector<ClassifierTable> tables);

  std::size_t size() const noexcept { return tables_.size(); }
  const ClassifierRegistry& registry() const noexcept { return registry_; }
  const ClassifierTable& table(std::size_t classifier) const;

  friend bool operator==(const ReliabilityModel&,
                         const ReliabilityModel&) = default;

 private:
  ClassifierRegistry registry_;
  std::vector<ClassifierTable> tables_;
};

// Rank statistics of a score against one classifier's training populations.
struct RankCounts {
  std::size_t genuine_le = 0;   // training genuine scores <= query
  std::size_t imposter_ge = 0;  // training imposter scores >= query
  std::size_t n_genuine = 0;
  std::size_t n_imposter = 0;
};

struct ReliabilityPair {
  double r_genuine = 0.0;   // raw R(c=1|p)
  double r_imposter = 0.0;  // raw R(c=0|p)
  double smoothed_genuine = 0.0;
  double smoothed_imposter = 0.0;
  double rr_genuine = 1.0;
  double rr_imposter = 1.0;

  double ratio(Label label) const {
    return label == Label::Genuine ? rr_genuine : rr_imposter;
  }
};

// Throws EmptyClass if any classifier lacks genuine or imposter training
// scores, std::invalid_argument if a score is non-finite or the arity is off.
ReliabilityModel build_model(const Dataset& train);

RankCounts rank_counts(const ReliabilityModel& model, std::size_t classifier,
                       double score);

double reliability_genuine(const ReliabilityModel& model,
                           std::size_t classifier, double score);
double reliability_imposter(const ReliabilityModel& model,
                            std::size_t classifier, double score);

// Raw reliabilities plus add-one smoothed ratios. The smoothed values are
// (count + 1) / (n + 1), so the ratios stay finite and strictly positive.
ReliabilityPair reliability_ratio(const RankCounts& counts);
ReliabilityPair reliability_ratio(const ReliabilityModel& model,
                                  std::size_t classifier, double score);

// Reliability-based decision of a single classifier. Evaluated on the
// integer counts, so it is exact; ties go to Imposter.
Label decide_single(const RankCounts& counts);
Label decide_single(const ReliabilityModel& model, std::size_t classifier,
                    double score);

}  // namespace fusebench
