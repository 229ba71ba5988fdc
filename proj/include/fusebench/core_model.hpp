#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fusebench {

enum class Label : int { Imposter = 0, Genuine = 1 };

std::string_view to_string(Label label);

inline Label opposite(Label label) {
  return label == Label::Genuine ? Label::Imposter : Label::Genuine;
}

// One comparison attempt. Scores are similarities (higher means more alike),
// index-aligned with the owning dataset's ClassifierRegistry.
struct ScoreSample {
  std::string pattern_id;
  Label label = Label::Imposter;
  Eigen::VectorXd scores;
};

class ClassifierRegistry {
 public:
  ClassifierRegistry() = default;

  // Throws std::invalid_argument on an empty list, an empty name or a
  // duplicate name.
  explicit ClassifierRegistry(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const ClassifierRegistry&,
                         const ClassifierRegistry&) = default;

 private:
  std::vector<std::string> names_;
};

struct Dataset {
  ClassifierRegistry registry;
  std::vector<ScoreSample> samples;
  std::size_t genuine_count = 0;
  std::size_t imposter_count = 0;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t classifier_count() const noexcept { return registry.size(); }
};

// Builds a dataset and tallies the per-label counts. Does not validate.
Dataset make_dataset(ClassifierRegistry registry,
                     std::vector<ScoreSample> samples);

// Scores of one classifier over every sample carrying `label`, in sample order.
std::vector<double> classifier_scores(const Dataset& dataset,
                                      std::size_t classifier, Label label);

enum class ViolationKind {
  ScoreArity,
  NonFiniteScore,
  EmptyPatternId,
  DuplicatePatternId,
  EmptyClass,
  CountMismatch,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> sample;  // index into Dataset::samples, if any
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const;

  friend bool operator==(const ValidationResult&,
                         const ValidationResult&) = default;
};

// Reports every structural problem in `dataset`. Never throws.
ValidationResult validate_dataset(const Dataset& dataset);

}  // namespace fusebench
