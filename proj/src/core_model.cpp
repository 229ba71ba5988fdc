#include "fusebench/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace fusebench {

std::string_view to_string(Label label) {
  return label == Label::Genuine ? "genuine" : "imposter";
}

ClassifierRegistry::ClassifierRegistry(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.empty()) {
    throw std::invalid_argument("classifier registry needs at least one name");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) {
      throw std::invalid_argument("classifier name must not be empty");
    }
    if (!seen.insert(name).second) {
      throw std::invalid_argument("duplicate classifier name '" + name + "'");
    }
  }
}

std::optional<std::size_t> ClassifierRegistry::index_of(
    std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

Dataset make_dataset(ClassifierRegistry registry,
                     std::vector<ScoreSample> samples) {
  Dataset dataset{std::move(registry), std::move(samples), 0, 0};
  for (const auto& sample : dataset.samples) {
    if (sample.label == Label::Genuine) {
      ++dataset.genuine_count;
    } else {
      ++dataset.imposter_count;
    }
  }
  return dataset;
}

std::vector<double> classifier_scores(const Dataset& dataset,
                                      std::size_t classifier, Label label) {
  if (classifier >= dataset.classifier_count()) {
    throw std::out_of_range("classifier index out of range");
  }
  std::vector<double> out;
  out.reserve(label == Label::Genuine ? dataset.genuine_count
                                      : dataset.imposter_count);
  for (const auto& sample : dataset.samples) {
    if (sample.label == label) {
      out.push_back(sample.scores(static_cast<Eigen::Index>(classifier)));
    }
  }
  return out;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::ScoreArity:
      return "score arity";
    case ViolationKind::NonFiniteScore:
      return "non-finite score";
    case ViolationKind::EmptyPatternId:
      return "empty pattern id";
    case ViolationKind::DuplicatePatternId:
      return "duplicate pattern id";
    case ViolationKind::EmptyClass:
      return "empty class";
    case ViolationKind::CountMismatch:
      return "count mismatch";
  }
  return "unknown";
}

bool ValidationResult::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationResult validate_dataset(const Dataset& dataset) {
  ValidationResult result;
  auto report = [&](ViolationKind kind, std::optional<std::size_t> sample,
                    std::string message) {
    result.violations.push_back({kind, sample, std::move(message)});
  };

  const auto arity = static_cast<Eigen::Index>(dataset.classifier_count());
  std::unordered_map<std::string_view, std::size_t> first_seen;
  std::size_t genuine = 0;
  std::size_t imposter = 0;

  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const auto& sample = dataset.samples[i];
    if (sample.label == Label::Genuine) {
      ++genuine;
    } else {
      ++imposter;
    }

    if (sample.pattern_id.empty()) {
      report(ViolationKind::EmptyPatternId, i, "sample has an empty pattern id");
    } else if (auto [it, inserted] = first_seen.emplace(sample.pattern_id, i);
               !inserted) {
      report(ViolationKind::DuplicatePatternId, i,
             "pattern id '" + sample.pattern_id + "' repeats sample " +
                 std::to_string(it->second));
    }

    if (sample.scores.size() != arity) {
      report(ViolationKind::ScoreArity, i,
             "expected " + std::to_string(arity) + " scores, found " +
                 std::to_string(sample.scores.size()));
    }
    for (Eigen::Index k = 0; k < sample.scores.size(); ++k) {
      if (!std::isfinite(sample.scores(k))) {
        report(ViolationKind::NonFiniteScore, i,
               "score " + std::to_string(k) + " is not finite");
      }
    }
  }

  if (genuine == 0) {
    report(ViolationKind::EmptyClass, std::nullopt, "no genuine samples");
  }
  if (imposter == 0) {
    report(ViolationKind::EmptyClass, std::nullopt, "no imposter samples");
  }
  if (genuine != dataset.genuine_count || imposter != dataset.imposter_count) {
    report(ViolationKind::CountMismatch, std::nullopt,
           "stored counts (" + std::to_string(dataset.genuine_count) + ", " +
               std::to_string(dataset.imposter_count) +
               ") differ from label tallies (" + std::to_string(genuine) +
               ", " + std::to_string(imposter) + ")");
  }
  return result;
}

}  // namespace fusebench
