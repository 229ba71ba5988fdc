#include "fusebench/reliability.hpp"

#include "fusebench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace fusebench {

namespace {

void check_query(const ReliabilityModel& model, std::size_t classifier,
                 double score) {
  if (classifier >= model.size()) {
    throw std::out_of_range("classifier index out of range");
  }
  if (!std::isfinite(score)) {
    throw std::invalid_argument("query score must be finite");
  }
}

bool sorted_finite(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); }) &&
         std::is_sorted(values.begin(), values.end());
}

}  // namespace

ReliabilityModel::ReliabilityModel(ClassifierRegistry registry,
                                   std::vector<ClassifierTable> tables)
    : registry_(std::move(registry)), tables_(std::move(tables)) {
  if (registry_.size() != tables_.size()) {
    throw InvalidModel("registry lists " + std::to_string(registry_.size()) +
                       " classifiers but " + std::to_string(tables_.size()) +
                       " tables were given");
  }
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const auto& t = tables_[i];
    const auto& name = registry_.name(i);
    if (t.genuine_sorted.empty()) {
      throw EmptyClass("classifier '" + name + "' has no genuine training scores");
    }
    if (t.imposter_sorted.empty()) {
      throw EmptyClass("classifier '" + name + "' has no imposter training scores");
    }
    if (!sorted_finite(t.genuine_sorted) || !sorted_finite(t.imposter_sorted)) {
      throw InvalidModel("classifier '" + name +
                         "' has unsorted or non-finite training scores");
    }
  }
}

const ClassifierTable& ReliabilityModel::table(std::size_t classifier) const {
  return tables_.at(classifier);
}

ReliabilityModel build_model(const Dataset& train) {
  const std::size_t n = train.classifier_count();
  std::vector<ClassifierTable> tables(n);
  for (auto& t : tables) {
    t.genuine_sorted.reserve(train.genuine_count);
    t.imposter_sorted.reserve(train.imposter_count);
  }
  for (const auto& sample : train.samples) {
    if (sample.scores.size() != static_cast<Eigen::Index>(n)) {
      throw std::invalid_argument("sample '" + sample.pattern_id +
                                  "' has the wrong score arity");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double s = sample.scores(static_cast<Eigen::Index>(i));
      if (!std::isfinite(s)) {
        throw std::invalid_argument("sample '" + sample.pattern_id +
                                    "' has a non-finite score");
      }
      auto& dest = sample.label == Label::Genuine ? tables[i].genuine_sorted
                                                  : tables[i].imposter_sorted;
      dest.push_back(s);
    }
  }
  for (auto& t : tables) {
    std::sort(t.genuine_sorted.begin(), t.genuine_sorted.end());
    std::sort(t.imposter_sorted.begin(), t.imposter_sorted.end());
  }
  return ReliabilityModel(train.registry, std::move(tables));
}

RankCounts rank_counts(const ReliabilityModel& model, std::size_t classifier,
                       double score) {
  check_query(model, classifier, score);
  const auto& t = model.table(classifier);
  const auto& gen = t.genuine_sorted;
  const auto& imp = t.imposter_sorted;
  RankCounts c;
  c.genuine_le = static_cast<std::size_t>(
      std::upper_bound(gen.begin(), gen.end(), score) - gen.begin());
  c.imposter_ge = static_cast<std::size_t>(
      imp.end() - std::lower_bound(imp.begin(), imp.end(), score));
  c.n_genuine = gen.size();
  c.n_imposter = imp.size();
  return c;
}

double reliability_genuine(const ReliabilityModel& model,
                           std::size_t classifier, double score) {
  const auto c = rank_counts(model, classifier, score);
  return static_cast<double>(c.genuine_le) / static_cast<double>(c.n_genuine);
}

double reliability_imposter(const ReliabilityModel& model,
                            std::size_t classifier, double score) {
  const auto c = rank_counts(model, classifier, score);
  return static_cast<double>(c.imposter_ge) / static_cast<double>(c.n_imposter);
}

ReliabilityPair reliability_ratio(const RankCounts& c) {
  ReliabilityPair p;
  p.r_genuine = static_cast<double>(c.genuine_le) / static_cast<double>(c.n_genuine);
  p.r_imposter =
      static_cast<double>(c.imposter_ge) / static_cast<double>(c.n_imposter);
  p.smoothed_genuine = static_cast<double>(c.genuine_le + 1) /
                       static_cast<double>(c.n_genuine + 1);
  p.smoothed_imposter = static_cast<double>(c.imposter_ge + 1) /
                        static_cast<double>(c.n_imposter + 1);
  p.rr_genuine = p.smoothed_genuine / p.smoothed_imposter;
  p.rr_imposter = p.smoothed_imposter / p.smoothed_genuine;
  return p;
}

ReliabilityPair reliability_ratio(const ReliabilityModel& model,
                                  std::size_t classifier, double score) {
  return reliability_ratio(rank_counts(model, classifier, score));
}

Label decide_single(const RankCounts& c) {
  // (g+1)/(n_g+1) > (m+1)/(n_m+1), cross-multiplied.
  const auto lhs = static_cast<std::uint64_t>(c.genuine_le + 1) *
                   static_cast<std::uint64_t>(c.n_imposter + 1);
  const auto rhs = static_cast<std::uint64_t>(c.imposter_ge + 1) *
                   static_cast<std::uint64_t>(c.n_genuine + 1);
  return lhs > rhs ? Label::Genuine : Label::Imposter;
}

Label decide_single(const ReliabilityModel& model, std::size_t classifier,
                    double score) {
  return decide_single(rank_counts(model, classifier, score));
}

}  // namespace fusebench
