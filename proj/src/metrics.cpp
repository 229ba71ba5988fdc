#include "fusebench/metrics.hpp"

#include "fusebench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace fusebench {

void ConfusionCounts::add(Label predicted, Label truth) {
  if (truth == Label::Genuine) {
    ++n_genuine;
    if (predicted == Label::Imposter) ++fr;
  } else {
    ++n_imposter;
    if (predicted == Label::Genuine) ++fa;
  }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  fa += other.fa;
  fr += other.fr;
  n_genuine += other.n_genuine;
  n_imposter += other.n_imposter;
  return *this;
}

ConfusionCounts confusion(std::span<const LabeledDecision> decisions) {
  if (decisions.empty()) throw EmptyInput("confusion: no decisions");
  ConfusionCounts counts;
  for (const auto& d : decisions) counts.add(d.predicted, d.truth);
  return counts;
}

Rates rates(const ConfusionCounts& counts) {
  if (counts.n_genuine == 0 || counts.n_imposter == 0) {
    throw DegenerateCounts("rates: both genuine and imposter accesses are required");
  }
  Rates r;
  r.far = static_cast<double>(counts.fa) / static_cast<double>(counts.n_imposter);
  r.frr = static_cast<double>(counts.fr) / static_cast<double>(counts.n_genuine);
  r.hter = (r.far + r.frr) / 2.0;
  return r;
}

std::vector<RocPoint> roc_sweep(std::span<const double> genuine_scores,
                                std::span<const double> imposter_scores) {
  if (genuine_scores.empty() || imposter_scores.empty()) {
    throw EmptyInput("roc_sweep: both score lists must be non-empty");
  }
  std::vector<double> gen(genuine_scores.begin(), genuine_scores.end());
  std::vector<double> imp(imposter_scores.begin(), imposter_scores.end());
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());

  std::vector<double> thresholds;
  thresholds.reserve(gen.size() + imp.size() + 2);
  std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  const double inf = std::numeric_limits<double>::infinity();
  thresholds.insert(thresholds.begin(), std::nextafter(thresholds.front(), -inf));
  thresholds.push_back(std::nextafter(thresholds.back(), inf));

  const auto n_gen = static_cast<double>(gen.size());
  const auto n_imp = static_cast<double>(imp.size());
  std::vector<RocPoint> roc;
  roc.reserve(thresholds.size());
  // Both cursors only move forward as the threshold rises.
  auto g = gen.begin();
  auto m = imp.begin();
  for (double t : thresholds) {
    while (g != gen.end() && *g < t) ++g;
    while (m != imp.end() && *m < t) ++m;
    const auto rejected_gen = static_cast<double>(g - gen.begin());
    const auto accepted_imp = static_cast<double>(imp.end() - m);
    roc.push_back({t, accepted_imp / n_imp, rejected_gen / n_gen});
  }
  return roc;
}

namespace {

void check_roc(std::span<const RocPoint> roc) {
  if (roc.empty()) throw InvalidRoc("empty ROC");
  for (std::size_t k = 0; k < roc.size(); ++k) {
    const auto& p = roc[k];
    if (!(p.far >= 0.0 && p.far <= 1.0 && p.frr >= 0.0 && p.frr <= 1.0)) {
      throw InvalidRoc("ROC rate outside [0, 1] at point " + std::to_string(k));
    }
    if (k > 0) {
      const auto& prev = roc[k - 1];
      if (p.threshold < prev.threshold || p.far > prev.far || p.frr < prev.frr) {
        throw InvalidRoc("ROC is not monotone at point " + std::to_string(k));
      }
    }
  }
}

}  // namespace

double eer(std::span<const RocPoint> roc) {
  check_roc(roc);
  // far - frr is non-increasing along the sweep.
  for (std::size_t k = 0; k < roc.size(); ++k) {
    const double d = roc[k].far - roc[k].frr;
    if (d == 0.0) return roc[k].far;
    if (d < 0.0) {
      if (k == 0) break;
      const auto& a = roc[k - 1];
      const auto& b = roc[k];
      const double da = a.far - a.frr;
      const double alpha = da / (da - d);
      return a.far + alpha * (b.far - a.far);
    }
  }
  // No sign change: the sweep never reaches the crossing, so report the
  // closest end.
  const auto& end = (roc.front().far - roc.front().frr) < 0.0 ? roc.front()
                                                               : roc.back();
  return (end.far + end.frr) / 2.0;
}

RocPoint eer_operating_point(std::span<const RocPoint> roc) {
  check_roc(roc);
  const RocPoint* best = &roc.front();
  for (const auto& p : roc) {
    const double gap = std::abs(p.far - p.frr);
    const double best_gap = std::abs(best->far - best->frr);
    if (gap < best_gap ||
        (gap == best_gap && p.far + p.frr < best->far + best->frr)) {
      best = &p;
    }
  }
  return *best;
}

std::string format_percent(double rate) {
  const double hundredths = rate * 10000.0;
  // Nudge absorbs representation error of exact half-way rationals.
  const double rounded =
      std::floor(hundredths + 0.5 + 1e-9 * std::max(1.0, std::abs(hundredths)));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", rounded / 100.0);
  return buf;
}

const StrategyReport* EvaluationReport::find(std::string_view name) const {
  for (const auto& s : strategies) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

StrategyReport make_strategy_report(std::string name, ConfusionCounts counts) {
  StrategyReport report;
  report.name = std::move(name);
  report.counts = counts;
  report.rates = rates(counts);
  return report;
}

}  // namespace fusebench
