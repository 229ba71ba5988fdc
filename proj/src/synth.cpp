#include "fusebench/synth.hpp"

#include "fusebench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>

namespace fusebench {

void validate_spec(const SynthSpec& spec) {
  if (spec.classifiers.empty()) throw InvalidSpec("no classifiers");
  if (!(spec.correlation >= 0.0 && spec.correlation <= 1.0)) {
    throw InvalidSpec("correlation must lie in [0, 1]");
  }
  for (const auto* split : {&spec.train, &spec.test}) {
    if (split->genuine < 1 || split->imposter < 1) {
      throw InvalidSpec("every split needs at least one genuine and one imposter sample");
    }
  }
  std::unordered_set<std::string> names;
  for (const auto& c : spec.classifiers) {
    if (c.name.empty()) throw InvalidSpec("classifier name must not be empty");
    if (!names.insert(c.name).second) {
      throw InvalidSpec("duplicate classifier name '" + c.name + "'");
    }
    for (const auto* d : {&c.genuine, &c.imposter}) {
      if (!(d->location >= 0.0 && d->location <= 1.0)) {
        throw InvalidSpec("classifier '" + c.name + "': location must lie in [0, 1]");
      }
      if (!(d->spread >= 0.0) || !std::isfinite(d->spread)) {
        throw InvalidSpec("classifier '" + c.name + "': spread must be finite and >= 0");
      }
    }
    if (!(c.genuine.location > c.imposter.location)) {
      throw InvalidSpec("classifier '" + c.name +
                        "': genuine location must exceed imposter location");
    }
  }
}

namespace {

// std::normal_distribution is implementation-defined; this keeps generated
// benchmarks identical across standard libraries.
class PortableNormal {
 public:
  explicit PortableNormal(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    // Box-Muller on u1 in (0, 1], u2 in [0, 1).
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
};

constexpr int kMaxRedraws = 64;

std::string pattern_id(const char* split, Label label, std::size_t index,
                       std::size_t count) {
  const auto width = std::to_string(count).size();
  auto digits = std::to_string(index);
  digits.insert(0, width - std::min(width, digits.size()), '0');
  return std::string(split) + (label == Label::Genuine ? "-g-" : "-i-") + digits;
}

Dataset generate_split(const SynthSpec& spec, const ClassifierRegistry& registry,
                       const SplitCounts& counts, const char* split,
                       PortableNormal& normal) {
  const auto n = static_cast<Eigen::Index>(spec.classifiers.size());
  const double shared = std::sqrt(spec.correlation);
  const double own = std::sqrt(1.0 - spec.correlation);

  std::vector<ScoreSample> samples;
  samples.reserve(counts.genuine + counts.imposter);
  for (const auto label : {Label::Genuine, Label::Imposter}) {
    const auto total = label == Label::Genuine ? counts.genuine : counts.imposter;
    for (std::size_t k = 0; k < total; ++k) {
      ScoreSample sample{pattern_id(split, label, k, total), label,
                         Eigen::VectorXd(n)};
      const double quality = normal();
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& c = spec.classifiers[static_cast<std::size_t>(i)];
        const auto& d = label == Label::Genuine ? c.genuine : c.imposter;
        double score = 0.0;
        for (int attempt = 0;; ++attempt) {
          score = d.location + d.spread * (shared * quality + own * normal());
          if ((score >= 0.0 && score <= 1.0) || own == 0.0 ||
              attempt + 1 == kMaxRedraws) {
            break;
          }
        }
        sample.scores(i) = std::clamp(score, 0.0, 1.0);
      }
      samples.push_back(std::move(sample));
    }
  }
  return make_dataset(registry, std::move(samples));
}

}  // namespace

SynthBenchmark generate(const SynthSpec& spec) {
  validate_spec(spec);
  std::vector<std::string> names;
  for (const auto& c : spec.classifiers) names.push_back(c.name);
  const ClassifierRegistry registry(std::move(names));

  PortableNormal normal(spec.seed);
  SynthBenchmark out;
  out.train = generate_split(spec, registry, spec.train, "train", normal);
  out.test = generate_split(spec, registry, spec.test, "test", normal);
  return out;
}

}  // namespace fusebench
