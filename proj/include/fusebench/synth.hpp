#pragma once

#include "fusebench/core_model.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fusebench {

struct ScoreDistribution {
  double location = 0.5;
  double spread = 0.1;
};

struct SynthClassifier {
  std::string name;
  ScoreDistribution genuine;
  ScoreDistribution imposter;
};

struct SplitCounts {
  std::size_t genuine = 1;
  std::size_t imposter = 1;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  // Weight of the shared per-sample quality draw; 0 gives independent
  // classifiers, 1 fully shared noise.
  double correlation = 0.0;
  std::vector<SynthClassifier> classifiers;
  SplitCounts train;
  SplitCounts test;
};

// Throws InvalidSpec describing the first problem found.
void validate_spec(const SynthSpec& spec);

struct SynthBenchmark {
  Dataset train;
  Dataset test;
};

// Deterministic in `spec`. Each sample draws one latent quality value q and,
// per classifier, independent noise e; the classifier's score is
// location + spread * (sqrt(rho) q + sqrt(1 - rho) e) for the sample's label,
// with e redrawn until the score falls in [0, 1] (clamped after 64 tries).
// Samples are emitted genuine first, then imposter.
SynthBenchmark generate(const SynthSpec& spec);

}  // namespace fusebench
