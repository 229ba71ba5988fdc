#include <doctest.h>

#include "fusebench/errors.hpp"
#include "fusebench/fusion.hpp"
#include "reference.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace fusebench;

namespace {

constexpr auto G = Label::Genuine;
constexpr auto I = Label::Imposter;

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

ReliabilityPair pair(double rr_genuine, double rr_imposter) {
  ReliabilityPair p;
  p.rr_genuine = rr_genuine;
  p.rr_imposter = rr_imposter;
  return p;
}

FusionConfig mdrr_config(Eigen::VectorXd weights, double lambda = 2.0) {
  FusionConfig c;
  c.strategy = Strategy::Mdrr;
  c.weights = std::move(weights);
  c.lambda = lambda;
  return c;
}

// Library-side inputs of MDRR for one random sample.
struct MdrrInputs {
  std::vector<ReliabilityPair> pairs;
  std::vector<Label> singles;
  Eigen::VectorXd weights;
};

MdrrInputs random_mdrr_inputs(std::mt19937_64& rng) {
  const std::size_t n = 1 + rng() % 3;
  const auto train = testing::random_dataset(rng, n, 1 + rng() % 20, 1 + rng() % 20);
  const auto model = build_model(train);
  std::uniform_real_distribution<double> u(-0.1, 1.1);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  MdrrInputs in;
  in.weights.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double s = u(rng);
    const auto counts = rank_counts(model, i, s);
    in.pairs.push_back(reliability_ratio(counts));
    in.singles.push_back(decide_single(counts));
    in.weights(static_cast<Eigen::Index>(i)) = w(rng);
  }
  in.weights /= in.weights.sum();
  return in;
}

}  // namespace

TEST_SUITE("strategy names") {
  TEST_CASE("round trip") {
    for (auto s : {Strategy::Mdrr, Strategy::Vote, Strategy::WeightedVote, Strategy::Sum,
                   Strategy::WeightedSum}) {
      CHECK(parse_strategy(strategy_name(s)) == s);
    }
    CHECK(strategy_name(Strategy::WeightedVote) == "wvote");
    CHECK_FALSE(parse_strategy("majority"));
  }
}

TEST_SUITE("compute_weights") {
  TEST_CASE("published training EERs") {
    const std::vector<double> eers{0.0232, 0.0260, 0.0442, 0.0670};
    const auto w = compute_weights(eers);
    // Normalized inverse EER, evaluated independently in double precision.
    CHECK(w(0) == doctest::Approx(0.3618647754321996).epsilon(1e-12));
    CHECK(w(1) == doctest::Approx(0.3228947226933473).epsilon(1e-12));
    CHECK(w(2) == doctest::Approx(0.18993807217255723).epsilon(1e-12));
    CHECK(w(3) == doctest::Approx(0.12530242970189595).epsilon(1e-12));
    const std::vector<double> rounded{0.3619, 0.3229, 0.1900, 0.1253};
    for (Eigen::Index i = 0; i < 4; ++i) {
      CHECK(std::abs(w(i) - rounded[static_cast<std::size_t>(i)]) <= 1e-4);
    }
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("symmetry and single classifier") {
    const std::vector<double> equal{0.05, 0.05};
    CHECK(compute_weights(equal) == vec({0.5, 0.5}));
    const std::vector<double> one{0.1};
    CHECK(compute_weights(one) == vec({1.0}));
  }

  TEST_CASE("invalid EERs") {
    const std::vector<double> zero{0.02, 0.0};
    CHECK_THROWS_AS(compute_weights(zero), ZeroEer);
    const std::vector<double> big{0.6};
    CHECK_THROWS_AS(compute_weights(big), std::invalid_argument);
    CHECK_THROWS_AS(compute_weights({}), std::invalid_argument);
  }
}

TEST_SUITE("voting") {
  TEST_CASE("majority") {
    CHECK(fuse_voting(std::vector{G, G, I}) == G);
    CHECK(fuse_voting(std::vector{G, G, I, I}) == I);
    CHECK(fuse_voting(std::vector{I, I, I, G}) == I);
  }

  TEST_CASE("weighted") {
    CHECK(fuse_weighted_voting(std::vector{G, I}, vec({0.6, 0.4})) == G);
    CHECK(fuse_weighted_voting(std::vector{G, G, I, I}, vec({0.25, 0.25, 0.25, 0.25})) == I);
    // 0.3229 + 0.1900 + 0.1253 = 0.6382 against 0.3619.
    CHECK(fuse_weighted_voting(std::vector{I, G, G, G},
                               vec({0.3619, 0.3229, 0.1900, 0.1253})) == G);
    CHECK_THROWS_AS(fuse_weighted_voting(std::vector{G}, vec({0.5, 0.5})),
                    std::invalid_argument);
  }
}

TEST_SUITE("sum rules") {
  const std::vector<ScoreRange> ranges{{0.0, 1.0}, {0.2, 0.6}};

  TEST_CASE("scores at the training maximum fuse to one") {
    const auto s = fuse_sum(vec({1.0, 0.6}), ranges, 1.0);
    CHECK(s.fused_score == 1.0);
    CHECK(s.label == G);
  }

  TEST_CASE("mean of normalized scores below threshold") {
    const std::vector<ScoreRange> unit{{0.0, 1.0}, {0.0, 1.0}};
    const auto s = fuse_sum(vec({0.5, 0.5}), unit, 0.6);
    CHECK(s.fused_score == 0.5);
    CHECK(s.label == I);
    const auto w = fuse_sum(vec({0.5, 0.5}), unit, 0.6, vec({0.5, 0.5}));
    CHECK(w.fused_score == 0.5);
    CHECK(w.label == I);
  }

  TEST_CASE("scores outside the range clamp") {
    const auto n = normalize_min_max(vec({1.7, -3.0}), ranges);
    CHECK(n(0) == 1.0);
    CHECK(n(1) == 0.0);
  }

  TEST_CASE("weighted sum") {
    const auto s = fuse_sum(vec({0.5, 0.4}), ranges, 0.5, vec({0.8, 0.2}));
    CHECK(s.fused_score == doctest::Approx(0.8 * 0.5 + 0.2 * 0.5));
    CHECK(s.label == G);
  }

  TEST_CASE("degenerate range") {
    const std::vector<ScoreRange> flat{{0.3, 0.3}};
    CHECK_THROWS_AS(fuse_sum(vec({0.3}), flat, 0.5), DegenerateRange);
  }
}

TEST_SUITE("gap") {
  TEST_CASE("examples") {
    CHECK(compute_gap(std::vector{pair(50, 0.02), pair(0.2, 5)}) == doctest::Approx(10.0));
    CHECK(compute_gap(std::vector{pair(3, 1.0 / 3), pair(1.0 / 3, 3)}) == 1.0);
    CHECK(compute_gap(std::vector{pair(4.0, 0.25)}) == 16.0);
  }
}

TEST_SUITE("mdrr") {
  TEST_CASE("outside the fuzzy zone the largest weighted ratio wins") {
    const std::vector pairs{pair(20, 0.05), pair(0.5, 2)};
    const auto d = fuse_mdrr(pairs, std::vector{G, I}, mdrr_config(vec({0.5, 0.5})));
    CHECK(*d.gap == doctest::Approx(10.0));
    CHECK(d.label == G);
    CHECK_FALSE(d.fallback_used);
    CHECK(d.ratios.size() == 2);
    CHECK_FALSE(d.fused_score);
  }

  TEST_CASE("inside the fuzzy zone weighted voting decides") {
    const std::vector pairs{pair(1.5, 1 / 1.5), pair(1 / 1.2, 1.2)};
    const auto d = fuse_mdrr(pairs, std::vector{G, I}, mdrr_config(vec({0.7, 0.3})));
    CHECK(*d.gap <= 2.0);
    CHECK(d.fallback_used);
    CHECK(d.label == G);
  }

  TEST_CASE("unanimous genuine") {
    const std::vector pairs{pair(40, 1.0 / 40), pair(30, 1.0 / 30), pair(60, 1.0 / 60)};
    const auto cfg = mdrr_config(vec({0.2, 0.3, 0.5}));
    CHECK(fuse_mdrr(pairs, std::vector{G, G, G}, cfg).label == G);
    auto fuzzy = cfg;
    fuzzy.lambda = 1e9;
    CHECK(fuse_mdrr(pairs, std::vector{G, G, G}, fuzzy).label == G);
  }

  TEST_CASE("weighted tie goes to imposter") {
    const std::vector pairs{pair(8, 0.125), pair(0.125, 8)};
    const auto d = fuse_mdrr(pairs, std::vector{G, I}, mdrr_config(vec({0.5, 0.5}), 0.5));
    CHECK_FALSE(d.fallback_used);
    CHECK(d.label == I);
  }
}

TEST_SUITE("ties under rescaling") {
  TEST_CASE("exact weighted-vote tie survives any scale") {
    // 1/6 + 1/3 = 1/2 in exact arithmetic.
    const Eigen::VectorXd w = vec({1.0 / 6.0, 1.0 / 3.0, 0.5});
    const std::vector votes{G, G, I};
    for (double c : {1.0, 5.5884504162554576, 0.37, 1e-3, 1e3}) {
      CAPTURE(c);
      CHECK(fuse_weighted_voting(votes, w * c) == I);
    }
  }

  TEST_CASE("exact MDRR tie survives any scale") {
    const std::vector pairs{pair(6, 1.0 / 6), pair(1.0 / 3, 3)};
    for (double c : {1.0, 0.3, 7.1}) {
      CAPTURE(c);
      const auto d = fuse_mdrr(pairs, std::vector{G, I}, mdrr_config(vec({1.0 / 3, 2.0 / 3}) * c, 1.5));
      CHECK_FALSE(d.fallback_used);
      CHECK(d.label == I);
    }
  }
}

TEST_SUITE("fusion properties") {
  TEST_CASE("gap is at least one and symmetric under class swap") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
      auto in = random_mdrr_inputs(rng);
      const double g = compute_gap(in.pairs);
      REQUIRE(g >= 1.0);
      for (auto& p : in.pairs) std::swap(p.rr_genuine, p.rr_imposter);
      REQUIRE(compute_gap(in.pairs) == g);
    }
  }

  TEST_CASE("weight scale invariance") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto in = random_mdrr_inputs(rng);
      const double c = scale(rng);
      const auto base = mdrr_config(in.weights);
      const auto scaled = mdrr_config(in.weights * c);
      REQUIRE(fuse_mdrr(in.pairs, in.singles, base).label ==
              fuse_mdrr(in.pairs, in.singles, scaled).label);
      REQUIRE(fuse_weighted_voting(in.singles, in.weights) ==
              fuse_weighted_voting(in.singles, in.weights * c));
    }
  }

  TEST_CASE("single classifier beyond lambda reduces to its own decision") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-0.1, 1.1);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto train = testing::random_dataset(rng, 1, 1 + rng() % 20, 1 + rng() % 20);
      const auto model = build_model(train);
      const double s = u(rng);
      const auto counts = rank_counts(model, 0, s);
      const std::vector pairs{reliability_ratio(counts)};
      const std::vector singles{decide_single(counts)};
      const auto d = fuse_mdrr(pairs, singles, mdrr_config(vec({1.0}), 0.5));
      REQUIRE_FALSE(d.fallback_used);
      REQUIRE(d.label == singles[0]);
    }
  }

  TEST_CASE("lambda extremes") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto in = random_mdrr_inputs(rng);
      const auto never = fuse_mdrr(in.pairs, in.singles, mdrr_config(in.weights, 0.999));
      REQUIRE_FALSE(never.fallback_used);
      const auto always = fuse_mdrr(
          in.pairs, in.singles,
          mdrr_config(in.weights, std::numeric_limits<double>::infinity()));
      REQUIRE(always.fallback_used);
      REQUIRE(always.label == fuse_weighted_voting(in.singles, in.weights));
    }
  }
}

TEST_SUITE("calibration and evaluation") {
  TEST_CASE("every strategy matches the linear-scan reference") {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 1 + rng() % 3;
      const auto train = testing::random_dataset(rng, n, 2 + rng() % 19, 2 + rng() % 19);
      const auto test = testing::random_dataset(rng, n, 1 + rng() % 25, 1 + rng() % 25, "t");
      const auto model = build_model(train);
      const auto cal = calibrate(train);
      const reference::Pipeline ref(train);
      for (auto strategy : {Strategy::Mdrr, Strategy::Vote, Strategy::WeightedVote,
                            Strategy::Sum, Strategy::WeightedSum}) {
        const auto cfg = make_config(cal, strategy, 2.0);
        for (const auto& s : test.samples) {
          REQUIRE(fuse_sample(s.scores, model, cfg).label == ref.decide(s.scores, strategy, 2.0));
        }
      }
    }
  }

  TEST_CASE("separable data gives zero error everywhere") {
    const auto train = testing::single_classifier({0.8, 0.9, 0.85}, {0.1, 0.2, 0.3});
    const auto test = testing::single_classifier({0.8, 0.9}, {0.1, 0.3});
    const auto model = build_model(train);
    const auto cal = calibrate(train);
    CHECK(cal.training_eers[0] == 0.0);
    CHECK(cal.weights(0) == 1.0);
    CHECK(evaluate_individual(test, 0, cal.decision_thresholds(0)).rates.hter == 0.0);
    for (auto strategy : {Strategy::Mdrr, Strategy::Vote, Strategy::WeightedVote,
                          Strategy::Sum, Strategy::WeightedSum}) {
      const auto r = evaluate_strategy(test, model, make_config(cal, strategy));
      CHECK(r.rates.hter == 0.0);
      CHECK(r.name == strategy_name(strategy));
    }
  }

  TEST_CASE("sum strategies carry a ROC, vote strategies do not") {
    std::mt19937_64 rng(46);
    const auto train = testing::random_dataset(rng, 2, 20, 30);
    const auto test = testing::random_dataset(rng, 2, 20, 30, "t");
    const auto model = build_model(train);
    const auto cal = calibrate(train);
    const auto sum = evaluate_strategy(test, model, make_config(cal, Strategy::Sum));
    CHECK(sum.eer.has_value());
    CHECK_FALSE(sum.roc.empty());
    const auto vote = evaluate_strategy(test, model, make_config(cal, Strategy::Vote));
    CHECK_FALSE(vote.eer.has_value());
    CHECK(vote.roc.empty());
  }

  TEST_CASE("invalid configs are rejected") {
    std::mt19937_64 rng(47);
    const auto train = testing::random_dataset(rng, 2, 10, 10);
    const auto model = build_model(train);
    const auto cal = calibrate(train);
    auto cfg = make_config(cal, Strategy::Mdrr);
    cfg.weights = vec({0.7, 0.7});
    CHECK_THROWS_AS(evaluate_strategy(train, model, cfg), InvalidConfig);
    cfg = make_config(cal, Strategy::Mdrr, 0.0);
    CHECK_THROWS_AS(evaluate_strategy(train, model, cfg), InvalidConfig);
    cfg = make_config(cal, Strategy::Sum);
    cfg.minmax[1] = {0.5, 0.5};
    CHECK_THROWS_AS(validate_config(cfg, 2), InvalidConfig);
  }

  TEST_CASE("explicit weights are kept") {
    std::mt19937_64 rng(48);
    const auto train = testing::random_dataset(rng, 2, 10, 10);
    const auto cal = calibrate(train, vec({0.25, 0.75}));
    CHECK(cal.weights == vec({0.25, 0.75}));
    CHECK_THROWS_AS(calibrate(train, vec({1.0})), InvalidConfig);
  }
}
