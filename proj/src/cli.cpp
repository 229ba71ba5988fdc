#include "fusebench/cli.hpp"

#include "fusebench/errors.hpp"
#include "fusebench/fusion.hpp"
#include "fusebench/io.hpp"
#include "fusebench/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace fusebench {

namespace {

// Wrong flags or values that are caught after CLI11 has parsed.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void warn_duplicates(const Dataset& data, const std::string& path,
                     std::ostream& err) {
  const auto result = validate_dataset(data);
  std::size_t duplicates = 0;
  for (const auto& v : result.violations) {
    if (v.kind == ViolationKind::DuplicatePatternId) ++duplicates;
  }
  if (duplicates > 0) {
    err << "warning: " << path << ": " << duplicates << " repeated pattern ids\n";
  }
}

Dataset load_checked(const std::string& path, std::ostream& err) {
  auto data = load_scores(path);
  warn_duplicates(data, path, err);
  return data;
}

struct SynthArgs {
  std::string spec;
  std::string out_train;
  std::string out_test;
  std::optional<std::uint64_t> seed_override;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  auto spec = load_synth_spec(a.spec);
  if (a.seed_override) spec.seed = *a.seed_override;
  const auto bench = generate(spec);
  save_scores(a.out_train, bench.train);
  save_scores(a.out_test, bench.test);
  out << "wrote " << bench.train.size() << " training samples to " << a.out_train
      << " and " << bench.test.size() << " test samples to " << a.out_test << '\n';
  return kExitOk;
}

struct TrainArgs {
  std::string scores;
  std::string model;
  std::string config;
};

int run_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const auto train = load_checked(a.scores, err);
  std::optional<Eigen::VectorXd> weights;
  if (!a.config.empty()) weights = load_config(a.config).weights;

  TrainedModel model{build_model(train), calibrate(train, weights)};
  save_model(a.model, model);

  const auto& cal = model.calibration;
  out << std::left << std::setw(12) << "classifier" << std::right
      << std::setw(12) << "train EER" << std::setw(14) << "threshold"
      << std::setw(12) << "weight" << '\n';
  for (std::size_t i = 0; i < train.classifier_count(); ++i) {
    out << std::left << std::setw(12) << train.registry.name(i) << std::right
        << std::setw(11) << format_percent(cal.training_eers[i]) << '%'
        << std::fixed << std::setprecision(6) << std::setw(14)
        << cal.decision_thresholds(static_cast<Eigen::Index>(i))
        << std::setprecision(4) << std::setw(12)
        << cal.weights(static_cast<Eigen::Index>(i)) << std::defaultfloat << '\n';
  }
  out << "model written to " << a.model << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string scores;
  std::string model;
  std::string config;
  std::string strategies;
  std::optional<double> lambda;
  std::string report;
  std::string roc_dir;
};

int run_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig config = a.config.empty() ? RunConfig{} : load_config(a.config);
  if (!a.strategies.empty()) {
    try {
      config.strategies = parse_strategy_list(a.strategies);
    } catch (const InvalidConfig& e) {
      throw UsageError(e.what());
    }
  }
  if (a.lambda) config.lambda = *a.lambda;

  const auto model = load_model(a.model);
  const auto test = load_checked(a.scores, err);
  if (test.registry != model.reliability.registry()) {
    throw InvalidModel("test score columns do not match the model's classifiers");
  }
  if (config.weights &&
      !config.weights->isApprox(model.calibration.weights, 1e-12)) {
    throw InvalidConfig(
        "weights are fixed at training time; pass this config to 'train' instead");
  }

  EvaluationReport report;
  for (std::size_t i = 0; i < test.classifier_count(); ++i) {
    report.strategies.push_back(evaluate_individual(
        test, i,
        model.calibration.decision_thresholds(static_cast<Eigen::Index>(i))));
  }
  for (auto strategy : config.strategies) {
    report.strategies.push_back(evaluate_strategy(
        test, model.reliability,
        make_config(model.calibration, strategy, config.lambda)));
  }

  out << format_report_table(report);
  if (!a.report.empty()) {
    write_text_file(a.report, report_to_json(report, config.lambda).dump(2) + "\n");
  }
  if (!a.roc_dir.empty()) {
    std::filesystem::create_directories(a.roc_dir);
    for (const auto& s : report.strategies) {
      if (s.roc.empty()) continue;
      std::ostringstream csv;
      write_roc_csv(csv, s.roc);
      write_text_file(std::filesystem::path(a.roc_dir) / ("roc_" + s.name + ".csv"),
                      csv.str());
    }
  }
  return kExitOk;
}

struct WeightsArgs {
  std::string scores;
  std::vector<double> eers;
};

int run_weights(const WeightsArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names;
  std::vector<double> eers;
  if (!a.scores.empty()) {
    const auto train = load_checked(a.scores, err);
    const auto cal = calibrate(train);
    names = train.registry.names();
    eers = cal.training_eers;
  } else {
    eers = a.eers;
    for (std::size_t i = 0; i < eers.size(); ++i) {
      names.push_back("c" + std::to_string(i + 1));
    }
  }
  const auto weights = compute_weights(eers);
  for (std::size_t i = 0; i < eers.size(); ++i) {
    out << names[i] << ' ' << format_double(eers[i]) << ' '
        << format_double(weights(static_cast<Eigen::Index>(i))) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Decision-level fusion of verification classifiers"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic benchmark");
  synth->add_option("--spec", synth_args.spec, "Synth spec JSON")->required();
  synth->add_option("--out-train", synth_args.out_train, "Training CSV output")->required();
  synth->add_option("--out-test", synth_args.out_test, "Test CSV output")->required();
  synth->add_option("--seed-override", synth_args.seed_override, "Replace the spec seed");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Build a reliability model from training scores");
  train->add_option("--scores", train_args.scores, "Training score CSV")->required();
  train->add_option("--model", train_args.model, "Model JSON output")->required();
  train->add_option("--config", train_args.config, "Config JSON (weights)");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate fusion strategies on test scores");
  eval->add_option("--scores", eval_args.scores, "Test score CSV")->required();
  eval->add_option("--model", eval_args.model, "Model JSON from 'train'")->required();
  eval->add_option("--config", eval_args.config, "Config JSON");
  eval->add_option("--strategies", eval_args.strategies,
                   "Comma-separated subset of mdrr,vote,wvote,sum,wsum");
  eval->add_option("--lambda", eval_args.lambda, "MDRR gap threshold")
      ->check(CLI::PositiveNumber);
  eval->add_option("--report", eval_args.report, "JSON report output");
  eval->add_option("--roc-dir", eval_args.roc_dir, "Directory for ROC CSVs");

  WeightsArgs weights_args;
  auto* weights = app.add_subcommand("weights", "Print integration weights");
  auto* w_scores = weights->add_option("--scores", weights_args.scores,
                                       "Training score CSV");
  auto* w_eers = weights->add_option("--eers", weights_args.eers,
                                     "Training EERs as fractions")
                     ->delimiter(',');
  w_scores->excludes(w_eers);
  weights->require_option(1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args, out);
    if (train->parsed()) return run_train(train_args, out, err);
    if (eval->parsed()) return run_eval(eval_args, out, err);
    if (weights->parsed()) return run_weights(weights_args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace fusebench
