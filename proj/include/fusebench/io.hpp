#pragma once

#include "fusebench/core_model.hpp"
#include "fusebench/fusion.hpp"
#include "fusebench/metrics.hpp"
#include "fusebench/reliability.hpp"
#include "fusebench/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fusebench {

inline constexpr std::string_view kModelVersion = "fusebench-model/1";
inline constexpr std::string_view kReportVersion = "fusebench-report/1";
inline constexpr std::string_view kThresholdPolicy = "training-eer";

// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

// Accepts an optional '-', then a digit, then standard decimal or exponent
// notation, consuming the whole field. Rejects inf, nan and anything
// non-finite.
std::optional<double> parse_score(std::string_view text);

// Score CSV: `pattern_id,label,score_<name>[,score_<name>...]`, LF or CRLF.
// Throws EmptyFile, MissingHeader or ParseError (1-based line and column).
Dataset parse_scores(std::string_view text);
Dataset load_scores(const std::filesystem::path& path);
void write_scores(std::ostream& out, const Dataset& dataset);
void save_scores(const std::filesystem::path& path, const Dataset& dataset);

struct TrainedModel {
  ReliabilityModel reliability;
  Calibration calibration;
};

nlohmann::json model_to_json(const TrainedModel& model);
// Throws InvalidModel on a wrong version tag, smoothing tag or shape.
TrainedModel model_from_json(const nlohmann::json& doc);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

struct RunConfig {
  std::vector<Strategy> strategies{Strategy::Mdrr, Strategy::Vote,
                                   Strategy::WeightedVote, Strategy::Sum,
                                   Strategy::WeightedSum};
  std::optional<Eigen::VectorXd> weights;  // nullopt means "auto"
  double lambda = 2.0;
};

// Throws InvalidConfig.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

// Throws InvalidSpec.
SynthSpec synth_spec_from_json(const nlohmann::json& doc);
nlohmann::json synth_spec_to_json(const SynthSpec& spec);
SynthSpec load_synth_spec(const std::filesystem::path& path);

// Comma-separated strategy names. Throws InvalidConfig on an unknown name.
std::vector<Strategy> parse_strategy_list(std::string_view text);

nlohmann::json report_to_json(const EvaluationReport& report, double lambda);

// Rows FA number, FAR, FR number, FRR, HTER; one column per strategy.
std::string format_report_table(const EvaluationReport& report);

// `threshold,far,frr` header, one full-precision row per point.
void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& roc);

// Text of `path`. Throws Error if it cannot be read.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace fusebench
