#include "fusebench/io.hpp"

#include "fusebench/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fusebench {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_score(std::string_view text) {
  std::size_t lead = (!text.empty() && text.front() == '-') ? 1 : 0;
  if (text.size() <= lead ||
      !std::isdigit(static_cast<unsigned char>(text[lead]))) {
    return std::nullopt;
  }
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

constexpr std::string_view kScorePrefix = "score_";

}  // namespace

Dataset parse_scores(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < text.size();) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw EmptyFile("score file is empty");

  const auto header = split_fields(lines.front());
  if (header.size() < 3 || header[0] != "pattern_id" || header[1] != "label") {
    throw MissingHeader(
        "expected header 'pattern_id,label,score_<name>[,score_<name>...]'");
  }
  std::vector<std::string> names;
  for (std::size_t c = 2; c < header.size(); ++c) {
    const auto field = header[c];
    if (!field.starts_with(kScorePrefix) || field.size() == kScorePrefix.size()) {
      throw ParseError(1, c + 1, "score column must be named score_<classifier>");
    }
    names.emplace_back(field.substr(kScorePrefix.size()));
  }
  ClassifierRegistry registry = [&] {
    try {
      return ClassifierRegistry(names);
    } catch (const std::invalid_argument& e) {
      throw ParseError(1, 1, e.what());
    }
  }();

  const auto n = static_cast<Eigen::Index>(names.size());
  std::vector<ScoreSample> samples;
  samples.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto line_no = li + 1;
    if (lines[li].empty()) continue;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, std::min(fields.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(fields.size()));
    }
    ScoreSample sample;
    if (fields[0].empty()) throw ParseError(line_no, 1, "empty pattern_id");
    sample.pattern_id = std::string(fields[0]);
    if (fields[1] == "genuine") {
      sample.label = Label::Genuine;
    } else if (fields[1] == "imposter") {
      sample.label = Label::Imposter;
    } else {
      throw ParseError(line_no, 2,
                       "label must be 'genuine' or 'imposter', got '" +
                           std::string(fields[1]) + "'");
    }
    sample.scores.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto column = static_cast<std::size_t>(i) + 3;
      const auto value = parse_score(fields[column - 1]);
      if (!value) {
        throw ParseError(line_no, column,
                         "invalid score '" + std::string(fields[column - 1]) + "'");
      }
      sample.scores(i) = *value;
    }
    samples.push_back(std::move(sample));
  }
  return make_dataset(std::move(registry), std::move(samples));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

Dataset load_scores(const std::filesystem::path& path) {
  return parse_scores(read_text_file(path));
}

void write_scores(std::ostream& out, const Dataset& dataset) {
  out << "pattern_id,label";
  for (const auto& name : dataset.registry.names()) out << ',' << kScorePrefix << name;
  out << '\n';
  for (const auto& s : dataset.samples) {
    out << s.pattern_id << ',' << to_string(s.label);
    for (Eigen::Index i = 0; i < s.scores.size(); ++i) {
      out << ',' << format_double(s.scores(i));
    }
    out << '\n';
  }
}

void save_scores(const std::filesystem::path& path, const Dataset& dataset) {
  std::ostringstream ss;
  write_scores(ss, dataset);
  write_text_file(path, ss.str());
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(what + " is not valid JSON: " + e.what());
  }
}

}  // namespace

json model_to_json(const TrainedModel& model) {
  const auto& rel = model.reliability;
  json classifiers = json::array();
  for (std::size_t i = 0; i < rel.size(); ++i) {
    const auto& t = rel.table(i);
    classifiers.push_back({{"name", rel.registry().name(i)},
                           {"n_genuine", t.n_genuine()},
                           {"n_imposter", t.n_imposter()},
                           {"genuine_sorted", t.genuine_sorted},
                           {"imposter_sorted", t.imposter_sorted}});
  }
  const auto& cal = model.calibration;
  json minmax = json::array();
  for (const auto& r : cal.minmax) minmax.push_back({r.min, r.max});
  return {{"version", kModelVersion},
          {"smoothing", ReliabilityModel::kSmoothing},
          {"classifiers", classifiers},
          {"calibration",
           {{"threshold_policy", kThresholdPolicy},
            {"training_eers", cal.training_eers},
            {"decision_thresholds", vector_to_json(cal.decision_thresholds)},
            {"minmax", minmax},
            {"weights", vector_to_json(cal.weights)},
            {"sum_threshold", cal.sum_threshold},
            {"wsum_threshold", cal.wsum_threshold}}}};
}

TrainedModel model_from_json(const json& doc) {
  try {
    if (doc.at("version").get<std::string>() != kModelVersion) {
      throw InvalidModel("unsupported model version '" +
                         doc.at("version").get<std::string>() + "'");
    }
    if (doc.at("smoothing").get<std::string>() != ReliabilityModel::kSmoothing) {
      throw InvalidModel("unsupported smoothing scheme '" +
                         doc.at("smoothing").get<std::string>() + "'");
    }
    std::vector<std::string> names;
    std::vector<ClassifierTable> tables;
    for (const auto& c : doc.at("classifiers")) {
      names.push_back(c.at("name").get<std::string>());
      ClassifierTable t{c.at("genuine_sorted").get<std::vector<double>>(),
                        c.at("imposter_sorted").get<std::vector<double>>()};
      if (c.at("n_genuine").get<std::size_t>() != t.n_genuine() ||
          c.at("n_imposter").get<std::size_t>() != t.n_imposter()) {
        throw InvalidModel("classifier '" + names.back() +
                           "': counts disagree with score arrays");
      }
      tables.push_back(std::move(t));
    }
    TrainedModel model;
    try {
      model.reliability =
          ReliabilityModel(ClassifierRegistry(std::move(names)), std::move(tables));
    } catch (const std::invalid_argument& e) {
      throw InvalidModel(e.what());
    }

    const auto& cal = doc.at("calibration");
    if (cal.at("threshold_policy").get<std::string>() != kThresholdPolicy) {
      throw InvalidModel("unsupported threshold policy");
    }
    auto& out = model.calibration;
    out.training_eers = cal.at("training_eers").get<std::vector<double>>();
    out.decision_thresholds = vector_from_json(cal.at("decision_thresholds"));
    for (const auto& r : cal.at("minmax")) {
      out.minmax.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    }
    out.weights = vector_from_json(cal.at("weights"));
    out.sum_threshold = cal.at("sum_threshold").get<double>();
    out.wsum_threshold = cal.at("wsum_threshold").get<double>();

    const auto n = model.reliability.size();
    if (out.training_eers.size() != n ||
        out.decision_thresholds.size() != static_cast<Eigen::Index>(n) ||
        out.minmax.size() != n || out.weights.size() != static_cast<Eigen::Index>(n)) {
      throw InvalidModel("calibration arrays do not match the classifier count");
    }
    return model;
  } catch (const json::exception& e) {
    throw InvalidModel(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  write_text_file(path, model_to_json(model).dump(1) + "\n");
}

TrainedModel load_model(const std::filesystem::path& path) {
  return model_from_json(parse_json_text(read_text_file(path), path.string()));
}

std::vector<Strategy> parse_strategy_list(std::string_view text) {
  std::vector<Strategy> out;
  for (auto field : split_fields(text)) {
    const auto s = parse_strategy(field);
    if (!s) {
      throw InvalidConfig("unknown strategy '" + std::string(field) +
                          "' (expected mdrr, vote, wvote, sum or wsum)");
    }
    if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
  }
  return out;
}

RunConfig config_from_json(const json& doc) {
  try {
    RunConfig config;
    if (doc.contains("strategies")) {
      config.strategies.clear();
      for (const auto& s : doc.at("strategies")) {
        const auto parsed = parse_strategy(s.get<std::string>());
        if (!parsed) {
          throw InvalidConfig("unknown strategy '" + s.get<std::string>() + "'");
        }
        config.strategies.push_back(*parsed);
      }
      if (config.strategies.empty()) throw InvalidConfig("strategy list is empty");
    }
    if (doc.contains("weights")) {
      const auto& w = doc.at("weights");
      if (w.is_string()) {
        if (w.get<std::string>() != "auto") {
          throw InvalidConfig("weights must be \"auto\" or a list of numbers");
        }
      } else {
        config.weights = vector_from_json(w);
        const auto& v = *config.weights;
        if (v.size() == 0 || (v.array() <= 0.0).any() ||
            std::abs(v.sum() - 1.0) > 1e-9) {
          throw InvalidConfig("weights must be positive and sum to 1");
        }
      }
    }
    if (doc.contains("lambda")) {
      config.lambda = doc.at("lambda").get<double>();
      if (!(config.lambda > 0.0)) throw InvalidConfig("lambda must be positive");
    }
    for (const char* key : {"decision_thresholds", "fused_threshold"}) {
      if (doc.contains(key) && doc.at(key).get<std::string>() != kThresholdPolicy) {
        throw InvalidConfig(std::string(key) + " policy must be \"" +
                            std::string(kThresholdPolicy) + "\"");
      }
    }
    return config;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed config: ") + e.what());
  }
}

json config_to_json(const RunConfig& config) {
  json strategies = json::array();
  for (auto s : config.strategies) strategies.push_back(strategy_name(s));
  return {{"strategies", strategies},
          {"weights", config.weights ? vector_to_json(*config.weights) : json("auto")},
          {"lambda", config.lambda},
          {"decision_thresholds", kThresholdPolicy},
          {"fused_threshold", kThresholdPolicy}};
}

RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(parse_json_text(read_text_file(path), path.string()));
}

SynthSpec synth_spec_from_json(const json& doc) {
  try {
    SynthSpec spec;
    spec.seed = doc.at("seed").get<std::uint64_t>();
    spec.correlation = doc.at("correlation").get<double>();
    for (const auto& c : doc.at("classifiers")) {
      auto dist = [](const json& d) {
        return ScoreDistribution{d.at("location").get<double>(),
                                 d.at("spread").get<double>()};
      };
      spec.classifiers.push_back({c.at("name").get<std::string>(),
                                  dist(c.at("genuine")), dist(c.at("imposter"))});
    }
    auto split = [](const json& s) {
      return SplitCounts{s.at("genuine").get<std::size_t>(),
                         s.at("imposter").get<std::size_t>()};
    };
    spec.train = split(doc.at("train"));
    spec.test = split(doc.at("test"));
    validate_spec(spec);
    return spec;
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("malformed synth spec: ") + e.what());
  }
}

json synth_spec_to_json(const SynthSpec& spec) {
  json classifiers = json::array();
  for (const auto& c : spec.classifiers) {
    classifiers.push_back(
        {{"name", c.name},
         {"genuine", {{"location", c.genuine.location}, {"spread", c.genuine.spread}}},
         {"imposter",
          {{"location", c.imposter.location}, {"spread", c.imposter.spread}}}});
  }
  return {{"seed", spec.seed},
          {"correlation", spec.correlation},
          {"classifiers", classifiers},
          {"train", {{"genuine", spec.train.genuine}, {"imposter", spec.train.imposter}}},
          {"test", {{"genuine", spec.test.genuine}, {"imposter", spec.test.imposter}}}};
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  return synth_spec_from_json(parse_json_text(read_text_file(path), path.string()));
}

json report_to_json(const EvaluationReport& report, double lambda) {
  json rows = json::array();
  for (const auto& s : report.strategies) {
    json row = {{"name", s.name},
                {"fa", s.counts.fa},
                {"fr", s.counts.fr},
                {"n_genuine", s.counts.n_genuine},
                {"n_imposter", s.counts.n_imposter},
                {"far", s.rates.far},
                {"frr", s.rates.frr},
                {"hter", s.rates.hter}};
    if (s.eer) row["eer"] = *s.eer;
    rows.push_back(std::move(row));
  }
  return {{"version", kReportVersion}, {"lambda", lambda}, {"strategies", rows}};
}

std::string format_report_table(const EvaluationReport& report) {
  const std::vector<std::string> row_names{"FA number", "FAR", "FR number", "FRR",
                                           "HTER"};
  std::vector<std::vector<std::string>> cells;  // [column][row]
  for (const auto& s : report.strategies) {
    cells.push_back({std::to_string(s.counts.fa), format_percent(s.rates.far) + "%",
                     std::to_string(s.counts.fr), format_percent(s.rates.frr) + "%",
                     format_percent(s.rates.hter) + "%"});
  }
  std::size_t label_width = 0;
  for (const auto& r : row_names) label_width = std::max(label_width, r.size());

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(label_width)) << "" << std::right;
  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::size_t w = report.strategies[c].name.size();
    for (const auto& cell : cells[c]) w = std::max(w, cell.size());
    widths.push_back(w);
    out << "  " << std::setw(static_cast<int>(w)) << report.strategies[c].name;
  }
  out << '\n';
  for (std::size_t r = 0; r < row_names.size(); ++r) {
    out << std::left << std::setw(static_cast<int>(label_width)) << row_names[r]
        << std::right;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << "  " << std::setw(static_cast<int>(widths[c])) << cells[c][r];
    }
    out << '\n';
  }
  return out.str();
}

void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& roc) {
  out << "threshold,far,frr\n";
  for (const auto& p : roc) {
    out << format_double(p.threshold) << ',' << format_double(p.far) << ','
        << format_double(p.frr) << '\n';
  }
}

}  // namespace fusebench
