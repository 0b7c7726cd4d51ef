#include "cli.h"

#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fairaudit/bias.h"
#include "fairaudit/config.h"
#include "fairaudit/csv.h"
#include "fairaudit/datagen.h"
#include "fairaudit/error.h"
#include "fairaudit/harness.h"
#include "fairaudit/metrics.h"

namespace fairaudit::cli {
namespace {

// Usage problems detected by the CLI itself.
class UsageError : public Error {
 public:
  using Error::Error;
};

ExperimentConfig ResolveConfig(const Options& o, ExperimentKind fallback) {
  ExperimentConfig c = o.config ? LoadConfig(*o.config) : DefaultConfig(fallback);
  if (o.seed) {
    c.population.seed = *o.seed;
    c.base_seed = *o.seed;
  }
  if (o.trials) c.trials = *o.trials;
  if (o.threads) c.threads = *o.threads;
  try {
    c.Validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

const std::filesystem::path& RequirePath(
    const std::optional<std::filesystem::path>& p, const char* flag) {
  if (!p || p->empty()) throw UsageError(std::string(flag) + " is required");
  return *p;
}

// Writes the whole payload at once so failures never leave partial files.
void WriteFile(const std::filesystem::path& path, const std::string& payload) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open " + path.string() + " for writing");
  f << payload;
  f.close();
  if (!f) throw UsageError("failed writing " + path.string());
}

void Emit(const std::optional<std::filesystem::path>& path,
          const std::string& payload, std::ostream& out) {
  if (path && !path->empty()) {
    WriteFile(*path, payload);
  } else {
    out << payload;
  }
}

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open " + path.string());
  return f;
}

void CheckFormat(const std::string& format) {
  if (format != "json" && format != "csv") {
    throw UsageError("--format must be json or csv, got '" + format + "'");
  }
}

int Guard(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DegenerateDatasetError& e) {
    err << "degenerate dataset: " << e.what() << '\n';
    return kData;
  } catch (const ExperimentError& e) {
    err << "experiment failed: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
}

std::string SummaryTable(const PopulationSummary& s) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "group" << std::right << std::setw(10)
     << "n" << std::setw(12) << "positives" << std::setw(10) << "rate"
     << '\n';
  for (Group g : {Group::kProtected, Group::kReference}) {
    const int gi = Index(g);
    os << std::left << std::setw(8) << gi << std::right << std::setw(10)
       << s.GroupSize(g) << std::setw(12) << s.counts[gi][1] << std::setw(10)
       << std::fixed << std::setprecision(4) << s.PositiveRate(g) << '\n';
  }
  return os.str();
}

std::vector<Outcome> ReadPredictions(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::SplitRow(line) == std::vector<std::string_view>{""}) {
    throw DataError("empty input, expected a header", 1);
  }
  const auto header = csv::SplitRow(line);
  std::map<std::string, std::size_t, std::less<>> column;
  for (std::size_t i = 0; i < header.size(); ++i) column.emplace(header[i], i);
  std::array<std::size_t, 4> idx{};
  const std::array<const char*, 4> names = {"group", "label", "score_hat",
                                            "label_hat"};
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto it = column.find(names[k]);
    if (it == column.end()) {
      throw DataError(std::string("missing column '") + names[k] + "'", 1);
    }
    idx[k] = it->second;
  }

  std::vector<Outcome> data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = csv::SplitRow(line);
    if (fields.size() != header.size()) {
      throw DataError("expected " + std::to_string(header.size()) +
                          " fields, got " + std::to_string(fields.size()),
                      lineno);
    }
    Outcome o;
    o.group = GroupFromIndex(csv::ParseBit(fields[idx[0]], lineno));
    o.label = csv::ParseBit(fields[idx[1]], lineno);
    o.score_hat = csv::ParseReal(fields[idx[2]], lineno);
    o.label_hat = csv::ParseBit(fields[idx[3]], lineno);
    data.push_back(o);
  }
  if (data.empty()) throw DataError("no records after the header", 2);
  return data;
}

std::string ReportCsv(const MetricReport& r) {
  std::ostringstream os;
  os << "metric,value,status,detail\n";
  for (Metric m : kAllMetrics) {
    const MetricValue& v = r.values[static_cast<int>(m)];
    os << MetricName(m) << ',' << (v.value ? csv::FormatReal(*v.value) : "")
       << ',' << StatusName(v.status) << ',' << v.detail << '\n';
  }
  return os.str();
}

std::string MeansTable(const ExperimentReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "metric";
  for (int d = 1; d <= 4; ++d) os << std::right << std::setw(20) << ("D" + std::to_string(d));
  os << '\n';
  for (Metric m : kAllMetrics) {
    os << std::left << std::setw(28) << MetricName(m);
    for (int d = 1; d <= 4; ++d) {
      const MetricAggregate& a = r.Dataset(d)[m];
      std::ostringstream cell;
      if (a.mean) {
        cell << std::fixed << std::setprecision(4) << *a.mean << " ("
             << *a.stddev << ")";
      } else {
        cell << "undefined";
      }
      os << std::right << std::setw(20) << cell.str();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

int CmdGenerate(const Options& o, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const ExperimentConfig c = ResolveConfig(o, ExperimentKind::kB);
    const auto& path = RequirePath(o.out, "--out");
    const auto pop = GeneratePopulation(c.population);
    std::ostringstream payload;
    WritePopulationCsv(payload, pop);
    WriteFile(path, payload.str());
    out << SummaryTable(Summarize(pop));
    return kOk;
  });
}

int CmdBuild(const Options& o, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const ExperimentConfig c = ResolveConfig(o, ExperimentKind::kB);
    std::vector<ScoredRecord> base;
    if (o.in) {
      std::ifstream f = OpenInput(*o.in);
      base = ReadPopulationCsv(f);
    } else {
      base = BuildBase(c);
    }
    const BiasSpec spec{o.sample_bias, o.label_bias};
    const auto data = BuildDataset(base, spec, c.base_seed, c.policies);
    std::ostringstream payload;
    WriteLabeledCsv(payload, data);
    Emit(o.out, payload.str(), out);
    if (o.out) {
      const CellCounts cells = CountCells(data);
      out << "dataset " << spec.DatasetIndex() << ": " << data.size()
          << " records";
      for (int g = 0; g < 2; ++g) {
        for (int y = 0; y < 2; ++y) {
          out << ", (group=" << g << ", label=" << y << ") "
              << cells.counts[g][y];
        }
      }
      out << '\n';
    }
    return kOk;
  });
}

int CmdAudit(const Options& o, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    CheckFormat(o.format);
    std::ifstream f = OpenInput(RequirePath(o.in, "--in"));
    const auto data = ReadPredictions(f);
    const MetricReport report = Audit(data);
    const std::string payload = o.format == "csv"
                                    ? ReportCsv(report)
                                    : nlohmann::json(report).dump(2) + "\n";
    Emit(o.out, payload, out);
    return kOk;
  });
}

int CmdExperiment(const Options& o, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const ExperimentConfig c = ResolveConfig(o, ExperimentKind::kA);
    std::filesystem::path json_path = RequirePath(o.out, "--out");
    std::filesystem::path csv_path = json_path;
    csv_path.replace_extension(".csv");
    if (csv_path == json_path) json_path.replace_extension(".json");

    const ExperimentReport report = RunExperiment(c);
    std::ostringstream rows;
    WriteReportCsv(rows, report);
    WriteFile(json_path, nlohmann::json(report).dump(2) + "\n");
    WriteFile(csv_path, rows.str());

    out << "experiment " << KindName(c.kind) << ", " << c.trials
        << " trials per dataset\n"
        << MeansTable(report);
    for (const DatasetResult& d : report.datasets) {
      if (d.failed_trials > 0) {
        out << "dataset " << d.spec.DatasetIndex() << ": " << d.failed_trials
            << " failed trials\n";
      }
    }
    return kOk;
  });
}

int CmdRank(const Options& o, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    CheckFormat(o.format);
    std::ifstream f = OpenInput(RequirePath(o.in, "--in"));
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("not a JSON report: ") + e.what());
    }

    std::vector<Metric> metrics;
    if (o.metric == "all") {
      metrics.assign(kAllMetrics.begin(), kAllMetrics.end());
    } else if (auto m = MetricFromName(o.metric)) {
      metrics.push_back(*m);
    } else {
      throw UsageError("unknown metric '" + o.metric + "'");
    }

    nlohmann::json as_json = nlohmann::json::object();
    std::ostringstream rows;
    rows << "metric,rank,dataset\n";
    for (Metric m : metrics) {
      std::array<std::optional<double>, 4> means;
      try {
        const auto& datasets = report.at("datasets");
        if (datasets.size() != 4) throw DataError("report must have 4 datasets");
        for (const auto& d : datasets) {
          const int index = d.at("dataset").get<int>();
          if (index < 1 || index > 4) throw DataError("dataset index out of range");
          const auto& mean = d.at("metrics").at(std::string(MetricName(m))).at("mean");
          if (!mean.is_null()) means[index - 1] = mean.get<double>();
        }
      } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
      }
      const Ranking r = RankByDeviation(means, m);
      as_json[std::string(MetricName(m))] = {{"order", r.order},
                                             {"excluded", r.excluded}};
      for (std::size_t k = 0; k < r.order.size(); ++k) {
        rows << MetricName(m) << ',' << k + 1 << ',' << r.order[k] << '\n';
      }
      for (int d : r.excluded) rows << MetricName(m) << ",," << d << '\n';
    }
    Emit(o.out, o.format == "json" ? as_json.dump(2) + "\n" : rows.str(), out);
    return kOk;
  });
}

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Fairness audit toolkit: synthetic populations, bias injection, "
               "model fitting and fairness metrics"};
  app.require_subcommand(1);
  Options o;

  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI experiment configuration");
    sub->add_option("--seed", o.seed, "Override population and trial seeds");
  };

  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic scored population");
  add_config(generate);
  generate->add_option("--out", o.out, "Population CSV path")->required();

  CLI::App* build = app.add_subcommand("build", "Apply sample and/or label bias");
  add_config(build);
  build->add_option("--in", o.in, "Population CSV (default: generate from config)");
  build->add_option("--out", o.out, "Labeled dataset CSV (default: stdout)");
  build->add_flag("--sample-bias", o.sample_bias, "Use the biased sampling policy");
  build->add_flag("--label-bias", o.label_bias, "Use the biased labeling policy");

  CLI::App* audit = app.add_subcommand("audit", "Compute fairness metrics for predictions");
  audit->add_option("--in", o.in, "CSV with group,label,score_hat,label_hat")->required();
  audit->add_option("--out", o.out, "Report path (default: stdout)");
  audit->add_option("--format", o.format, "json or csv");

  CLI::App* experiment = app.add_subcommand("experiment", "Run the 2x2 bias grid");
  add_config(experiment);
  experiment->add_option("--out", o.out, "Report JSON path; CSV goes next to it")->required();
  experiment->add_option("--trials", o.trials, "Trials per dataset");
  experiment->add_option("--threads", o.threads, "Worker threads (0: all cores)");

  CLI::App* rank = app.add_subcommand("rank", "Rank datasets of a report by bias");
  rank->add_option("--in", o.in, "Experiment report JSON")->required();
  rank->add_option("--metric", o.metric, "Metric name or 'all'");
  rank->add_option("--out", o.out, "Output path (default: stdout)");
  rank->add_option("--format", o.format, "json or csv (rows of metric,rank,dataset)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (*generate) return CmdGenerate(o, out, err);
  if (*build) return CmdBuild(o, out, err);
  if (*audit) return CmdAudit(o, out, err);
  if (*experiment) return CmdExperiment(o, out, err);
  return CmdRank(o, out, err);
}

}  // namespace fairaudit::cli
