// muvsim: dataset generation, scoring and report emission.
//
// Exit codes: 0 ok, 1 user error (bad flags, config, paths or files),
// 2 internal error. MUVSIM_THREADS sets the worker count.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "muvsim/dataset_io.hpp"
#include "muvsim/errors.hpp"
#include "muvsim/evaluation.hpp"
#include "muvsim/generation.hpp"
#include "muvsim/muscle_model.hpp"
#include "muvsim/report.hpp"

namespace {

using namespace muvsim;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw IoError("write failed for '" + path + "'");
}

double parse_db(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return kNoiseFree;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ParameterError("bad SNR '" + s + "' (number or inf)");
  return v;
}

struct GenerateArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  bool test_only = false;
  std::vector<int> categories;
  std::optional<std::size_t> count;
  std::vector<std::string> snr;
};

int run_generate(const GenerateArgs& a) {
  GenerationConfig config = a.config.empty() ? GenerationConfig{} : config_from_json(slurp(a.config));
  if (a.seed) config.seed = *a.seed;
  if (a.test_only) config.train.enabled = config.validation.enabled = false;
  if (!a.categories.empty()) config.test.categories = a.categories;
  if (a.count) config.test.per_category = *a.count;
  if (!a.snr.empty()) {
    config.test.noise_db.clear();
    for (const auto& s : a.snr) config.test.noise_db.push_back(parse_db(s));
  }
  const GenerationSummary summary = generate_dataset(config, a.out);

  std::ostringstream line;
  std::size_t sequences = 0, records = 0;
  bool first = true;
  for (const auto& [split, s] : summary.splits) {
    line << (first ? "" : ", ") << to_string(split) << " " << s.sequences << " sequences / "
         << s.records << " records";
    first = false;
    sequences += s.sequences;
    records += s.records;
  }
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", summary.seconds);
  std::cout << "generated " << sequences << " sequences (" << records << " records): " << line.str()
            << " in " << secs << " s\n";
  return 0;
}

int run_evaluate(const std::string& dataset, const std::string& predictions, const std::string& csv,
                 const std::string& svg) {
  const ReportTable table = evaluate(std::filesystem::path(dataset), std::filesystem::path(predictions));
  const std::string text = report_to_csv(table);
  if (csv.empty() || csv == "-") {
    std::cout << text;
  } else {
    spit(csv, text);
  }
  if (!svg.empty()) spit(svg, render_report_svg(table));
  return 0;
}

int run_export(const std::string& dataset, std::size_t index, const std::string& csv,
               const std::string& pgm_dir, const std::vector<int>& frames) {
  const ContainerReader reader(dataset);
  if (reader.kind() != ContainerKind::dataset) throw ParameterError("not a dataset container");
  if (index >= reader.size()) {
    throw ParameterError("index " + std::to_string(index) + " out of range (" +
                         std::to_string(reader.size()) + " records)");
  }
  const SequenceRecord rec = reader.read_record(index);
  if (!csv.empty()) export_signals_csv(rec, csv);
  if (!pgm_dir.empty()) {
    std::filesystem::create_directories(pgm_dir);
    const std::vector<int> which = frames.empty() ? std::vector<int>{0} : frames;
    for (const int f : which) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%04d.pgm", f);
      export_frame_pgm(rec, f, std::filesystem::path(pgm_dir) / name);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic motor-unit velocity sequences: generate, score, report"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write train/validation/test containers");
  generate->add_option("--config", gen.config, "JSON generation config")->check(CLI::ExistingFile);
  generate->add_option("--seed", gen.seed, "Master seed (overrides config)");
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_flag("--test-only", gen.test_only, "Only write the test split");
  generate->add_option("--category", gen.categories, "Test unit-count category (repeatable)");
  generate->add_option("--count", gen.count, "Test sequences per category");
  generate->add_option("--snr", gen.snr, "Test noise level in dB, or inf (repeatable)");

  std::string dataset, predictions, csv, svg, out, pgm_dir;
  std::size_t index = 0;
  std::vector<int> frames;

  auto* eval = app.add_subcommand("evaluate", "Score predictions against a dataset");
  eval->add_option("--dataset", dataset)->required()->check(CLI::ExistingFile);
  eval->add_option("--predictions", predictions)->required()->check(CLI::ExistingFile);
  eval->add_option("--csv", csv, "Report CSV path (stdout if omitted)");
  eval->add_option("--svg", svg, "Optional SVG plot path");

  auto* report = app.add_subcommand("report", "Plot an evaluation CSV as SVG");
  report->add_option("--csv", csv)->required()->check(CLI::ExistingFile);
  report->add_option("--svg", svg)->required();

  auto* truth = app.add_subcommand("truth-predictions",
                                    "Write the dataset's ground truth as a predictions container");
  truth->add_option("--dataset", dataset)->required()->check(CLI::ExistingFile);
  truth->add_option("--out", out)->required();

  auto* exp = app.add_subcommand("export", "Export one record's signals (CSV) and frames (PGM)");
  exp->add_option("--dataset", dataset)->required()->check(CLI::ExistingFile);
  exp->add_option("--index", index)->required();
  exp->add_option("--csv", csv, "Ground-truth signal CSV path");
  exp->add_option("--pgm-dir", pgm_dir, "Directory for PGM frames");
  exp->add_option("--frames", frames, "Frame numbers to export (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*eval) return run_evaluate(dataset, predictions, csv, svg);
    if (*report) {
      spit(svg, render_report_svg(report_from_csv(slurp(csv))));
      return 0;
    }
    if (*truth) {
      write_truth_predictions(dataset, out);
      return 0;
    }
    if (*exp) return run_export(dataset, index, csv, pgm_dir, frames);
  } catch (const muvsim::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
