// Command-line front end: wires the library into reproducible pipeline
// steps. Every subcommand writes byte-identical output for identical inputs
// and flags, whatever the worker count.

#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simtsel/align_stats.hpp"
#include "simtsel/chunking.hpp"
#include "simtsel/corpus.hpp"
#include "simtsel/diagnostics.hpp"
#include "simtsel/digest.hpp"
#include "simtsel/error.hpp"
#include "simtsel/ngram_lm.hpp"
#include "simtsel/pipeline.hpp"
#include "simtsel/sampling.hpp"
#include "simtsel/scoring.hpp"
#include "simtsel/version.hpp"

namespace {

using namespace simtsel;

constexpr uint64_t kTickEvery = 1000000;

class Ticker {
 public:
  explicit Ticker(const char* what) : what_(what) {}
  void tick() {
    if (++count_ % kTickEvery == 0) {
      std::fprintf(stderr, "%s %llu lines...\n", what_,
                   static_cast<unsigned long long>(count_));
    }
  }
  void done() const {
    std::fprintf(stderr, "%s %llu lines\n", what_,
                 static_cast<unsigned long long>(count_));
  }
  uint64_t count() const { return count_; }

 private:
  const char* what_;
  uint64_t count_ = 0;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCategory::io, "cannot open '" + path + "' for reading");
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCategory::io, "cannot open '" + path + "' for writing");
  }
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw Error(ErrorCategory::io, "failed writing '" + path + "'");
  }
}

NgramModel load_model(const std::string& path) {
  auto in = open_input(path);
  return NgramModel::load(in);
}

// Reads one line of whitespace-separated per-token log probabilities.
std::vector<double> parse_token_scores(const std::string& line,
                                       const std::string& path,
                                       uint64_t line_number) {
  std::vector<double> scores;
  size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    double value = 0.0;
    auto res = std::from_chars(line.data() + pos, line.data() + end, value);
    if (res.ec != std::errc() || res.ptr != line.data() + end) {
      throw Error(ErrorCategory::parse,
                  path + " line " + std::to_string(line_number) +
                      ": bad score '" + line.substr(pos, end - pos) + "'");
    }
    scores.push_back(value);
    pos = end;
  }
  return scores;
}

// Plain line reader for passthrough output and score sidecars; enforces the
// same byte cap as the record reader.
class RawLines {
 public:
  RawLines(const std::string& path, size_t max_bytes)
      : in_(open_input(path)), path_(path), max_bytes_(max_bytes) {}

  std::optional<std::string> next() {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_number_;
    if (line.size() > max_bytes_) {
      throw Error(ErrorCategory::bounds,
                  path_ + " line " + std::to_string(line_number_) +
                      ": exceeds byte cap (" + std::to_string(line.size()) +
                      " > " + std::to_string(max_bytes_) + ")");
    }
    return line;
  }

  uint64_t line_number() const { return line_number_; }
  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
  size_t max_bytes_;
  uint64_t line_number_ = 0;
};

struct CommonArgs {
  size_t max_line_bytes = 1 << 20;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--max-line-bytes", args.max_line_bytes,
                  "Reject lines longer than this many bytes")
      ->capture_default_str();
}

// ---------------------------------------------------------------- train-lm

struct TrainLmArgs {
  CommonArgs common;
  std::string corpus;
  std::string out;
  std::string unigram_out;
  unsigned order = 3;
  double backoff = 0.4;
};

int cmd_train_lm(const TrainLmArgs& args) {
  NgramModel model(args.order, args.backoff);
  ReaderOptions options;
  options.max_line_bytes = args.common.max_line_bytes;
  ParallelReader reader(args.corpus, std::nullopt, std::nullopt, options);
  Ticker ticker("trained on");
  while (auto record = reader.next()) {
    model.add(record->source);
    ticker.tick();
  }
  if (model.sentences() == 0) {
    throw Error(ErrorCategory::config, "'" + args.corpus + "' is empty");
  }
  {
    auto out = open_output(args.out);
    model.save(out);
    finish_output(out, args.out);
  }
  if (!args.unigram_out.empty()) {
    auto out = open_output(args.unigram_out);
    model.unigram().save(out);
    finish_output(out, args.unigram_out);
  }
  ticker.done();
  std::ostringstream summary;
  summary << "sentences=" << model.sentences()
          << " tokens=" << model.unigram().total()
          << " types=" << model.unigram().vocab_size();
  for (unsigned k = 1; k <= model.order(); ++k) {
    summary << " grams" << k << "=" << model.ngram_types(k);
  }
  std::cout << summary.str() << "\n";
  return 0;
}

// ------------------------------------------------------------ build-tables

struct BuildTablesArgs {
  CommonArgs common;
  std::string source;
  std::string target;
  std::string align;
  std::string ttable_out;
  std::string entropy_out;
};

int cmd_build_tables(const BuildTablesArgs& args) {
  if (args.ttable_out.empty() && args.entropy_out.empty()) {
    throw Error(ErrorCategory::config,
                "nothing to do: give --ttable-out and/or --entropy-out");
  }
  ReaderOptions options;
  options.max_line_bytes = args.common.max_line_bytes;
  ParallelReader reader(args.source, args.target, args.align, options);
  TranslationTable table;
  Ticker ticker("tabulated");
  while (auto record = reader.next()) {
    table.add(*record);
    ticker.tick();
  }
  if (!args.ttable_out.empty()) {
    auto out = open_output(args.ttable_out);
    table.save(out);
    finish_output(out, args.ttable_out);
  }
  if (!args.entropy_out.empty()) {
    auto entropies = EntropyTable::from_counts(table);
    auto out = open_output(args.entropy_out);
    entropies.save(out);
    finish_output(out, args.entropy_out);
  }
  ticker.done();
  std::cout << "records=" << table.records() << " links=" << table.total_links()
            << " source_types=" << table.source_types() << "\n";
  return 0;
}

// ------------------------------------------------------------------- score

struct ScoreArgs {
  CommonArgs common;
  std::string metric;
  std::string source;
  std::string target;
  std::string align;
  std::string lm;
  std::string entropy;
  std::string external_scores;
  std::string out;
  std::string direction;
  double alpha = 0.5;
  uint32_t k = 3;
  double unknown_entropy = 0.0;
  unsigned workers = 1;
  size_t block_size = kDefaultBlockSize;
};

int cmd_score(const ScoreArgs& args) {
  validate_alpha(args.alpha);
  MetricKind kind;
  kind.family = parse_metric_family(args.metric);
  kind.k = args.k;
  if (kind.k < 1) {
    throw Error(ErrorCategory::config, "k must be at least 1");
  }

  const bool needs_align = kind.family == MetricKind::Family::chunk_align ||
                           kind.family == MetricKind::Family::mono;
  const bool external = !args.external_scores.empty();
  if (needs_align && args.align.empty()) {
    throw Error(ErrorCategory::config,
                "metric " + args.metric + " needs --align (and --target)");
  }
  if (kind.family == MetricKind::Family::chunk_lm && args.lm.empty() &&
      !external) {
    throw Error(ErrorCategory::config,
                "metric chunk-lm needs --lm or --external-lm-scores");
  }
  if (kind.family == MetricKind::Family::rarity && args.lm.empty()) {
    throw Error(ErrorCategory::config, "metric rarity needs --lm");
  }
  if (kind.family == MetricKind::Family::uncertainty && args.entropy.empty()) {
    throw Error(ErrorCategory::config, "metric uncertainty needs --entropy");
  }
  if (external && kind.family != MetricKind::Family::chunk_lm) {
    throw Error(ErrorCategory::config,
                "--external-lm-scores only applies to chunk-lm");
  }

  std::optional<NgramModel> model;
  std::optional<EntropyTable> entropies;
  std::string models = "-";
  if (!args.lm.empty() && !external) {
    model = load_model(args.lm);
    models = "lm:" + fingerprint_file(args.lm);
  }
  if (!args.entropy.empty()) {
    auto in = open_input(args.entropy);
    entropies = EntropyTable::load(in);
    entropies->set_unknown_entropy(args.unknown_entropy);
    models = "entropy:" + fingerprint_file(args.entropy);
  }
  if (external) {
    models = "external:" + fingerprint_file(args.external_scores);
  }

  ScoreFileHeader header;
  header.metric = std::string(kind.name());
  header.alpha = args.alpha;
  header.k = kind.k;
  header.direction = args.direction.empty() ? kind.preferred_direction()
                                            : parse_direction(args.direction);
  header.models = models;

  ReaderOptions options;
  options.max_line_bytes = args.common.max_line_bytes;
  ParallelReader reader(
      args.source,
      args.target.empty() ? std::nullopt : std::make_optional(args.target),
      args.align.empty() ? std::nullopt : std::make_optional(args.align),
      options);

  auto out = open_output(args.out);
  ScoreWriter writer(out, header);
  Ticker ticker("scored");
  uint64_t unscorable = 0;
  auto sink = [&](uint64_t index, std::optional<double> score) {
    if (!score) ++unscorable;
    writer.write({index, score});
    ticker.tick();
  };

  double alpha = args.alpha;
  uint32_t k = kind.k;
  if (external) {
    // Scores arrive line-aligned with the corpus, so this path is a single
    // sequential sweep.
    RawLines scores_in(args.external_scores, args.common.max_line_bytes);
    while (auto record = reader.next()) {
      auto line = scores_in.next();
      if (!line) {
        throw Error(ErrorCategory::mismatch,
                    args.external_scores + " ended before " + args.source);
      }
      auto token_scores =
          parse_token_scores(*line, args.external_scores,
                             scores_in.line_number());
      sink(record->index,
           score_chunk_lm_external(record->source, token_scores, alpha));
    }
    if (scores_in.next()) {
      throw Error(ErrorCategory::mismatch,
                  args.external_scores + " has more lines than " + args.source);
    }
  } else {
    std::function<std::optional<double>(const ParallelRecord&)> score_record;
    switch (kind.family) {
      case MetricKind::Family::chunk_align:
        score_record = [alpha](const ParallelRecord& record) {
          return score_chunk_align(*record.alignment, alpha);
        };
        break;
      case MetricKind::Family::chunk_lm:
        score_record = [alpha, &model](const ParallelRecord& record) {
          return score_chunk_lm(record.source, *model, alpha);
        };
        break;
      case MetricKind::Family::mono:
        score_record = [alpha, k](const ParallelRecord& record) {
          return score_mono(*record.alignment, k, alpha);
        };
        break;
      case MetricKind::Family::rarity:
        score_record = [alpha, &model](const ParallelRecord& record) {
          return score_rarity(record.source, model->unigram(), alpha);
        };
        break;
      case MetricKind::Family::uncertainty:
        score_record = [alpha, &entropies](const ParallelRecord& record) {
          return score_uncertainty(record.source, *entropies, alpha);
        };
        break;
    }
    map_ordered<std::optional<double>>(reader, args.workers, args.block_size,
                                       score_record, sink);
  }
  finish_output(out, args.out);
  ticker.done();
  std::fprintf(stderr, "unscorable records: %llu\n",
               static_cast<unsigned long long>(unscorable));
  return 0;
}

// ------------------------------------------------------------------ sample

struct SampleArgs {
  CommonArgs common;
  std::string scores;
  std::string chunk_scores;
  std::string mono_scores;
  bool combined = false;
  bool random = false;
  uint64_t n = 0;
  std::string ratio = "1.6";
  std::string direction;
  uint64_t seed = 0;
  uint64_t corpus_size = 0;
  std::string source;
  std::string target;
  std::string align;
  std::string out;
  std::string text_prefix;
};

ScoreFile load_scores(const std::string& path) {
  auto in = open_input(path);
  return read_score_file(in, path);
}

void emit_selected_lines(const std::string& path, const std::string& out_path,
                         const std::vector<uint64_t>& indices,
                         size_t max_line_bytes) {
  RawLines lines(path, max_line_bytes);
  auto out = open_output(out_path);
  size_t cursor = 0;
  uint64_t index = 0;
  while (auto line = lines.next()) {
    if (cursor < indices.size() && indices[cursor] == index) {
      out << *line << "\n";
      ++cursor;
    }
    ++index;
  }
  if (cursor < indices.size()) {
    throw Error(ErrorCategory::mismatch,
                path + " has " + std::to_string(index) +
                    " lines, selection needs index " +
                    std::to_string(indices[cursor]));
  }
  finish_output(out, out_path);
}

int cmd_sample(const SampleArgs& args) {
  if (args.n < 1) {
    throw Error(ErrorCategory::config, "--n must be at least 1");
  }
  int modes = (args.scores.empty() ? 0 : 1) + (args.combined ? 1 : 0) +
              (args.random ? 1 : 0);
  if (modes != 1) {
    throw Error(ErrorCategory::config,
                "pick exactly one of --scores, --combined, --random");
  }

  std::vector<uint64_t> indices;
  std::vector<std::pair<std::string, std::string>> provenance;
  auto format_double_str = [](double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };

  if (!args.scores.empty()) {
    auto file = load_scores(args.scores);
    Direction direction = args.direction.empty()
                              ? file.header.direction
                              : parse_direction(args.direction);
    indices = select_top(file.records, args.n, direction);
    provenance = {
        {"mode", "top"},
        {"metric", file.header.metric},
        {"alpha", format_double_str(file.header.alpha)},
        {"k", std::to_string(file.header.k)},
        {"direction", std::string(to_string(direction))},
        {"n", std::to_string(args.n)},
    };
  } else if (args.combined) {
    if (args.chunk_scores.empty() || args.mono_scores.empty()) {
      throw Error(ErrorCategory::config,
                  "--combined needs --chunk-scores and --mono-scores");
    }
    auto chunk = load_scores(args.chunk_scores);
    auto mono = load_scores(args.mono_scores);
    if (chunk.header.metric != "chunk-align" &&
        chunk.header.metric != "chunk-lm") {
      throw Error(ErrorCategory::config,
                  "stage 1 scores use metric '" + chunk.header.metric +
                      "'; expected chunk-align or chunk-lm");
    }
    if (mono.header.metric != "mono") {
      throw Error(ErrorCategory::config,
                  "stage 2 scores use metric '" + mono.header.metric +
                      "'; expected mono");
    }
    if (chunk.header.alpha != mono.header.alpha) {
      std::fprintf(stderr,
                   "note: stage alphas differ (%s vs %s)\n",
                   format_double_str(chunk.header.alpha).c_str(),
                   format_double_str(mono.header.alpha).c_str());
    }
    Ratio ratio = parse_ratio(args.ratio);
    indices = combined_select(chunk.records, mono.records, args.n, ratio);
    provenance = {
        {"mode", "combined"},
        {"chunk-metric", chunk.header.metric},
        {"chunk-alpha", format_double_str(chunk.header.alpha)},
        {"mono-k", std::to_string(mono.header.k)},
        {"mono-alpha", format_double_str(mono.header.alpha)},
        {"ratio", ratio.text},
        {"n", std::to_string(args.n)},
        {"stage1", std::to_string(oversample_size(ratio, args.n))},
    };
  } else {
    uint64_t corpus_size = args.corpus_size;
    if (corpus_size == 0) {
      if (args.source.empty()) {
        throw Error(ErrorCategory::config,
                    "--random needs --corpus-size or --source");
      }
      corpus_size = count_lines(args.source);
    }
    indices = random_sample(corpus_size, args.n, args.seed);
    provenance = {
        {"mode", "random"},
        {"corpus-size", std::to_string(corpus_size)},
        {"n", std::to_string(args.n)},
        {"seed", std::to_string(args.seed)},
    };
  }

  {
    auto out = open_output(args.out);
    write_selection(out, indices, provenance);
    finish_output(out, args.out);
  }

  if (!args.text_prefix.empty()) {
    if (args.source.empty()) {
      throw Error(ErrorCategory::config, "--emit-text needs --source");
    }
    emit_selected_lines(args.source, args.text_prefix + ".src", indices,
                        args.common.max_line_bytes);
    if (!args.target.empty()) {
      emit_selected_lines(args.target, args.text_prefix + ".tgt", indices,
                          args.common.max_line_bytes);
    }
    if (!args.align.empty()) {
      emit_selected_lines(args.align, args.text_prefix + ".aln", indices,
                          args.common.max_line_bytes);
    }
  }
  std::cout << "selected=" << indices.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
  CommonArgs common;
  std::string source;
  std::string target;
  std::string align;
  std::string out;
  bool stamp = false;
};

int cmd_diagnose(const DiagnoseArgs& args) {
  ReaderOptions options;
  options.max_line_bytes = args.common.max_line_bytes;
  ParallelReader reader(args.source, args.target, args.align, options);
  DiagnosticsAccumulator accumulator;
  Ticker ticker("diagnosed");
  while (auto record = reader.next()) {
    accumulator.add(*record);
    ticker.tick();
  }
  ticker.done();

  std::vector<std::pair<std::string, std::string>> run_info = {
      {"tool", "simtsel"},
      {"version", std::string(kVersion)},
      {"mode", "diagnose"},
      {"source", args.source},
      {"target", args.target},
      {"align", args.align},
  };
  if (args.stamp) {
    char buf[32];
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    run_info.emplace_back("stamp", buf);
  }
  std::string json = report_json(accumulator.finish(), run_info);
  if (args.out.empty()) {
    std::cout << json;
  } else {
    auto out = open_output(args.out);
    out << json;
    finish_output(out, args.out);
  }
  return 0;
}

// ------------------------------------------------------------------ chunks

struct ChunksArgs {
  CommonArgs common;
  std::string method = "align";
  std::string source;
  std::string target;
  std::string align;
  std::string lm;
  std::string external_scores;
  std::string out;
  bool verbose = false;
  unsigned workers = 1;
  size_t block_size = kDefaultBlockSize;
};

std::string chunk_line_align(uint64_t index, const ChunkPartition& partition,
                             bool verbose) {
  std::string line = "{\"index\":" + std::to_string(index) +
                     ",\"c\":" + std::to_string(partition.chunk_count());
  if (verbose) {
    line += ",\"groups\":[";
    for (size_t g = 0; g < partition.groups.size(); ++g) {
      const auto& group = partition.groups[g];
      if (g > 0) line += ",";
      line += "{\"src\":[" + std::to_string(group.src.lo) + "," +
              std::to_string(group.src.hi) + "],\"tgt\":[" +
              std::to_string(group.tgt.lo) + "," +
              std::to_string(group.tgt.hi) + "],\"links\":" +
              std::to_string(group.links.size()) + "}";
    }
    line += "]";
  }
  return line + "}";
}

std::string chunk_line_lm(uint64_t index, const LmSegmentation& segmentation,
                          bool verbose) {
  std::string line = "{\"index\":" + std::to_string(index) +
                     ",\"c\":" + std::to_string(segmentation.chunk_count());
  if (verbose) {
    line += ",\"spans\":[";
    for (size_t s = 0; s < segmentation.spans.size(); ++s) {
      if (s > 0) line += ",";
      line += "[" + std::to_string(segmentation.spans[s].begin) + "," +
              std::to_string(segmentation.spans[s].end) + "]";
    }
    line += "]";
  }
  return line + "}";
}

int cmd_chunks(const ChunksArgs& args) {
  const bool lm_mode = args.method == "lm";
  if (!lm_mode && args.method != "align") {
    throw Error(ErrorCategory::config,
                "unknown --method '" + args.method +
                    "' (expected align or lm)");
  }
  const bool external = !args.external_scores.empty();
  if (lm_mode && args.lm.empty() && !external) {
    throw Error(ErrorCategory::config,
                "--method lm needs --lm or --external-lm-scores");
  }
  if (!lm_mode && args.align.empty()) {
    throw Error(ErrorCategory::config,
                "--method align needs --align (and --target)");
  }
  if (external && !lm_mode) {
    throw Error(ErrorCategory::config,
                "--external-lm-scores only applies to --method lm");
  }

  std::optional<NgramModel> model;
  if (lm_mode && !external) model = load_model(args.lm);

  ReaderOptions options;
  options.max_line_bytes = args.common.max_line_bytes;
  ParallelReader reader(
      args.source,
      args.target.empty() ? std::nullopt : std::make_optional(args.target),
      args.align.empty() ? std::nullopt : std::make_optional(args.align),
      options);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!args.out.empty()) {
    file = open_output(args.out);
    out = &file;
  }
  Ticker ticker("chunked");
  bool verbose = args.verbose;
  auto sink = [&](uint64_t, std::string&& line) {
    *out << line << "\n";
    ticker.tick();
  };

  if (external) {
    RawLines scores_in(args.external_scores, args.common.max_line_bytes);
    while (auto record = reader.next()) {
      auto line = scores_in.next();
      if (!line) {
        throw Error(ErrorCategory::mismatch,
                    args.external_scores + " ended before " + args.source);
      }
      auto token_scores = parse_token_scores(*line, args.external_scores,
                                             scores_in.line_number());
      if (token_scores.size() != record->source.size()) {
        throw Error(ErrorCategory::mismatch,
                    args.external_scores + " line " +
                        std::to_string(scores_in.line_number()) + ": " +
                        std::to_string(token_scores.size()) +
                        " scores for " +
                        std::to_string(record->source.size()) + " tokens");
      }
      sink(record->index,
           chunk_line_lm(record->index, segment_from_scores(token_scores),
                         verbose));
    }
    if (scores_in.next()) {
      throw Error(ErrorCategory::mismatch,
                  args.external_scores + " has more lines than " + args.source);
    }
  } else if (lm_mode) {
    map_ordered<std::string>(
        reader, args.workers, args.block_size,
        [&model, verbose](const ParallelRecord& record) {
          return chunk_line_lm(record.index,
                               segment_lm(record.source, *model), verbose);
        },
        sink);
  } else {
    map_ordered<std::string>(
        reader, args.workers, args.block_size,
        [verbose](const ParallelRecord& record) {
          return chunk_line_align(
              record.index, extract_chunks_align(*record.alignment), verbose);
        },
        sink);
  }
  if (!args.out.empty()) {
    finish_output(file, args.out);
  }
  ticker.done();
  return 0;
}

// --------------------------------------------------------------- correlate

struct CorrelateArgs {
  std::vector<std::string> scores;
  std::string labels;
  std::string out;
  std::string json_out;
};

int cmd_correlate(const CorrelateArgs& args) {
  if (args.scores.size() < 2) {
    throw Error(ErrorCategory::config, "give at least two --scores files");
  }
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> columns;
  size_t rows = 0;
  for (size_t i = 0; i < args.scores.size(); ++i) {
    auto file = load_scores(args.scores[i]);
    std::string name = file.header.metric;
    if (name == "mono") name += "@k" + std::to_string(file.header.k);
    names.push_back(name);
    std::vector<std::optional<double>> column;
    column.reserve(file.records.size());
    for (const auto& record : file.records) column.push_back(record.score);
    if (i == 0) {
      rows = column.size();
    } else if (column.size() != rows) {
      throw Error(ErrorCategory::mismatch,
                  args.scores[i] + " has " + std::to_string(column.size()) +
                      " records, " + args.scores[0] + " has " +
                      std::to_string(rows));
    }
    columns.push_back(std::move(column));
  }
  if (!args.labels.empty()) {
    std::vector<std::string> labels;
    std::stringstream stream(args.labels);
    std::string label;
    while (std::getline(stream, label, ',')) labels.push_back(label);
    if (labels.size() != names.size()) {
      throw Error(ErrorCategory::config,
                  "--labels names " + std::to_string(labels.size()) +
                      " columns, have " + std::to_string(names.size()));
    }
    names = std::move(labels);
  }
  for (size_t a = 0; a < names.size(); ++a) {
    for (size_t b = a + 1; b < names.size(); ++b) {
      if (names[a] == names[b]) {
        throw Error(ErrorCategory::config,
                    "duplicate column name '" + names[a] +
                        "'; disambiguate with --labels");
      }
    }
  }

  auto matrix = metric_correlations(names, columns);
  for (size_t i = 0; i < names.size(); ++i) {
    if (!matrix.values[i][i]) {
      std::fprintf(stderr, "warning: '%s' has zero variance\n",
                   names[i].c_str());
    }
  }

  std::string table = correlation_table(matrix);
  if (args.out.empty()) {
    std::cout << table;
  } else {
    auto out = open_output(args.out);
    out << table;
    finish_output(out, args.out);
  }
  if (!args.json_out.empty()) {
    std::vector<std::pair<std::string, std::string>> run_info = {
        {"tool", "simtsel"},
        {"version", std::string(kVersion)},
        {"mode", "correlate"},
    };
    auto out = open_output(args.json_out);
    out << correlation_json(matrix, run_info);
    finish_output(out, args.json_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus scoring, sampling, and diagnostics for simultaneous "
               "translation data selection"};
  app.set_version_flag("--version", std::string(simtsel::kVersion));
  app.require_subcommand(1);

  TrainLmArgs train_args;
  auto* train = app.add_subcommand(
      "train-lm", "Train the token-count language model used by chunk-lm and "
                  "rarity scoring");
  train->add_option("--corpus", train_args.corpus, "Tokenized training text")
      ->required();
  train->add_option("--out", train_args.out, "Model file to write")
      ->required();
  train->add_option("--unigram-out", train_args.unigram_out,
                    "Also write the standalone unigram table");
  train->add_option("--order", train_args.order, "Model order (n)")
      ->capture_default_str();
  train->add_option("--backoff", train_args.backoff,
                    "Backoff factor applied per context shortening")
      ->capture_default_str();
  add_common(train, train_args.common);

  BuildTablesArgs tables_args;
  auto* tables = app.add_subcommand(
      "build-tables", "Build translation count and entropy tables from an "
                      "aligned bilingual corpus");
  tables->add_option("--source", tables_args.source, "Source text")->required();
  tables->add_option("--target", tables_args.target, "Target text")->required();
  tables->add_option("--align", tables_args.align, "Alignment file")
      ->required();
  tables->add_option("--ttable-out", tables_args.ttable_out,
                     "Translation count table to write");
  tables->add_option("--entropy-out", tables_args.entropy_out,
                     "Entropy table to write");
  add_common(tables, tables_args.common);

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score",
                                   "Score every sentence under one metric");
  score->add_option("--metric", score_args.metric,
                    "chunk-align, chunk-lm, mono, rarity, or uncertainty")
      ->required();
  score->add_option("--source", score_args.source, "Text to score")
      ->required();
  score->add_option("--out", score_args.out, "Score file to write")
      ->required();
  score->add_option("--target", score_args.target,
                    "Target text (required with --align)");
  score->add_option("--align", score_args.align, "Alignment file");
  score->add_option("--lm", score_args.lm, "Trained model file");
  score->add_option("--entropy", score_args.entropy, "Entropy table file");
  score->add_option("--external-lm-scores", score_args.external_scores,
                    "Per-token log probabilities, one line per sentence");
  score->add_option("--alpha", score_args.alpha, "Length exponent in (0, 1]")
      ->capture_default_str();
  score->add_option("--k", score_args.k, "Anticipation offset (mono)")
      ->capture_default_str();
  score->add_option("--direction", score_args.direction,
                    "Override the metric's preferred direction");
  score->add_option("--unknown-entropy", score_args.unknown_entropy,
                    "Entropy for tokens missing from the table")
      ->capture_default_str();
  score->add_option("--workers", score_args.workers,
                    "Worker threads (0 = all cores)")
      ->capture_default_str();
  score->add_option("--block-size", score_args.block_size,
                    "Records per parallel block")
      ->capture_default_str();
  add_common(score, score_args.common);

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample",
                                    "Select sentences from score files");
  sample->add_option("--scores", sample_args.scores,
                     "Single-metric selection from this score file");
  sample->add_flag("--combined", sample_args.combined,
                   "Two-stage chunk then monotonicity selection");
  sample->add_flag("--random", sample_args.random, "Seeded uniform baseline");
  sample->add_option("--chunk-scores", sample_args.chunk_scores,
                     "Stage-1 score file (--combined)");
  sample->add_option("--mono-scores", sample_args.mono_scores,
                     "Stage-2 score file (--combined)");
  sample->add_option("--n", sample_args.n, "Number of sentences to select")
      ->required();
  sample->add_option("--ratio", sample_args.ratio,
                     "Stage-1 oversample ratio (--combined)")
      ->capture_default_str();
  sample->add_option("--direction", sample_args.direction,
                     "Override the score file's direction (--scores)");
  sample->add_option("--seed", sample_args.seed, "Random seed (--random)")
      ->capture_default_str();
  sample->add_option("--corpus-size", sample_args.corpus_size,
                     "Corpus line count (--random; skips reading --source)");
  sample->add_option("--source", sample_args.source,
                     "Corpus text (--random without --corpus-size, and "
                     "--emit-text)");
  sample->add_option("--target", sample_args.target,
                     "Target text for --emit-text");
  sample->add_option("--align", sample_args.align,
                     "Alignment file for --emit-text");
  sample->add_option("--out", sample_args.out, "Selection file to write")
      ->required();
  sample->add_option("--emit-text", sample_args.text_prefix,
                     "Also write selected lines to <prefix>.src/.tgt/.aln");
  add_common(sample, sample_args.common);

  DiagnoseArgs diagnose_args;
  auto* diagnose = app.add_subcommand(
      "diagnose", "Anticipation, chunk length, and hallucination report");
  diagnose->add_option("--source", diagnose_args.source, "Source text")
      ->required();
  diagnose->add_option("--target", diagnose_args.target,
                       "Target or hypothesis text")
      ->required();
  diagnose->add_option("--align", diagnose_args.align, "Alignment file")
      ->required();
  diagnose->add_option("--out", diagnose_args.out,
                       "Report file (default stdout)");
  diagnose->add_flag("--stamp", diagnose_args.stamp,
                     "Include a timestamp in the report");
  add_common(diagnose, diagnose_args.common);

  ChunksArgs chunks_args;
  auto* chunks = app.add_subcommand("chunks",
                                    "Per-sentence chunk dump, one JSON "
                                    "object per line");
  chunks->add_option("--method", chunks_args.method, "align or lm")
      ->capture_default_str();
  chunks->add_option("--source", chunks_args.source, "Source text")
      ->required();
  chunks->add_option("--target", chunks_args.target,
                     "Target text (--method align)");
  chunks->add_option("--align", chunks_args.align,
                     "Alignment file (--method align)");
  chunks->add_option("--lm", chunks_args.lm, "Model file (--method lm)");
  chunks->add_option("--external-lm-scores", chunks_args.external_scores,
                     "Per-token log probabilities (--method lm)");
  chunks->add_option("--out", chunks_args.out, "Output file (default stdout)");
  chunks->add_flag("--verbose", chunks_args.verbose,
                   "Include group spans / segment boundaries");
  chunks->add_option("--workers", chunks_args.workers,
                     "Worker threads (0 = all cores)")
      ->capture_default_str();
  chunks->add_option("--block-size", chunks_args.block_size,
                     "Records per parallel block")
      ->capture_default_str();
  add_common(chunks, chunks_args.common);

  CorrelateArgs correlate_args;
  auto* correlate = app.add_subcommand(
      "correlate", "Pearson correlation matrix across score files");
  correlate->add_option("--scores", correlate_args.scores,
                        "Score file (repeat two or more times)");
  correlate->add_option("--labels", correlate_args.labels,
                        "Comma-separated column names");
  correlate->add_option("--out", correlate_args.out,
                        "Table file (default stdout)");
  correlate->add_option("--json", correlate_args.json_out,
                        "Also write the matrix as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train_lm(train_args);
    if (tables->parsed()) return cmd_build_tables(tables_args);
    if (score->parsed()) return cmd_score(score_args);
    if (sample->parsed()) return cmd_sample(sample_args);
    if (diagnose->parsed()) return cmd_diagnose(diagnose_args);
    if (chunks->parsed()) return cmd_chunks(chunks_args);
    if (correlate->parsed()) return cmd_correlate(correlate_args);
  } catch (const simtsel::Error& error) {
    std::fprintf(stderr, "error (%s): %s\n",
                 std::string(to_string(error.category())).c_str(),
                 error.what());
    return exit_code(error.category());
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error (internal): %s\n", error.what());
    return exit_code(simtsel::ErrorCategory::internal);
  }
  return 0;
}
