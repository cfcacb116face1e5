#pragma once

// Command implementations behind the thatsort executable. Kept in a header
// so the test suite can drive commands in-process.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <regex>
#include <string>
#include <vector>

#include "thatsort/thatsort.hpp"

#ifndef THATSORT_VERSION
#define THATSORT_VERSION "0.1.0"
#endif

namespace thatsort::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kDataError = 1, kUsageError = 2 };

/// Usage problems detected after parsing (bad schedule, missing file, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A library error tied to the input file it came from.
struct FileError {
  std::string path;
  Error error;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::Io, "sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

/// Writes through a sibling temporary file and renames it into place.
inline void write_atomically(const fs::path& path, std::string_view content) {
  if (path.has_parent_path() && !fs::exists(path.parent_path()))
    throw Error(Errc::Io, "output directory " + path.parent_path().string() + " does not exist");
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(Errc::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(Errc::Io, "cannot move output into " + path.string() + ": " + ec.message());
  }
}

/// Relative paths that do not exist are retried under $THATSORT_DATA_DIR.
inline fs::path resolve_input(const std::string& given) {
  fs::path p(given);
  if (fs::exists(p) || p.is_absolute()) {
    if (!fs::exists(p)) throw UsageError("input " + given + " does not exist");
    return p;
  }
  if (const char* root = std::getenv("THATSORT_DATA_DIR")) {
    fs::path q = fs::path(root) / p;
    if (fs::exists(q)) return q;
  }
  throw UsageError("input " + given + " does not exist");
}

/// Files named on the command line, with directories expanded to their
/// regular files whose name matches `pattern`, in lexicographic order.
inline std::vector<fs::path> expand_inputs(const std::vector<std::string>& given, const std::string& pattern) {
  const std::regex re(pattern);
  std::vector<fs::path> out;
  for (const auto& g : given) {
    const fs::path p = resolve_input(g);
    if (!fs::is_directory(p)) {
      out.push_back(p);
      continue;
    }
    std::vector<fs::path> inside;
    for (const auto& entry : fs::directory_iterator(p)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && !name.starts_with(".") && std::regex_match(name, re))
        inside.push_back(entry.path());
    }
    std::sort(inside.begin(), inside.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    out.insert(out.end(), inside.begin(), inside.end());
  }
  return out;
}

inline std::vector<std::size_t> parse_schedule(const std::string& spec) {
  std::vector<std::size_t> out;
  for (auto part : text::split(spec, ',')) {
    const auto v = text::parse_index(part);
    if (!v) throw UsageError("bad schedule entry '" + std::string(part) + "'");
    out.push_back(static_cast<std::size_t>(*v));
  }
  return out;
}

/// Per-invocation state: the inputs read and the outputs written, recorded
/// in the manifest beside each output file.
class Run {
 public:
  Run(std::string command, std::vector<std::string> argv, std::ostream& out)
      : command_(std::move(command)), argv_(std::move(argv)), out_(out) {}

  Document load(const fs::path& path) {
    const std::string name = path.string();
    const std::string content = read_raw(path);
    try {
      return name.ends_with(".conllu") || name.ends_with(".conll") ? parse_conllu(content, name)
                                                                     : parse_slash_tagged(content, name);
    } catch (const Error& e) {
      throw FileError{name, e};
    }
  }

  std::string read_raw(const fs::path& path) {
    std::string content;
    try {
      content = text::read_file(path.string());
    } catch (const Error& e) {
      throw FileError{path.string(), e};
    }
    inputs_.push_back({{"path", path.string()}, {"sha256", sha256_hex(content)}});
    return content;
  }

  void note(const std::string& key, json value) { metadata_[key] = std::move(value); }
  void flags(json f) { flags_ = std::move(f); }

  /// Emits `content` to `path`, or to standard output when `path` is empty.
  void emit(const std::string& path, std::string_view content) {
    if (path.empty()) {
      out_ << content;
      return;
    }
    write_atomically(path, content);
    outputs_.push_back({{"path", path}, {"sha256", sha256_hex(content)}});
    write_atomically(path + ".manifest.json", manifest().dump(2) + "\n");
  }

  json manifest() const {
    json m;
    m["tool"] = "thatsort";
    m["version"] = THATSORT_VERSION;
    m["command"] = command_;
    m["argv"] = argv_;
    m["flags"] = flags_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    if (!metadata_.empty()) m["metadata"] = metadata_;
    return m;
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::ostream& out_;
  json flags_ = json::object();
  json inputs_ = json::array();
  json outputs_ = json::array();
  json metadata_ = json::object();
};

inline std::vector<std::string> split_labels(const std::string& s) {
  std::vector<std::string> out;
  for (auto p : text::split(s, ','))
    if (!p.empty()) out.emplace_back(p);
  if (out.empty()) throw UsageError("no labels given");
  return out;
}

struct Options {
  std::vector<std::string> inputs;
  std::string in, out, pred, ref, model, tagged, gold, trace, summary;
  std::string labels = "acl:that,acl:relcl";
  std::string pattern = ".*";
  std::string schedule = "10,30,100,200,300,400,500";
  std::string source = "deprel";
  std::vector<std::string> tests;
  bool strict = false;
  bool equate = false;
  int window = 0;
  tagger::TrainParams params;
  double suffix_weight = -1;
};

inline void add_train_params(CLI::App* sub, Options& o) {
  sub->add_option("--min-leaf", o.params.min_leaf, "minimum events per context-tree leaf")->capture_default_str();
  sub->add_option("--gain-threshold", o.params.gain_threshold, "minimum information gain (bits) for a split")
      ->capture_default_str();
  sub->add_option("--suffix-len", o.params.suffix_len, "longest suffix used for unknown words")->capture_default_str();
  sub->add_option("--smoothing", o.params.smoothing, "add-smoothing constant at tree leaves")->capture_default_str();
  sub->add_option("--suffix-weight", o.suffix_weight, "suffix interpolation weight (default: estimated)");
  sub->add_option("--rare-max", o.params.rare_max, "highest frequency of a word feeding the guesser")
      ->capture_default_str();
}

inline tagger::TrainParams train_params(const Options& o) {
  tagger::TrainParams p = o.params;
  if (o.suffix_weight >= 0) p.suffix_weight = o.suffix_weight;
  if (p.min_leaf < 0 || p.suffix_len < 0 || !(p.smoothing > 0) || p.rare_max < 0)
    throw UsageError("invalid training parameters");
  return p;
}

inline json flags_of(const CLI::App* sub) {
  json f = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    f[opt->get_name()] = opt->results();
  }
  return f;
}

/// Runs one command line. Returns the process exit code; diagnostics go to
/// `err` as single lines.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"thatsort: sort English \"that\" into complementizer and relative pronoun"};
  app.set_version_flag("--version", THATSORT_VERSION);
  app.require_subcommand(1);
  Options o;
  std::function<int(Run&)> action;

  auto* validate = app.add_subcommand("validate", "check that corpus files parse");
  validate->add_option("paths", o.inputs, "files or directories")->required();
  validate->add_option("--pattern", o.pattern, "file-name regex for directory inputs")->capture_default_str();

  auto* emulate = app.add_subcommand("emulate", "rebuild the deps column from head and deprel");
  emulate->add_option("--in", o.in)->required();
  emulate->add_option("--out", o.out, "output CoNLL-U (default: stdout)");

  auto* eval_deps = app.add_subcommand("eval-deps", "score a deps column against a reference");
  eval_deps->add_option("--pred", o.pred, "predicted CoNLL-U; emulated from --ref when omitted");
  eval_deps->add_option("--ref", o.ref)->required();
  eval_deps->add_option("--labels", o.labels)->capture_default_str();
  eval_deps->add_option("--out", o.out);

  auto* freq = app.add_subcommand("freq", "label counts per 1000 tokens");
  freq->add_option("paths", o.inputs, "files or directories")->required();
  freq->add_option("--labels", o.labels)->capture_default_str();
  freq->add_option("--pattern", o.pattern)->capture_default_str();
  freq->add_option("--out", o.out);

  auto* relabel = app.add_subcommand("relabel", "retag \"that\" as CST or WPR from dependency relations");
  relabel->add_option("--in", o.in)->required();
  relabel->add_option("--out", o.out, "output CoNLL-U (default: stdout)");
  relabel->add_flag("--strict", o.strict, "only retag IN");
  relabel->add_option("--window", o.window, "scan at most this many tokens left of the verb");
  relabel->add_option("--trace", o.trace, "write a CSV of every change");

  auto* train_cmd = app.add_subcommand("train", "train a tagger model");
  train_cmd->add_option("paths", o.inputs, "training files or directories")->required();
  train_cmd->add_option("--model", o.model, "model file to write")->required();
  train_cmd->add_option("--pattern", o.pattern)->capture_default_str();
  add_train_params(train_cmd, o);

  auto* tag_cmd = app.add_subcommand("tag", "tag a corpus with a trained model");
  tag_cmd->add_option("--model", o.model)->required();
  tag_cmd->add_option("--in", o.in)->required();
  tag_cmd->add_option("--out", o.out);

  auto* eval_tags = app.add_subcommand("eval-tags", "count WPR/CST/IN/DT on \"that\" against gold");
  eval_tags->add_option("--tagged", o.tagged)->required();
  eval_tags->add_option("--gold", o.gold)->required();
  eval_tags->add_flag("--equate-wdt-wpr", o.equate, "read WDT as WPR");
  eval_tags->add_option("--out", o.out);

  auto* curve = app.add_subcommand("curve", "learning curve over growing training sets");
  curve->add_option("--train", o.inputs, "training files or directories")->required();
  curve->add_option("--schedule", o.schedule, "comma-separated file counts")->capture_default_str();
  curve->add_option("--test", o.tests, "NAME=PATH of a gold test set")->required();
  curve->add_option("--pattern", o.pattern)->capture_default_str();
  curve->add_flag("--equate-wdt-wpr", o.equate);
  curve->add_option("--out", o.out);
  add_train_params(curve, o);

  auto* inventory = app.add_subcommand("inventory", "tag counts over growing training sets");
  inventory->add_option("--train", o.inputs)->required();
  inventory->add_option("--schedule", o.schedule)->capture_default_str();
  inventory->add_option("--pattern", o.pattern)->capture_default_str();
  inventory->add_option("--out", o.out);

  auto* distance = app.add_subcommand("distance", "tokens between \"that\" and the last noun before it");
  distance->add_option("paths", o.inputs)->required();
  distance->add_option("--source", o.source, "xpos or deprel")->check(CLI::IsMember({"xpos", "deprel"}))
      ->capture_default_str();
  distance->add_option("--pattern", o.pattern)->capture_default_str();
  distance->add_option("--out", o.out, "per-token CSV");
  distance->add_option("--summary", o.summary, "five-number summary CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << THATSORT_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "thatsort: UsageError: " << e.what() << "\n";
    return kUsageError;
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run(sub->get_name(), args, out);
  run.flags(flags_of(sub));

  try {
    if (sub == validate) {
      int status = kOk;
      for (const auto& path : expand_inputs(o.inputs, o.pattern)) {
        try {
          const Document d = run.load(path);
          if (d.token_count() == 0) err << "thatsort: warning: " << path.string() << ": no tokens\n";
          else out << path.string() << ": ok (" << d.sentences.size() << " sentences, " << d.token_count() << " tokens)\n";
        } catch (const FileError& e) {
          err << "thatsort: " << e.path << ": " << e.error.what() << "\n";
          status = kDataError;
        }
      }
      return status;
    }

    if (sub == emulate) {
      run.emit(o.out, serialize_conllu(emulate_deps(run.load(resolve_input(o.in)))));
    } else if (sub == eval_deps) {
      const Document ref = run.load(resolve_input(o.ref));
      const Document pred = o.pred.empty() ? emulate_deps(ref) : run.load(resolve_input(o.pred));
      if (o.pred.empty()) run.note("predicted", "emulated from reference");
      run.emit(o.out, to_csv(evaluate_deps(pred, ref, split_labels(o.labels))));
    } else if (sub == freq) {
      std::vector<Document> docs;
      for (const auto& p : expand_inputs(o.inputs, o.pattern)) docs.push_back(run.load(p));
      const auto table = frequency_stats(docs, split_labels(o.labels));
      run.note("total_tokens", table.total_tokens);
      run.emit(o.out, to_csv(table));
    } else if (sub == relabel) {
      RelabelPolicy policy = o.strict ? RelabelPolicy::strict() : RelabelPolicy::standard();
      if (o.window < 0) throw UsageError("--window must be positive");
      if (o.window > 0) policy = policy.with_bound(RelabelPolicy::Window{o.window});
      const auto result = relabel_that(run.load(resolve_input(o.in)), policy);
      if (!o.trace.empty()) run.emit(o.trace, to_csv(result.traces));
      run.emit(o.out, serialize_conllu(result.document));
    } else if (sub == train_cmd) {
      const auto params = train_params(o);
      std::vector<Document> docs;
      for (const auto& p : expand_inputs(o.inputs, o.pattern)) docs.push_back(run.load(p));
      run.note("file_order", "lexicographic by file name within each directory");
      run.emit(o.model, tagger::serialize_model(tagger::train(docs, params)));
    } else if (sub == tag_cmd) {
      const fs::path model_path = resolve_input(o.model);
      const auto model = [&] {
        try {
          return tagger::parse_model(run.read_raw(model_path));
        } catch (const Error& e) {
          throw FileError{model_path.string(), e};
        }
      }();
      const fs::path in = resolve_input(o.in);
      const Document tagged = tagger::tag_document(model, run.load(in));
      const std::string name = in.string();
      const bool conllu = name.ends_with(".conllu") || name.ends_with(".conll");
      run.emit(o.out, conllu ? serialize_conllu(tagged) : serialize_slash_tagged(tagged));
    } else if (sub == eval_tags) {
      const Document tagged = run.load(resolve_input(o.tagged));
      const Document gold = run.load(resolve_input(o.gold));
      require_aligned(tagged, gold);
      run.emit(o.out, to_csv(tag_count_report(tagged, load_gold_that(gold), o.equate)));
    } else if (sub == curve || sub == inventory) {
      const SizeSchedule schedule(parse_schedule(o.schedule));
      std::vector<Document> files;
      for (const auto& p : expand_inputs(o.inputs, o.pattern)) files.push_back(run.load(p));
      require_schedule_fits(schedule, files.size());
      run.note("file_order", "lexicographic by file name within each directory");
      if (sub == inventory) {
        run.emit(o.out, to_csv(tag_inventory_evolution(files, schedule)));
      } else {
        const auto params = train_params(o);
        std::vector<TestSet> tests;
        for (const auto& spec : o.tests) {
          const auto eq = spec.find('=');
          if (eq == std::string::npos || eq == 0) throw UsageError("--test expects NAME=PATH, got " + spec);
          tests.push_back(TestSet::from_gold(spec.substr(0, eq), run.load(resolve_input(spec.substr(eq + 1)))));
        }
        run.emit(o.out, to_csv(learning_curve(files, schedule, tests, params, o.equate)));
      }
    } else if (sub == distance) {
      const auto source = o.source == "xpos" ? DistanceSource::FromXpos : DistanceSource::FromDeprel;
      std::vector<DistanceRecord> all;
      std::size_t skipped = 0;
      std::size_t offset = 0;
      for (const auto& p : expand_inputs(o.inputs, o.pattern)) {
        const Document d = run.load(p);
        auto r = that_noun_distance(d, source);
        for (auto& rec : r.records) {
          rec.sentence_index += offset;
          all.push_back(rec);
        }
        skipped += r.skipped;
        offset += d.sentences.size();
      }
      run.note("distance_counts_punctuation", true);
      run.note("skipped_without_preceding_noun", skipped);
      run.note("sentence_numbering", "1-based, continuing across input files");
      if (!o.summary.empty()) run.emit(o.summary, to_csv(summarize_distances(all)));
      if (!o.out.empty() || o.summary.empty()) run.emit(o.out, to_csv(all));
      err << "thatsort: " << skipped << " \"that\" tokens without a preceding noun skipped\n";
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "thatsort: UsageError: " << e.what() << "\n";
    return kUsageError;
  } catch (const FileError& e) {
    err << "thatsort: " << e.path << ": " << e.error.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument) {
      err << "thatsort: UsageError: " << e.what() << "\n";
      return kUsageError;
    }
    err << "thatsort: " << e.what() << "\n";
    return kDataError;
  } catch (const std::regex_error& e) {
    err << "thatsort: UsageError: bad --pattern: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "thatsort: Io: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace thatsort::cli
