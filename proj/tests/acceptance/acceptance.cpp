// Acceptance checks. Prints one PASS/FAIL line per criterion; with
// `--criterion N` runs only that one. Corpus-backed checks read from
// $THATSORT_DATA_DIR (UD_English-GUM/ and brown/) and fail when the data
// is absent.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

namespace fs = std::filesystem;
using namespace thatsort;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int decimals = 3) { return text::fixed(v, decimals); }

fs::path data_root() {
  if (const char* env = std::getenv("THATSORT_DATA_DIR")) return env;
  return fs::path(THATSORT_FIXTURES).parent_path().parent_path() / "data";
}

std::vector<fs::path> gum_files() {
  std::vector<fs::path> out;
  for (const char* dir : {"UD_English-GUM", "gum"}) {
    const fs::path d = data_root() / dir;
    if (!fs::is_directory(d)) continue;
    for (const auto& e : fs::recursive_directory_iterator(d))
      if (e.is_regular_file() && e.path().extension() == ".conllu") out.push_back(e.path());
    if (!out.empty()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<fs::path> gum_split(const std::string& split) {
  for (const auto& f : gum_files())
    if (f.filename().string().find("-ud-" + split + ".conllu") != std::string::npos) return f;
  return std::nullopt;
}

Outcome unavailable(const std::string& what) {
  return {false, "data unavailable: " + what + " not found under " + data_root().string() +
                     " (set THATSORT_DATA_DIR; see scripts/fetch_data.sh)"};
}

// 1. parse + serialize is the identity on every GUM file, under 5 s in total
Outcome round_trip() {
  const auto files = gum_files();
  if (files.empty()) return unavailable("UD_English-GUM/*.conllu");
  std::vector<std::string> contents;
  for (const auto& f : files) contents.push_back(text::normalize_newlines(text::read_file(f.string())));
  const auto t0 = Clock::now();
  std::size_t identical = 0;
  std::string first_bad;
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      if (serialize_conllu(parse_conllu(contents[i])) == contents[i]) ++identical;
      else if (first_bad.empty()) first_bad = files[i].filename().string();
    } catch (const Error& e) {
      if (first_bad.empty()) first_bad = files[i].filename().string() + " (" + e.what() + ")";
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = identical == files.size() && secs < 5.0;
  std::string detail = std::to_string(identical) + "/" + std::to_string(files.size()) + " files identical in " +
                       fmt(secs) + " s (limit 5 s)";
  if (!first_bad.empty()) detail += "; first mismatch " + first_bad;
  return {pass, detail};
}

// 2. per-split frequencies: exact on the reference release, otherwise
// counts within 10% and relcl/that ratio >= 15 per split
Outcome frequencies() {
  struct Expected {
    std::string split;
    std::size_t that_count, relcl_count;
    double that_rate, relcl_rate;
  };
  const std::vector<Expected> table = {{"train", 65, 1419, 0.513, 11.21},
                                       {"dev", 13, 258, 0.65, 12.92},
                                       {"test", 14, 216, 0.69, 10.70}};
  bool exact = true, approx = true;
  std::ostringstream detail;
  for (const auto& row : table) {
    const auto path = gum_split(row.split);
    if (!path) return unavailable("en_gum-ud-" + row.split + ".conllu");
    const auto stats = frequency_stats({load_document(path->string())}, {"acl:that", "acl:relcl"});
    const auto* that = stats.find("acl:that");
    const auto* relcl = stats.find("acl:relcl");
    exact = exact && that->count == row.that_count && relcl->count == row.relcl_count &&
            std::abs(that->rate - row.that_rate) <= 0.01 + 1e-9 && std::abs(relcl->rate - row.relcl_rate) <= 0.01 + 1e-9;
    auto within = [](std::size_t got, std::size_t want) {
      return std::abs(static_cast<double>(got) - static_cast<double>(want)) <= 0.10 * static_cast<double>(want);
    };
    const double ratio = that->count ? static_cast<double>(relcl->count) / static_cast<double>(that->count) : INFINITY;
    approx = approx && within(that->count, row.that_count) && within(relcl->count, row.relcl_count) && ratio >= 15.0;
    detail << row.split << ": acl:that " << that->count << " (" << fmt(that->rate) << "), acl:relcl "
           << relcl->count << " (" << fmt(relcl->rate, 2) << "), ratio " << fmt(ratio, 1) << "; ";
  }
  detail << (exact ? "exact match" : approx ? "within 10% with ratio >= 15" : "outside tolerance");
  return {exact || approx, detail.str()};
}

// 3. emulated deps on gold trees vs the treebank's own deps, test split
Outcome deps_floor() {
  const auto path = gum_split("test");
  if (!path) return unavailable("en_gum-ud-test.conllu");
  const Document ref = load_document(path->string());
  const auto report = evaluate_deps(emulate_deps(ref), ref, {"acl:relcl", "acl:that"});
  const auto relcl = report.find("acl:relcl")->accuracy().value_or(0.0);
  const auto that = report.find("acl:that")->accuracy().value_or(0.0);
  return {relcl >= 0.92 && that >= 0.71,
          "acl:relcl " + fmt(relcl, 4) + " (floor 0.92), acl:that " + fmt(that, 4) + " (floor 0.71)"};
}

// 4. Viterbi equals exhaustive argmax on 200 random sentences, 5-tag model
Outcome decoder_oracle() {
  const auto corpus = testing::five_tag_corpus(2024);
  tagger::TrainParams p;
  p.min_leaf = 3;
  p.gain_threshold = 0.001;
  const auto model = tagger::train(corpus, p);
  if (model.num_tags() != 5) return {false, "synthetic model has " + std::to_string(model.num_tags()) + " tags"};
  std::mt19937 rng(2024);
  int agree = 0;
  for (int i = 0; i < 200; ++i) {
    const auto forms = testing::random_forms(corpus, rng, 8);
    agree += tagger::tag_ids(model, forms) == testing::brute_force_tags(model, forms);
  }
  return {agree == 200, std::to_string(agree) + "/200 sentences match the exhaustive argmax"};
}

// 5. Brown slice: 50 files, first 45 train, last 5 test, accuracy >= 0.90 in < 2 min
Outcome brown_accuracy() {
  const fs::path dir = data_root() / "brown";
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    const std::regex name("[a-r][a-z][0-9][0-9]");
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && std::regex_match(e.path().filename().string(), name)) files.push_back(e.path());
  }
  if (files.size() < 50) return unavailable("50 Brown files (brown/ca01 ...)");
  std::sort(files.begin(), files.end());
  files.resize(50);
  const auto t0 = Clock::now();
  std::vector<Document> train, test;
  for (std::size_t i = 0; i < files.size(); ++i)
    (i < 45 ? train : test).push_back(parse_slash_tagged(text::read_file(files[i].string())));
  const auto model = tagger::train(train);
  std::size_t correct = 0, total = 0;
  for (const auto& doc : test) {
    const Document tagged = tagger::tag_document(model, doc);
    for (std::size_t si = 0; si < doc.sentences.size(); ++si)
      for (std::size_t k = 0; k < doc.sentences[si].size(); ++k, ++total)
        correct += tagged.sentences[si].tokens[k].xpos == doc.sentences[si].tokens[k].xpos;
  }
  const double secs = seconds_since(t0);
  const double acc = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  return {acc >= 0.90 && secs < 120.0, "accuracy " + fmt(acc, 4) + " over " + std::to_string(total) +
                                           " tokens (floor 0.90) in " + fmt(secs, 1) + " s (limit 120 s)"};
}

// 6. relabeling closure on the clause-pattern trees; strict keeps DT
Outcome relabel_closure() {
  const Document d = load_document(testing::fixture("clause_patterns.conllu"));
  const Document out = relabel_that(d, RelabelPolicy::standard()).document;
  std::size_t cst = 0, wpr = 0, other = 0, wrong = 0;
  for (std::size_t si = 0; si < d.sentences.size(); ++si) {
    const Sentence& s = d.sentences[si];
    for (const Token& t : s.tokens) {
      if (!text::is_that(t.form)) continue;
      const std::string& got = out.sentences[si].at_id(t.id).xpos;
      const std::string rel = t.head >= 1 ? s.at_id(t.head).deprel : "";
      if (rel == "acl") ++cst, wrong += got != "CST";
      else if (rel == "acl:relcl") ++wpr, wrong += got != "WPR";
      else ++other, wrong += got != t.xpos;
    }
  }

  std::size_t dt_total = 0, dt_changed = 0;
  for (const char* name : {"clause_patterns.conllu", "deictic_that.conllu"}) {
    const Document in = load_document(testing::fixture(name));
    for (const auto& bound : {RelabelPolicy::ScanBound{RelabelPolicy::ToGovernor{}},
                              RelabelPolicy::ScanBound{RelabelPolicy::Window{50}}}) {
      const Document strict = relabel_that(in, RelabelPolicy::strict().with_bound(bound)).document;
      for (std::size_t si = 0; si < in.sentences.size(); ++si)
        for (const Token& t : in.sentences[si].tokens)
          if (text::is_that(t.form) && t.xpos == "DT")
            ++dt_total, dt_changed += strict.sentences[si].at_id(t.id).xpos != "DT";
    }
  }
  const bool pass = wrong == 0 && cst > 0 && wpr > 0 && dt_total > 0 && dt_changed == 0;
  return {pass, std::to_string(cst) + " acl-governed, " + std::to_string(wpr) + " acl:relcl-governed, " +
                    std::to_string(other) + " other \"that\"; " + std::to_string(wrong) + " wrong; strict mode altered " +
                    std::to_string(dt_changed) + "/" + std::to_string(dt_total) + " DT \"that\""};
}

// 7. median CST distance >= median WPR distance on GUM, from deprel
Outcome distance_order() {
  const auto files = gum_files();
  if (files.empty()) return unavailable("UD_English-GUM/*.conllu");
  std::vector<DistanceRecord> all;
  std::size_t skipped = 0;
  for (const auto& f : files) {
    const auto r = that_noun_distance(load_document(f.string()), DistanceSource::FromDeprel);
    all.insert(all.end(), r.records.begin(), r.records.end());
    skipped += r.skipped;
  }
  try {
    const auto s = summarize_distances(all);
    const double cst = s.at(ClauseType::CST).median, wpr = s.at(ClauseType::WPR).median;
    return {cst >= wpr, "median CST " + fmt(cst, 2) + " (n=" + std::to_string(s.at(ClauseType::CST).count) +
                            ") vs WPR " + fmt(wpr, 2) + " (n=" + std::to_string(s.at(ClauseType::WPR).count) +
                            "), " + std::to_string(skipped) + " skipped"};
  } catch (const Error& e) {
    return {false, e.what()};
  }
}

// 8. learning-curve determinism, shape, and constant CST recall
Outcome curve_harness() {
  const auto files = testing::uniform_cst_files(100);
  const std::vector<TestSet> tests = {TestSet::from_gold("cst", testing::uniform_cst_test()),
                                      TestSet::from_gold("cst2", testing::uniform_cst_test())};
  const SizeSchedule schedule({10, 30, 100});
  const auto rows = learning_curve(files, schedule, tests);
  const std::string a = to_csv(rows);
  const std::string b = to_csv(learning_curve(files, schedule, tests));
  const std::size_t expected_rows = schedule.size() * tests.size() * 4;
  bool recall_ok = true;
  for (const auto& r : rows)
    if (r.tag == "CST") recall_ok = recall_ok && r.recall && *r.recall == 1.0;
  const bool pass = a == b && rows.size() == expected_rows && recall_ok;
  return {pass, std::string(a == b ? "byte-identical" : "different") + " CSVs, " + std::to_string(rows.size()) +
                    " rows (expected " + std::to_string(expected_rows) + "), CST recall " +
                    (recall_ok ? "1.0 at every size" : "below 1.0")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"CoNLL-U round trip on GUM", round_trip},
      {"label frequencies on GUM splits", frequencies},
      {"deps emulation accuracy floor", deps_floor},
      {"decoder matches exhaustive oracle", decoder_oracle},
      {"tagger accuracy on a Brown slice", brown_accuracy},
      {"relabeling closure on clause patterns", relabel_closure},
      {"CST vs WPR distance medians on GUM", distance_order},
      {"learning-curve determinism and shape", curve_harness},
  };

  std::size_t only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--criterion" && i + 1 < argc) only = std::stoul(argv[++i]);
  }
  if (only > criteria.size()) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && only != i + 1) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail << "\n";
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
