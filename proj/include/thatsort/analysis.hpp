#pragma once

// Experiment harness: learning curves over growing training sets, tag
// inventory growth, and the distance between "that" and the last noun
// before it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "thatsort/corpus.hpp"
#include "thatsort/error.hpp"
#include "thatsort/relabel.hpp"
#include "thatsort/tagger/model.hpp"
#include "thatsort/text.hpp"

namespace thatsort {

/// Strictly increasing positive training-set sizes, in files.
class SizeSchedule {
 public:
  SizeSchedule() : SizeSchedule({10, 30, 100, 200, 300, 400, 500}) {}

  explicit SizeSchedule(std::vector<std::size_t> file_counts) : counts_(std::move(file_counts)) {
    if (counts_.empty()) throw Error(Errc::InvalidArgument, "schedule is empty");
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (counts_[i] == 0) throw Error(Errc::InvalidArgument, "schedule sizes must be positive");
      if (i > 0 && counts_[i] <= counts_[i - 1])
        throw Error(Errc::InvalidArgument, "schedule must be strictly increasing");
    }
  }

  const std::vector<std::size_t>& file_counts() const { return counts_; }
  std::size_t largest() const { return counts_.back(); }
  std::size_t size() const { return counts_.size(); }

 private:
  std::vector<std::size_t> counts_;
};

inline void require_schedule_fits(const SizeSchedule& schedule, std::size_t available) {
  if (schedule.largest() > available) {
    throw Error(Errc::ScheduleExceedsCorpus, "schedule needs " + std::to_string(schedule.largest()) +
                                                 " files, corpus has " + std::to_string(available));
  }
}

/// A gold test set: the document (gold tags in xpos) and its "that" records.
struct TestSet {
  std::string name;
  Document document;
  std::vector<GoldThatRecord> gold;

  static TestSet from_gold(std::string name, Document doc) {
    auto gold = load_gold_that(doc);
    return {std::move(name), std::move(doc), std::move(gold)};
  }
};

struct CurveRow {
  std::size_t size = 0;
  std::string test;
  std::string tag;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::optional<double> recall;
};

/// For each schedule size s, trains on the first s files and scores the
/// "that" tags of every test set. Rows are ordered by (size, test, tag).
inline std::vector<CurveRow> learning_curve(const std::vector<Document>& train_files,
                                            const SizeSchedule& schedule,
                                            const std::vector<TestSet>& tests,
                                            const tagger::TrainParams& params = {},
                                            bool equate_wdt_wpr = false) {
  require_schedule_fits(schedule, train_files.size());
  std::vector<CurveRow> rows;
  for (std::size_t size : schedule.file_counts()) {
    const std::vector<Document> prefix(train_files.begin(),
                                       train_files.begin() + static_cast<std::ptrdiff_t>(size));
    const auto model = tagger::train(prefix, params);
    for (const auto& test : tests) {
      const Document tagged = tagger::tag_document(model, test.document);
      const auto report = tag_count_report(tagged, test.gold, equate_wdt_wpr);
      for (const auto& r : report.rows)
        rows.push_back({size, test.name, r.tag, r.predicted, r.gold, r.recall()});
    }
  }
  return rows;
}

inline std::string to_csv(const std::vector<CurveRow>& rows) {
  std::string out = "size,test,tag,predicted,gold,recall\n";
  for (const auto& r : rows) {
    out += std::to_string(r.size) + "," + r.test + "," + r.tag + "," + std::to_string(r.predicted) +
           "," + std::to_string(r.gold) + "," + (r.recall ? text::fixed(*r.recall, 4) : "NA") + "\n";
  }
  return out;
}

struct InventoryRow {
  std::size_t size = 0;
  std::string tag;
  std::size_t count = 0;

  friend bool operator==(const InventoryRow&, const InventoryRow&) = default;
};

/// Token count of every xpos tag over the first s files, for each size s.
inline std::vector<InventoryRow> tag_inventory_evolution(const std::vector<Document>& train_files,
                                                         const SizeSchedule& schedule) {
  require_schedule_fits(schedule, train_files.size());
  std::vector<InventoryRow> rows;
  std::map<std::string, std::size_t> counts;
  std::size_t consumed = 0;
  for (std::size_t size : schedule.file_counts()) {
    for (; consumed < size; ++consumed)
      for (const auto& s : train_files[consumed].sentences)
        for (const auto& t : s.tokens) ++counts[t.xpos];
    for (const auto& [tag, n] : counts) rows.push_back({size, tag, n});
  }
  return rows;
}

inline std::string to_csv(const std::vector<InventoryRow>& rows) {
  std::string out = "size,tag,count\n";
  for (const auto& r : rows) out += std::to_string(r.size) + "," + r.tag + "," + std::to_string(r.count) + "\n";
  return out;
}

enum class ClauseType { CST, WPR };

inline std::string_view clause_name(ClauseType t) { return t == ClauseType::CST ? "CST" : "WPR"; }

/// How a "that" token is assigned a clause type.
enum class DistanceSource {
  FromXpos,    ///< its own xpos is CST or WPR (after relabeling or tagging)
  FromDeprel,  ///< its governor is attached as acl (CST) or acl:relcl (WPR)
};

struct DistanceRecord {
  ClauseType type = ClauseType::CST;
  int distance = 0;
  std::size_t sentence_index = 0;  ///< 0-based
  int token_id = 0;                ///< the "that" token

  friend bool operator==(const DistanceRecord&, const DistanceRecord&) = default;
};

struct DistanceResult {
  std::vector<DistanceRecord> records;
  std::size_t skipped = 0;  ///< classified "that" tokens with no noun before them
};

inline bool is_nominal(const Token& t) {
  return text::starts_with(t.xpos, "NN") || t.upos == "NOUN" || t.upos == "PROPN";
}

/// Distance in tokens (punctuation included) from each classified "that"
/// back to the nearest preceding nominal in the same sentence.
inline DistanceResult that_noun_distance(const Document& doc, DistanceSource source) {
  DistanceResult result;
  for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
    const Sentence& s = doc.sentences[si];
    for (const Token& t : s.tokens) {
      if (!text::is_that(t.form)) continue;
      std::optional<ClauseType> type;
      if (source == DistanceSource::FromXpos) {
        if (t.xpos == "CST") type = ClauseType::CST;
        else if (t.xpos == "WPR") type = ClauseType::WPR;
      } else if (t.head >= 1) {
        const std::string& rel = s.at_id(t.head).deprel;
        if (rel == "acl") type = ClauseType::CST;
        else if (rel == "acl:relcl") type = ClauseType::WPR;
      }
      if (!type) continue;
      int noun = 0;
      for (int pos = t.id - 1; pos >= 1; --pos) {
        if (is_nominal(s.at_id(pos))) {
          noun = pos;
          break;
        }
      }
      if (noun == 0) {
        ++result.skipped;
        continue;
      }
      result.records.push_back({*type, t.id - noun, si, t.id});
    }
  }
  return result;
}

inline std::string to_csv(const std::vector<DistanceRecord>& records) {
  std::string out = "type,distance,sentence,token\n";
  for (const auto& r : records) {
    out += std::string(clause_name(r.type)) + "," + std::to_string(r.distance) + "," +
           std::to_string(r.sentence_index + 1) + "," + std::to_string(r.token_id) + "\n";
  }
  return out;
}

struct DistanceSummary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  std::size_t count = 0;
};

/// Quantile of sorted data by linear interpolation at position p * (n - 1).
inline double interpolated_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/// Five-number summary of the distances of one clause type.
inline DistanceSummary summarize_distances(const std::vector<DistanceRecord>& records, ClauseType type) {
  std::vector<double> d;
  for (const auto& r : records)
    if (r.type == type) d.push_back(r.distance);
  if (d.empty()) throw Error(Errc::EmptyType, "no " + std::string(clause_name(type)) + " distances");
  std::sort(d.begin(), d.end());
  return {d.front(), interpolated_quantile(d, 0.25), interpolated_quantile(d, 0.5),
          interpolated_quantile(d, 0.75), d.back(), d.size()};
}

/// Summaries for both clause types; throws EmptyType if either has no records.
inline std::map<ClauseType, DistanceSummary> summarize_distances(const std::vector<DistanceRecord>& records) {
  return {{ClauseType::CST, summarize_distances(records, ClauseType::CST)},
          {ClauseType::WPR, summarize_distances(records, ClauseType::WPR)}};
}

inline std::string to_csv(const std::map<ClauseType, DistanceSummary>& summaries) {
  std::string out = "type,count,min,q1,median,q3,max\n";
  for (const auto& [type, s] : summaries) {
    out += std::string(clause_name(type)) + "," + std::to_string(s.count) + "," + text::fixed(s.min, 2) +
           "," + text::fixed(s.q1, 2) + "," + text::fixed(s.median, 2) + "," + text::fixed(s.q3, 2) +
           "," + text::fixed(s.max, 2) + "\n";
  }
  return out;
}

}  // namespace thatsort
