#pragma once

// Reconstruction of the enhanced-dependency ("deps") column from the basic
// head/deprel columns, with the acl:that refinement, plus scoring and
// label-frequency statistics over treebanks.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thatsort/corpus.hpp"
#include "thatsort/error.hpp"
#include "thatsort/text.hpp"

namespace thatsort {

/// One "<head>:<relation>" entry of the deps column.
struct DepsLabel {
  int head_ref = 0;
  std::string relation;

  std::string str() const { return std::to_string(head_ref) + ":" + relation; }
};

/// Relation names of a deps cell ("2:acl:relcl|5:nsubj" -> {acl:relcl, nsubj}).
/// Heads may be decimal empty-node ids and are not interpreted.
inline std::vector<std::string_view> deps_relations(std::string_view deps) {
  std::vector<std::string_view> out;
  if (deps.empty() || deps == kEmpty) return out;
  for (std::string_view entry : text::split(deps, '|')) {
    const std::size_t colon = entry.find(':');
    if (colon != std::string_view::npos) out.push_back(entry.substr(colon + 1));
  }
  return out;
}

inline bool deps_has_relation(std::string_view deps, std::string_view relation) {
  const auto rels = deps_relations(deps);
  return std::find(rels.begin(), rels.end(), relation) != rels.end();
}

/// The label the heuristic assigns to `token` within `sentence`: head and
/// deprel combined, with ":that" appended to a plain acl whose governor is
/// immediately followed by "that".
inline DepsLabel emulated_label(const Sentence& sentence, const Token& token) {
  DepsLabel label{token.head, token.deprel};
  if (token.deprel == "acl" && token.head >= 1) {
    const auto next = static_cast<std::size_t>(token.head);  // 0-based index of id head+1
    if (next < sentence.tokens.size() && text::is_that(sentence.tokens[next].form))
      label.relation += ":that";
  }
  return label;
}

/// Rewrites every token's deps column; all other columns are left as they are.
inline Sentence emulate_deps(Sentence sentence) {
  std::vector<std::string> labels;
  labels.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) labels.push_back(emulated_label(sentence, t).str());
  for (std::size_t i = 0; i < labels.size(); ++i) sentence.tokens[i].deps = std::move(labels[i]);
  return sentence;
}

inline Document emulate_deps(Document doc) {
  for (auto& s : doc.sentences) s = emulate_deps(std::move(s));
  return doc;
}

/// Throws AlignmentMismatch unless both documents have identical sentence
/// and per-sentence token counts.
inline void require_aligned(const Document& a, const Document& b) {
  if (a.sentences.size() != b.sentences.size()) {
    throw Error(Errc::AlignmentMismatch, "sentence counts differ (" +
                                             std::to_string(a.sentences.size()) + " vs " +
                                             std::to_string(b.sentences.size()) + ")");
  }
  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    if (a.sentences[i].size() != b.sentences[i].size()) {
      throw Error(Errc::AlignmentMismatch,
                  "sentence " + std::to_string(i + 1) + " token counts differ (" +
                      std::to_string(a.sentences[i].size()) + " vs " +
                      std::to_string(b.sentences[i].size()) + ")");
    }
  }
}

struct LabelAccuracy {
  std::string label;
  std::size_t correct = 0;
  std::size_t total = 0;

  std::optional<double> accuracy() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(total);
  }
};

struct DepsEvalReport {
  std::vector<LabelAccuracy> rows;

  const LabelAccuracy* find(std::string_view label) const {
    for (const auto& r : rows)
      if (r.label == label) return &r;
    return nullptr;
  }
};

/// Per-label accuracy: among tokens whose reference deps carries the label,
/// the share whose predicted deps string equals the reference string.
inline DepsEvalReport evaluate_deps(const Document& predicted, const Document& reference,
                                    const std::vector<std::string>& labels) {
  require_aligned(predicted, reference);
  DepsEvalReport report;
  for (const auto& label : labels) {
    if (!report.find(label)) report.rows.push_back({label, 0, 0});
  }
  for (std::size_t si = 0; si < reference.sentences.size(); ++si) {
    const auto& ref = reference.sentences[si].tokens;
    const auto& pred = predicted.sentences[si].tokens;
    for (std::size_t ti = 0; ti < ref.size(); ++ti) {
      for (auto& row : report.rows) {
        if (!deps_has_relation(ref[ti].deps, row.label)) continue;
        ++row.total;
        if (pred[ti].deps == ref[ti].deps) ++row.correct;
      }
    }
  }
  return report;
}

inline std::string to_csv(const DepsEvalReport& report) {
  std::string out = "label,correct,total,accuracy\n";
  for (const auto& r : report.rows) {
    const auto acc = r.accuracy();
    out += r.label + "," + std::to_string(r.correct) + "," + std::to_string(r.total) + "," +
           (acc ? text::fixed(*acc, 4) : "NA") + "\n";
  }
  return out;
}

struct LabelFrequency {
  std::string label;
  std::size_t count = 0;
  double rate = 0.0;  ///< occurrences per 1000 tokens
};

struct FrequencyTable {
  std::size_t total_tokens = 0;
  std::vector<LabelFrequency> rows;

  const LabelFrequency* find(std::string_view label) const {
    for (const auto& r : rows)
      if (r.label == label) return &r;
    return nullptr;
  }
};

/// Counts tokens carrying each label in their deps column or deprel, and
/// normalizes per 1000 tokens of the whole document set.
inline FrequencyTable frequency_stats(const std::vector<Document>& docs,
                                      const std::vector<std::string>& labels) {
  FrequencyTable table;
  for (const auto& label : labels) {
    if (!table.find(label)) table.rows.push_back({label, 0, 0.0});
  }
  for (const auto& doc : docs) {
    table.total_tokens += doc.token_count();
    for (const auto& s : doc.sentences) {
      for (const Token& t : s.tokens) {
        for (auto& row : table.rows) {
          if (t.deprel == row.label || deps_has_relation(t.deps, row.label)) ++row.count;
        }
      }
    }
  }
  if (table.total_tokens == 0) throw Error(Errc::EmptyCorpus, "no tokens to count");
  for (auto& row : table.rows)
    row.rate = 1000.0 * static_cast<double>(row.count) / static_cast<double>(table.total_tokens);
  return table;
}

inline std::string to_csv(const FrequencyTable& table) {
  std::string out = "label,count,rate\n";
  for (const auto& r : table.rows)
    out += r.label + "," + std::to_string(r.count) + "," + text::significant(r.rate, 3) + "\n";
  return out;
}

}  // namespace thatsort
