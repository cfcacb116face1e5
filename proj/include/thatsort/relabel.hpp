#pragma once

// Re-annotation of "that" as CST (noun-complement complementizer) or WPR
// (relative pronoun) from the dependency relation of the clause verb, and
// the tag-count report used to score "that" tags against gold test sets.

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "thatsort/corpus.hpp"
#include "thatsort/error.hpp"
#include "thatsort/text.hpp"

namespace thatsort {

/// Which "that" tokens may be rewritten and how far left of the clause verb
/// the search goes.
class RelabelPolicy {
 public:
  /// Search down to the token right after the verb's governor.
  struct ToGovernor {
    friend bool operator==(ToGovernor, ToGovernor) { return true; }
  };
  /// Search at most `width` tokens to the left of the verb.
  struct Window {
    int width = 0;
    friend bool operator==(Window, Window) = default;
  };
  using ScanBound = std::variant<ToGovernor, Window>;

  RelabelPolicy() : RelabelPolicy({"IN", "WDT"}) {}

  explicit RelabelPolicy(std::set<std::string> retaggable, ScanBound bound = ToGovernor{})
      : retaggable_(std::move(retaggable)), bound_(bound) {
    if (retaggable_.count("WPR") || retaggable_.count("CST"))
      throw Error(Errc::InvalidArgument, "WPR and CST cannot be retaggable");
    if (const auto* w = std::get_if<Window>(&bound_); w && w->width < 1)
      throw Error(Errc::InvalidArgument, "scan window must be at least 1 token");
  }

  /// IN and WDT are retaggable.
  static RelabelPolicy standard() { return RelabelPolicy(); }
  /// Only IN is retaggable; DT and WDT are trusted.
  static RelabelPolicy strict() { return RelabelPolicy({"IN"}); }

  RelabelPolicy with_bound(ScanBound bound) const {
    return RelabelPolicy(retaggable_, bound);
  }

  bool is_strict() const { return retaggable_ == std::set<std::string>{"IN"}; }
  const std::set<std::string>& retaggable_tags() const { return retaggable_; }
  const ScanBound& scan_bound() const { return bound_; }
  bool retaggable(std::string_view tag) const { return retaggable_.count(std::string(tag)) != 0; }

 private:
  std::set<std::string> retaggable_;
  ScanBound bound_;
};

struct RelabelTrace {
  std::size_t sentence_index = 0;  ///< 0-based
  int verb_id = 0;
  int that_id = 0;
  std::string old_tag;
  std::string new_tag;
  std::string relation;  ///< "acl" or "acl:relcl"

  friend bool operator==(const RelabelTrace&, const RelabelTrace&) = default;
};

struct RelabelResult {
  Document document;
  std::vector<RelabelTrace> traces;
};

namespace detail {

/// Lowest token id the leftward scan from `verb` may reach, or nullopt when
/// the policy leaves no range (governor to the right of the verb).
inline std::optional<int> scan_floor(const Token& verb, const RelabelPolicy& policy) {
  if (const auto* w = std::get_if<RelabelPolicy::Window>(&policy.scan_bound()))
    return std::max(1, verb.id - w->width);
  if (verb.head == 0) return 1;
  if (verb.head < verb.id) return verb.head + 1;
  return std::nullopt;
}

}  // namespace detail

/// For every verb (xpos VB*) attached as acl or acl:relcl, the nearest "that"
/// to its left within the scan bound is retagged CST (acl) or WPR
/// (acl:relcl) when its current tag is retaggable. A nearer "that" with a
/// protected tag blocks the search.
inline RelabelResult relabel_that(Document doc, const RelabelPolicy& policy) {
  RelabelResult result;
  for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
    Sentence& s = doc.sentences[si];
    for (const Token& verb : s.tokens) {
      if (!text::starts_with(verb.xpos, "VB")) continue;
      const bool is_acl = verb.deprel == "acl";
      if (!is_acl && verb.deprel != "acl:relcl") continue;
      const auto floor = detail::scan_floor(verb, policy);
      if (!floor) continue;
      for (int pos = verb.id - 1; pos >= *floor; --pos) {
        Token& cand = s.at_id(pos);
        if (!text::is_that(cand.form)) continue;
        if (policy.retaggable(cand.xpos)) {
          RelabelTrace trace{si, verb.id, cand.id, cand.xpos, is_acl ? "CST" : "WPR", verb.deprel};
          cand.xpos = trace.new_tag;
          result.traces.push_back(std::move(trace));
        }
        break;
      }
    }
  }
  result.document = std::move(doc);
  return result;
}

inline std::string to_csv(const std::vector<RelabelTrace>& traces) {
  std::string out = "sentence,verb,that,old_tag,new_tag,relation\n";
  for (const auto& t : traces) {
    out += std::to_string(t.sentence_index + 1) + "," + std::to_string(t.verb_id) + "," +
           std::to_string(t.that_id) + "," + t.old_tag + "," + t.new_tag + "," + t.relation + "\n";
  }
  return out;
}

inline constexpr std::array<std::string_view, 4> kReportTags = {"WPR", "CST", "IN", "DT"};

struct TagCount {
  std::string tag;
  std::size_t predicted = 0;  ///< "that" tokens carrying the tag in the tagged document
  std::size_t gold = 0;       ///< gold records with the tag
  std::size_t hits = 0;       ///< both

  std::optional<double> recall() const {
    if (gold == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(gold);
  }
};

struct TagCountReport {
  std::vector<TagCount> rows;  ///< WPR, CST, IN, DT

  const TagCount& at(std::string_view tag) const {
    for (const auto& r : rows)
      if (r.tag == tag) return r;
    throw Error(Errc::InvalidArgument, "no row for tag " + std::string(tag));
  }
};

/// Counts predicted and gold tags over the "that" tokens of a tagged
/// document. With `equate_wdt_wpr`, WDT is read as WPR on both sides.
inline TagCountReport tag_count_report(const Document& tagged,
                                       const std::vector<GoldThatRecord>& gold,
                                       bool equate_wdt_wpr) {
  auto norm = [&](const std::string& tag) -> std::string_view {
    if (equate_wdt_wpr && tag == "WDT") return "WPR";
    return tag;
  };

  std::size_t that_tokens = 0;
  for (const auto& s : tagged.sentences)
    for (const auto& t : s.tokens)
      if (text::is_that(t.form)) ++that_tokens;
  if (that_tokens != gold.size()) {
    throw Error(Errc::AlignmentMismatch, "tagged document has " + std::to_string(that_tokens) +
                                             " \"that\" tokens, gold has " +
                                             std::to_string(gold.size()));
  }

  TagCountReport report;
  for (auto tag : kReportTags) report.rows.push_back({std::string(tag)});
  auto row_for = [&](std::string_view tag) -> TagCount* {
    for (auto& r : report.rows)
      if (r.tag == tag) return &r;
    return nullptr;
  };

  for (const auto& g : gold) {
    if (g.sentence_index >= tagged.sentences.size() || g.token_id < 1 ||
        static_cast<std::size_t>(g.token_id) > tagged.sentences[g.sentence_index].size()) {
      throw Error(Errc::AlignmentMismatch, "gold record outside tagged document");
    }
    const Token& t = tagged.sentences[g.sentence_index].at_id(g.token_id);
    if (!text::is_that(t.form)) {
      throw Error(Errc::AlignmentMismatch, "gold record at sentence " +
                                               std::to_string(g.sentence_index + 1) + " token " +
                                               std::to_string(g.token_id) + " is not \"that\"");
    }
    const auto predicted = norm(t.xpos);
    const auto expected = norm(g.gold_tag);
    if (auto* r = row_for(predicted)) ++r->predicted;
    if (auto* r = row_for(expected)) {
      ++r->gold;
      if (predicted == expected) ++r->hits;
    }
  }
  return report;
}

inline std::string to_csv(const TagCountReport& report) {
  std::string out = "tag,predicted,gold,recall\n";
  for (const auto& r : report.rows) {
    const auto rec = r.recall();
    out += r.tag + "," + std::to_string(r.predicted) + "," + std::to_string(r.gold) + "," +
           (rec ? text::fixed(*rec, 4) : "NA") + "\n";
  }
  return out;
}

}  // namespace thatsort
