#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thatsort/tagger/counts.hpp"
#include "thatsort/text.hpp"

namespace thatsort::tagger {

/// Known-word model: (form, tag) frequencies and the derived P(tag | form).
class Lexicon {
 public:
  explicit Lexicon(bool fold_case = true) : fold_case_(fold_case) {}

  void add(std::string_view form, TagId tag, std::uint64_t n = 1) {
    add_count(entries_[std::string(form)], tag, n);
  }

  /// Counts for `form`; with case folding, an unseen form falls back to its
  /// lowercased spelling. Returns nullptr for unknown words.
  const TagCounts* find(std::string_view form) const {
    if (auto it = entries_.find(form); it != entries_.end()) return &it->second;
    if (fold_case_) {
      const std::string lower = text::ascii_lower(form);
      if (lower != form) {
        if (auto it = entries_.find(lower); it != entries_.end()) return &it->second;
      }
    }
    return nullptr;
  }

  bool contains(std::string_view form) const { return find(form) != nullptr; }

  /// P(tag | form) by relative frequency; empty for unknown words.
  std::vector<std::pair<TagId, double>> distribution(std::string_view form) const {
    std::vector<std::pair<TagId, double>> out;
    const TagCounts* counts = find(form);
    if (!counts) return out;
    const double n = static_cast<double>(total(*counts));
    for (const auto& [tag, c] : *counts) out.emplace_back(tag, static_cast<double>(c) / n);
    return out;
  }

  bool fold_case() const { return fold_case_; }
  const std::map<std::string, TagCounts, std::less<>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  bool fold_case_;
  std::map<std::string, TagCounts, std::less<>> entries_;
};

}  // namespace thatsort::tagger
