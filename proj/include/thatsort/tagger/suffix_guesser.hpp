#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thatsort/tagger/counts.hpp"

namespace thatsort::tagger {

/// Unknown-word model. Suffixes (up to `max_len` bytes) of rare training
/// words map to tag counts, kept separately for capitalized and
/// non-capitalized words. A lookup starts from the open-class prior and
/// interpolates through successively longer matching suffixes:
///
///   P_k(t) = (c(t, s_k) + weight * P_{k-1}(t)) / (c(s_k) + weight)
class SuffixGuesser {
 public:
  enum class CaseClass { Lower = 0, Upper = 1 };

  SuffixGuesser() = default;
  SuffixGuesser(int max_len, double weight, std::vector<TagId> open_class)
      : max_len_(max_len), weight_(weight), open_class_(std::move(open_class)) {
    std::sort(open_class_.begin(), open_class_.end());
  }

  static CaseClass case_class(std::string_view form) {
    return !form.empty() && std::isupper(static_cast<unsigned char>(form.front()))
               ? CaseClass::Upper
               : CaseClass::Lower;
  }

  /// Records one occurrence of a rare word.
  void observe(std::string_view form, TagId tag, std::uint64_t n = 1) {
    auto& trie = tries_[static_cast<int>(case_class(form))];
    const int longest = std::min<int>(max_len_, static_cast<int>(form.size()));
    for (int k = 0; k <= longest; ++k)
      add_count(trie[std::string(form.substr(form.size() - static_cast<std::size_t>(k)))], tag, n);
  }

  /// Restores a node when loading a model.
  void set_node(CaseClass cls, std::string suffix, TagCounts counts) {
    tries_[static_cast<int>(cls)][std::move(suffix)] = std::move(counts);
  }

  /// Distribution over the open-class tags; every entry is positive and the
  /// entries sum to 1.
  std::vector<std::pair<TagId, double>> distribution(std::string_view form) const {
    const auto* trie = &tries_[static_cast<int>(case_class(form))];
    if (!trie->count("")) trie = &tries_[1 - static_cast<int>(case_class(form))];

    const std::size_t k_open = open_class_.size();
    std::vector<double> p(k_open);
    const TagCounts* root = nullptr;
    if (auto it = trie->find(std::string_view{}); it != trie->end()) root = &it->second;
    const double root_n = root ? static_cast<double>(total(*root)) : 0.0;
    for (std::size_t i = 0; i < k_open; ++i) {
      const double c = root ? static_cast<double>(count_of(*root, open_class_[i])) : 0.0;
      p[i] = (c + 1.0) / (root_n + static_cast<double>(k_open));
    }
    const int longest = std::min<int>(max_len_, static_cast<int>(form.size()));
    for (int k = 1; k <= longest; ++k) {
      auto it = trie->find(form.substr(form.size() - static_cast<std::size_t>(k)));
      if (it == trie->end()) break;
      const double n = static_cast<double>(total(it->second));
      for (std::size_t i = 0; i < k_open; ++i) {
        const double c = static_cast<double>(count_of(it->second, open_class_[i]));
        p[i] = (c + weight_ * p[i]) / (n + weight_);
      }
    }
    double sum = 0.0;
    for (double v : p) sum += v;
    std::vector<std::pair<TagId, double>> out;
    out.reserve(k_open);
    for (std::size_t i = 0; i < k_open; ++i) out.emplace_back(open_class_[i], p[i] / sum);
    return out;
  }

  int max_len() const { return max_len_; }
  double weight() const { return weight_; }
  const std::vector<TagId>& open_class() const { return open_class_; }
  const std::map<std::string, TagCounts, std::less<>>& trie(CaseClass cls) const {
    return tries_[static_cast<int>(cls)];
  }

 private:
  int max_len_ = 5;
  double weight_ = 1.0;
  std::vector<TagId> open_class_;
  std::map<std::string, TagCounts, std::less<>> tries_[2];
};

}  // namespace thatsort::tagger
