#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thatsort/error.hpp"
#include "thatsort/text.hpp"

namespace thatsort::tagger {

/// Index into a model's tagset. The value equal to the tagset size denotes
/// the sentence-boundary padding tag.
using TagId = int;

/// Sparse tag counts, sorted by tag id, no zero entries.
using TagCounts = std::vector<std::pair<TagId, std::uint64_t>>;

inline void add_count(TagCounts& counts, TagId tag, std::uint64_t n = 1) {
  auto it = std::lower_bound(counts.begin(), counts.end(), tag,
                             [](const auto& e, TagId t) { return e.first < t; });
  if (it != counts.end() && it->first == tag)
    it->second += n;
  else
    counts.insert(it, {tag, n});
}

inline std::uint64_t total(const TagCounts& counts) {
  std::uint64_t n = 0;
  for (const auto& [tag, c] : counts) n += c;
  return n;
}

inline std::uint64_t count_of(const TagCounts& counts, TagId tag) {
  auto it = std::lower_bound(counts.begin(), counts.end(), tag,
                             [](const auto& e, TagId t) { return e.first < t; });
  return it != counts.end() && it->first == tag ? it->second : 0;
}

/// "3:17 5:2"
inline std::string format_counts(const TagCounts& counts) {
  std::string out;
  for (const auto& [tag, c] : counts) {
    if (!out.empty()) out += ' ';
    out += std::to_string(tag) + ":" + std::to_string(c);
  }
  return out;
}

inline TagCounts parse_counts(std::string_view s, int num_tags) {
  TagCounts out;
  for (std::string_view item : text::split_ws(s)) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw Error(Errc::CorruptModel, "bad count '" + std::string(item) + "'");
    const auto tag = text::parse_index(item.substr(0, colon));
    std::uint64_t c = 0;
    const auto digits = item.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), c);
    if (!tag || *tag >= num_tags || ec != std::errc() || ptr != digits.data() + digits.size() || c == 0)
      throw Error(Errc::CorruptModel, "bad count '" + std::string(item) + "'");
    if (!out.empty() && out.back().first >= *tag)
      throw Error(Errc::CorruptModel, "counts not sorted: '" + std::string(s) + "'");
    out.emplace_back(*tag, c);
  }
  return out;
}

/// Shannon entropy in bits of a dense count vector restricted to `support`.
inline double entropy_bits(const std::vector<double>& dense, const std::vector<TagId>& support,
                           double n) {
  if (n <= 0) return 0.0;
  double h = 0.0;
  for (TagId t : support) {
    const double c = dense[static_cast<std::size_t>(t)];
    if (c > 0) {
      const double p = c / n;
      h -= p * std::log2(p);
    }
  }
  return h;
}

}  // namespace thatsort::tagger
