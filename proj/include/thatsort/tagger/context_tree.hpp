#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <utility>
#include <vector>

#include "thatsort/error.hpp"
#include "thatsort/tagger/counts.hpp"

namespace thatsort::tagger {

/// Transition model P(tag | tag-2, tag-1) as a binary decision tree. Each
/// internal node asks whether the tag one (or two) positions back equals a
/// given tag; each leaf holds the counts of the tags that followed the
/// contexts routed to it.
class ContextTree {
 public:
  struct Node {
    int position = 0;  ///< 1 or 2 for a test on tag -1 / tag -2; 0 for a leaf
    TagId value = 0;
    int yes = -1;
    int no = -1;
    TagCounts counts;  ///< leaves only

    bool is_leaf() const { return position == 0; }
  };

  /// Observed (tag-2, tag-1) context and the tags that followed it.
  struct Context {
    TagId prev2 = 0;
    TagId prev1 = 0;
    TagCounts next;
  };

  struct GrowParams {
    int min_leaf = 10;
    double gain_threshold = 0.01;
  };

  ContextTree() = default;

  /// `num_tags` excludes the boundary tag, whose id is `num_tags`.
  ContextTree(int num_tags, double smoothing, std::vector<Node> nodes)
      : num_tags_(num_tags), smoothing_(smoothing), nodes_(std::move(nodes)) {
    validate();
    build_lookup();
  }

  /// Recursive binary splitting by information gain. A split is taken only
  /// if both children keep at least `min_leaf` events and the weighted
  /// entropy reduction reaches `gain_threshold` bits.
  static ContextTree grow(int num_tags, double smoothing, std::vector<Context> contexts,
                          const GrowParams& params) {
    std::sort(contexts.begin(), contexts.end(), [](const Context& a, const Context& b) {
      return std::pair(a.prev2, a.prev1) < std::pair(b.prev2, b.prev1);
    });

    std::vector<Node> nodes;
    struct Pending {
      int node;
      std::vector<std::size_t> members;
    };
    std::deque<Pending> queue;
    nodes.emplace_back();
    std::vector<std::size_t> all(contexts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    queue.push_back({0, std::move(all)});

    const auto t = static_cast<std::size_t>(num_tags);
    std::vector<double> parent(t), group(t), rest(t);

    while (!queue.empty()) {
      Pending job = std::move(queue.front());
      queue.pop_front();

      std::fill(parent.begin(), parent.end(), 0.0);
      std::vector<TagId> support;
      double n = 0;
      for (std::size_t m : job.members) {
        for (const auto& [tag, c] : contexts[m].next) {
          if (parent[static_cast<std::size_t>(tag)] == 0) support.push_back(tag);
          parent[static_cast<std::size_t>(tag)] += static_cast<double>(c);
          n += static_cast<double>(c);
        }
      }
      std::sort(support.begin(), support.end());
      const double h_parent = entropy_bits(parent, support, n);

      int best_pos = 0;
      TagId best_value = 0;
      double best_gain = -1.0;
      if (n >= 2.0 * params.min_leaf && support.size() > 1) {
        for (int pos = 1; pos <= 2; ++pos) {
          // group members by the tested tag value
          std::map<TagId, std::vector<std::size_t>> by_value;
          for (std::size_t m : job.members)
            by_value[pos == 1 ? contexts[m].prev1 : contexts[m].prev2].push_back(m);
          if (by_value.size() < 2) continue;
          for (const auto& [value, members] : by_value) {
            std::fill(group.begin(), group.end(), 0.0);
            double ny = 0;
            for (std::size_t m : members) {
              for (const auto& [tag, c] : contexts[m].next) {
                group[static_cast<std::size_t>(tag)] += static_cast<double>(c);
                ny += static_cast<double>(c);
              }
            }
            const double nn = n - ny;
            if (ny < params.min_leaf || nn < params.min_leaf) continue;
            for (TagId s : support)
              rest[static_cast<std::size_t>(s)] =
                  parent[static_cast<std::size_t>(s)] - group[static_cast<std::size_t>(s)];
            const double gain = h_parent - (ny / n) * entropy_bits(group, support, ny) -
                                (nn / n) * entropy_bits(rest, support, nn);
            if (gain > best_gain) {
              best_gain = gain;
              best_pos = pos;
              best_value = value;
            }
          }
        }
      }

      if (best_pos == 0 || best_gain < params.gain_threshold) {
        Node& leaf = nodes[static_cast<std::size_t>(job.node)];
        for (TagId s : support)
          leaf.counts.emplace_back(s, static_cast<std::uint64_t>(parent[static_cast<std::size_t>(s)]));
        continue;
      }

      std::vector<std::size_t> yes, no;
      for (std::size_t m : job.members) {
        const TagId v = best_pos == 1 ? contexts[m].prev1 : contexts[m].prev2;
        (v == best_value ? yes : no).push_back(m);
      }
      const int yes_id = static_cast<int>(nodes.size());
      nodes.emplace_back();
      const int no_id = static_cast<int>(nodes.size());
      nodes.emplace_back();
      Node& split = nodes[static_cast<std::size_t>(job.node)];
      split.position = best_pos;
      split.value = best_value;
      split.yes = yes_id;
      split.no = no_id;
      queue.push_back({yes_id, std::move(yes)});
      queue.push_back({no_id, std::move(no)});
    }
    return ContextTree(num_tags, smoothing, std::move(nodes));
  }

  /// Leaf reached by the context (prev2, prev1); either may be the boundary id.
  int leaf_for(TagId prev2, TagId prev1) const {
    return lookup_[static_cast<std::size_t>(prev2) * static_cast<std::size_t>(num_tags_ + 1) +
                   static_cast<std::size_t>(prev1)];
  }

  /// Add-smoothed P(tag | leaf) = (c + s) / (N + s * num_tags).
  double probability(int leaf, TagId tag) const {
    const Node& node = nodes_[static_cast<std::size_t>(leaf)];
    const double n = static_cast<double>(total(node.counts));
    return (static_cast<double>(count_of(node.counts, tag)) + smoothing_) /
           (n + smoothing_ * num_tags_);
  }

  /// Relative frequency at the leaf, without smoothing.
  double raw_probability(int leaf, TagId tag) const {
    const Node& node = nodes_[static_cast<std::size_t>(leaf)];
    const auto n = total(node.counts);
    return n == 0 ? 0.0 : static_cast<double>(count_of(node.counts, tag)) / static_cast<double>(n);
  }

  double transition(TagId tag, TagId prev2, TagId prev1) const {
    return probability(leaf_for(prev2, prev1), tag);
  }

  int num_tags() const { return num_tags_; }
  double smoothing() const { return smoothing_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 1}};
    while (!stack.empty()) {
      auto [id, d] = stack.back();
      stack.pop_back();
      const Node& node = nodes_[static_cast<std::size_t>(id)];
      best = std::max(best, d);
      if (!node.is_leaf()) {
        stack.push_back({node.yes, d + 1});
        stack.push_back({node.no, d + 1});
      }
    }
    return best;
  }

 private:
  void validate() const {
    if (nodes_.empty()) throw Error(Errc::CorruptModel, "context tree has no nodes");
    // children must have larger ids than their parent, so walks terminate
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& node = nodes_[i];
      if (node.is_leaf()) continue;
      const auto self = static_cast<int>(i);
      const auto count = static_cast<int>(nodes_.size());
      if (node.position != 1 && node.position != 2)
        throw Error(Errc::CorruptModel, "bad test position in context tree");
      if (node.value < 0 || node.value > num_tags_)
        throw Error(Errc::CorruptModel, "bad test value in context tree");
      if (node.yes <= self || node.no <= self || node.yes >= count || node.no >= count ||
          node.yes == node.no)
        throw Error(Errc::CorruptModel, "bad child index in context tree");
    }
  }

  void build_lookup() {
    const auto width = static_cast<std::size_t>(num_tags_ + 1);
    lookup_.assign(width * width, 0);
    for (std::size_t p2 = 0; p2 < width; ++p2) {
      for (std::size_t p1 = 0; p1 < width; ++p1) {
        int id = 0;
        while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
          const Node& node = nodes_[static_cast<std::size_t>(id)];
          const auto probe = static_cast<TagId>(node.position == 1 ? p1 : p2);
          id = probe == node.value ? node.yes : node.no;
        }
        lookup_[p2 * width + p1] = id;
      }
    }
  }

  int num_tags_ = 0;
  double smoothing_ = 0.1;
  std::vector<Node> nodes_;
  std::vector<int> lookup_;
};

}  // namespace thatsort::tagger
