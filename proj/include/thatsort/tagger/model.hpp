#pragma once

// Trainable probabilistic POS tagger: lexicon + suffix guesser for emissions,
// a context decision tree for trigram transitions, Viterbi decoding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thatsort/corpus.hpp"
#include "thatsort/error.hpp"
#include "thatsort/tagger/context_tree.hpp"
#include "thatsort/tagger/counts.hpp"
#include "thatsort/tagger/lexicon.hpp"
#include "thatsort/tagger/suffix_guesser.hpp"
#include "thatsort/text.hpp"

namespace thatsort::tagger {

inline constexpr std::string_view kBoundaryTag = "<s>";
inline constexpr std::string_view kModelMagic = "thatsort-tagger";

struct TrainParams {
  int min_leaf = 10;
  double gain_threshold = 0.01;  ///< bits
  int suffix_len = 5;
  double smoothing = 0.1;  ///< add-smoothing at tree leaves
  /// Interpolation weight of the suffix guesser; when unset, the standard
  /// deviation of the open-class tag distribution is used.
  std::optional<double> suffix_weight;
  int rare_max = 10;  ///< words seen at most this often train the guesser
  bool fold_case = true;
};

class TaggerModel {
 public:
  static constexpr int kFormatVersion = 1;

  TaggerModel(std::vector<std::string> tagset, Lexicon lexicon, SuffixGuesser guesser,
              ContextTree context, TagCounts unigrams, TrainParams params)
      : tagset_(std::move(tagset)),
        lexicon_(std::move(lexicon)),
        guesser_(std::move(guesser)),
        context_(std::move(context)),
        unigrams_(std::move(unigrams)),
        params_(std::move(params)) {
    check_closure();
    const double n = static_cast<double>(total(unigrams_));
    prior_.assign(tagset_.size(), 0.0);
    for (const auto& [tag, c] : unigrams_) prior_[static_cast<std::size_t>(tag)] = static_cast<double>(c) / n;
    const auto& nodes = context_.nodes();
    leaf_slot_.assign(nodes.size(), -1);
    for (std::size_t id = 0; id < nodes.size(); ++id) {
      if (!nodes[id].is_leaf()) continue;
      leaf_slot_[id] = static_cast<int>(leaf_log_.size() / tagset_.size());
      for (std::size_t t = 0; t < tagset_.size(); ++t)
        leaf_log_.push_back(std::log(context_.probability(static_cast<int>(id), static_cast<TagId>(t))));
    }
  }

  const std::vector<std::string>& tagset() const { return tagset_; }
  int num_tags() const { return static_cast<int>(tagset_.size()); }
  TagId boundary() const { return num_tags(); }
  const Lexicon& lexicon() const { return lexicon_; }
  const SuffixGuesser& guesser() const { return guesser_; }
  const ContextTree& context() const { return context_; }
  const TagCounts& unigrams() const { return unigrams_; }
  const TrainParams& params() const { return params_; }

  std::optional<TagId> tag_id(std::string_view tag) const {
    auto it = std::lower_bound(tagset_.begin(), tagset_.end(), tag);
    if (it == tagset_.end() || *it != tag) return std::nullopt;
    return static_cast<TagId>(it - tagset_.begin());
  }

  bool known(std::string_view form) const { return lexicon_.contains(form); }

  /// Emission scores P(tag | form) / P(tag) for every tag the form can take;
  /// tags not listed score zero. Known forms use the lexicon, unknown forms
  /// the suffix guesser.
  std::vector<std::pair<TagId, double>> emissions(std::string_view form) const {
    auto dist = lexicon_.contains(form) ? lexicon_.distribution(form) : guesser_.distribution(form);
    for (auto& [tag, p] : dist) p /= prior_[static_cast<std::size_t>(tag)];
    return dist;
  }

  double log_emission(std::string_view form, TagId tag) const {
    for (const auto& [t, e] : emissions(form))
      if (t == tag) return std::log(e);
    return -std::numeric_limits<double>::infinity();
  }

  /// log P(tag | prev2, prev1); prev2/prev1 may be boundary().
  double log_transition(TagId tag, TagId prev2, TagId prev1) const {
    const auto slot = static_cast<std::size_t>(leaf_slot_[static_cast<std::size_t>(context_.leaf_for(prev2, prev1))]);
    return leaf_log_[slot * tagset_.size() + static_cast<std::size_t>(tag)];
  }

 private:
  void check_closure() const {
    if (tagset_.empty()) throw Error(Errc::CorruptModel, "empty tagset");
    if (!std::is_sorted(tagset_.begin(), tagset_.end()) ||
        std::adjacent_find(tagset_.begin(), tagset_.end()) != tagset_.end())
      throw Error(Errc::CorruptModel, "tagset must be sorted and unique");
    if (context_.num_tags() != num_tags()) throw Error(Errc::CorruptModel, "tree/tagset size mismatch");
    for (const auto& [tag, c] : unigrams_)
      if (tag >= num_tags()) throw Error(Errc::CorruptModel, "unigram tag out of range");
    for (std::size_t t = 0; t < tagset_.size(); ++t)
      if (count_of(unigrams_, static_cast<TagId>(t)) == 0)
        throw Error(Errc::CorruptModel, "tag " + tagset_[t] + " has no unigram count");
    for (TagId t : guesser_.open_class())
      if (t < 0 || t >= num_tags()) throw Error(Errc::CorruptModel, "open-class tag out of range");
    if (guesser_.open_class().empty()) throw Error(Errc::CorruptModel, "empty open class");
  }

  std::vector<std::string> tagset_;
  Lexicon lexicon_;
  SuffixGuesser guesser_;
  ContextTree context_;
  TagCounts unigrams_;
  TrainParams params_;
  std::vector<double> prior_;
  std::vector<int> leaf_slot_;
  std::vector<double> leaf_log_;
};

/// TnT-style interpolation weight: standard deviation of the tag
/// probabilities over the open class.
inline double default_suffix_weight(const TagCounts& open_counts) {
  const double n = static_cast<double>(total(open_counts));
  const auto k = static_cast<double>(open_counts.size());
  if (k < 2 || n == 0) return 1.0;
  double mean = 0.0;
  for (const auto& [t, c] : open_counts) mean += static_cast<double>(c) / n;
  mean /= k;
  double var = 0.0;
  for (const auto& [t, c] : open_counts) {
    const double d = static_cast<double>(c) / n - mean;
    var += d * d;
  }
  const double sd = std::sqrt(var / (k - 1));
  return sd > 0 ? sd : 1.0;
}

inline TaggerModel train(const std::vector<Document>& corpus, const TrainParams& params = {}) {
  if (params.min_leaf < 0 || params.suffix_len < 0 || params.smoothing <= 0 ||
      params.rare_max < 0)
    throw Error(Errc::InvalidArgument, "invalid training parameters");

  std::set<std::string, std::less<>> tag_names;
  std::size_t tokens = 0;
  for (const auto& doc : corpus) {
    for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
      for (const Token& t : doc.sentences[si].tokens) {
        if (t.xpos.empty() || t.xpos == kEmpty) {
          throw Error(Errc::UntaggedToken, (doc.source_name.empty() ? "<input>" : doc.source_name) +
                                               " sentence " + std::to_string(si + 1) + " token " +
                                               std::to_string(t.id) + " has no tag");
        }
        if (t.xpos == kBoundaryTag)
          throw Error(Errc::InvalidArgument, "tag " + std::string(kBoundaryTag) + " is reserved");
        tag_names.insert(t.xpos);
        ++tokens;
      }
    }
  }
  if (tokens == 0) throw Error(Errc::EmptyCorpus, "training corpus has no tokens");

  std::vector<std::string> tagset(tag_names.begin(), tag_names.end());
  const auto num_tags = static_cast<TagId>(tagset.size());
  auto id_of = [&](const std::string& tag) {
    return static_cast<TagId>(std::lower_bound(tagset.begin(), tagset.end(), tag) - tagset.begin());
  };

  Lexicon lexicon(params.fold_case);
  TagCounts unigrams;
  std::map<std::pair<TagId, TagId>, TagCounts> context_counts;
  for (const auto& doc : corpus) {
    for (const auto& s : doc.sentences) {
      TagId prev2 = num_tags, prev1 = num_tags;
      for (const Token& t : s.tokens) {
        const TagId id = id_of(t.xpos);
        lexicon.add(t.form, id);
        add_count(unigrams, id);
        add_count(context_counts[{prev2, prev1}], id);
        prev2 = prev1;
        prev1 = id;
      }
    }
  }

  // Rare words feed the guesser; if the corpus has none, every word does.
  std::map<std::string_view, std::uint64_t> form_freq;
  for (const auto& [form, counts] : lexicon.entries()) form_freq[form] = total(counts);
  auto is_rare = [&](std::string_view form) {
    return form_freq[form] <= static_cast<std::uint64_t>(params.rare_max);
  };
  bool any_rare = false;
  for (const auto& [form, n] : form_freq) any_rare = any_rare || n <= static_cast<std::uint64_t>(params.rare_max);

  TagCounts open_counts;
  for (const auto& [form, counts] : lexicon.entries())
    if (!any_rare || is_rare(form))
      for (const auto& [tag, c] : counts) add_count(open_counts, tag, c);
  std::vector<TagId> open_class;
  for (const auto& [tag, c] : open_counts) open_class.push_back(tag);

  const double weight = params.suffix_weight ? *params.suffix_weight : default_suffix_weight(open_counts);
  SuffixGuesser guesser(params.suffix_len, weight, open_class);
  for (const auto& [form, counts] : lexicon.entries())
    if (!any_rare || is_rare(form))
      for (const auto& [tag, c] : counts) guesser.observe(form, tag, c);

  std::vector<ContextTree::Context> contexts;
  contexts.reserve(context_counts.size());
  for (auto& [key, next] : context_counts) contexts.push_back({key.first, key.second, std::move(next)});
  auto tree = ContextTree::grow(num_tags, params.smoothing, std::move(contexts),
                                {params.min_leaf, params.gain_threshold});

  TrainParams stored = params;
  stored.suffix_weight = weight;
  return TaggerModel(std::move(tagset), std::move(lexicon), std::move(guesser), std::move(tree),
                     std::move(unigrams), stored);
}

namespace detail {

struct Cell {
  double score = -std::numeric_limits<double>::infinity();
  int back = -1;  ///< index of the predecessor state at the previous position
};

}  // namespace detail

/// Most probable tag ids for `forms` under the trigram model:
///   sum_i log e(form_i, t_i) + log P(t_i | t_{i-2}, t_{i-1})
/// with boundary padding before the first word. Among equally scored
/// sequences the one first in tagset (lexicographic) order wins.
inline std::vector<TagId> tag_ids(const TaggerModel& model, const std::vector<std::string>& forms) {
  if (forms.empty()) throw Error(Errc::EmptySentence, "nothing to tag");
  const std::size_t n = forms.size();
  const TagId boundary = model.boundary();

  struct Candidate {
    TagId tag;
    double log_e;
  };
  std::vector<std::vector<Candidate>> cands(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [tag, e] : model.emissions(forms[i]))
      if (e > 0) cands[i].push_back({tag, std::log(e)});
  }

  // state at position i: (index of t_{i-1} in cands[i-1], index of t_i in cands[i]);
  // position 0 has a single predecessor (the boundary).
  auto prev_count = [&](std::size_t i) { return i == 0 ? std::size_t{1} : cands[i - 1].size(); };
  auto prev_tag = [&](std::size_t i, std::size_t a) { return i == 0 ? boundary : cands[i - 1][a].tag; };

  std::vector<std::vector<detail::Cell>> lattice(n);
  for (std::size_t i = 0; i < n; ++i) lattice[i].resize(prev_count(i) * cands[i].size());

  // lexicographic comparison of the best prefixes ending in two states at i
  auto prefix = [&](std::size_t i, std::size_t state) {
    std::vector<TagId> seq(i + 1);
    for (std::size_t k = i + 1; k-- > 0;) {
      const std::size_t width = cands[k].size();
      seq[k] = cands[k][state % width].tag;
      if (k > 0) state = static_cast<std::size_t>(lattice[k][state].back);
    }
    return seq;
  };

  for (std::size_t b = 0; b < cands[0].size(); ++b) {
    const double tr = model.log_transition(cands[0][b].tag, boundary, boundary);
    lattice[0][b] = {(0.0 + tr) + cands[0][b].log_e, -1};
  }
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t wa = cands[i - 1].size();
    const std::size_t wb = cands[i].size();
    const std::size_t nx = prev_count(i - 1);
    for (std::size_t a = 0; a < wa; ++a) {
      for (std::size_t b = 0; b < wb; ++b) {
        detail::Cell best;
        for (std::size_t x = 0; x < nx; ++x) {
          const std::size_t from = x * wa + a;
          const double base = lattice[i - 1][from].score;
          if (base == -std::numeric_limits<double>::infinity()) continue;
          const double tr = model.log_transition(cands[i][b].tag, prev_tag(i - 1, x), cands[i - 1][a].tag);
          const double score = (base + tr) + cands[i][b].log_e;
          if (best.back < 0 || score > best.score ||
              (score == best.score &&
               prefix(i - 1, from) < prefix(i - 1, static_cast<std::size_t>(best.back)))) {
            best = {score, static_cast<int>(from)};
          }
        }
        lattice[i][a * wb + b] = best;
      }
    }
  }

  std::size_t best_state = 0;
  for (std::size_t s = 1; s < lattice[n - 1].size(); ++s) {
    const double a = lattice[n - 1][s].score, b = lattice[n - 1][best_state].score;
    if (a > b || (a == b && prefix(n - 1, s) < prefix(n - 1, best_state))) best_state = s;
  }
  return prefix(n - 1, best_state);
}

inline std::vector<std::string> tag(const TaggerModel& model, const std::vector<std::string>& forms) {
  std::vector<std::string> out;
  for (TagId id : tag_ids(model, forms)) out.push_back(model.tagset()[static_cast<std::size_t>(id)]);
  return out;
}

/// Replaces the xpos of every token with the model's prediction.
inline Document tag_document(const TaggerModel& model, Document doc) {
  for (auto& s : doc.sentences) {
    if (s.tokens.empty()) continue;
    std::vector<std::string> forms;
    forms.reserve(s.tokens.size());
    for (const auto& t : s.tokens) forms.push_back(t.form);
    const auto tags = tag(model, forms);
    for (std::size_t i = 0; i < tags.size(); ++i) s.tokens[i].xpos = tags[i];
  }
  return doc;
}

// Model file: line-oriented UTF-8 text.
//
//   thatsort-tagger
//   format_version 1
//   params <min_leaf> <gain_threshold> <suffix_len> <smoothing> <suffix_weight> <rare_max> <fold_case>
//   tagset <T>                 followed by T lines, one tag each, sorted
//   unigrams <id:count ...>
//   lexicon <M>                followed by M lines "<form>\t<id:count ...>"
//   guesser <K> <open ids...>  followed by K lines "<U|L>\t<suffix>\t<id:count ...>"
//   tree <N>                   followed by N lines "S <pos> <value> <yes> <no>" or "L <id:count ...>"
//   end
//
// Counts are integers and reals are printed with 17 significant digits, so
// load(save(m)) reproduces m exactly and a second save is byte-identical.
inline std::string serialize_model(const TaggerModel& model) {
  const auto& p = model.params();
  std::string out;
  out += std::string(kModelMagic) + "\n";
  out += "format_version " + std::to_string(TaggerModel::kFormatVersion) + "\n";
  out += "params " + std::to_string(p.min_leaf) + " " + text::exact(p.gain_threshold) + " " +
         std::to_string(p.suffix_len) + " " + text::exact(p.smoothing) + " " +
         text::exact(model.guesser().weight()) + " " + std::to_string(p.rare_max) + " " +
         (p.fold_case ? "1" : "0") + "\n";
  out += "tagset " + std::to_string(model.tagset().size()) + "\n";
  for (const auto& t : model.tagset()) out += t + "\n";
  out += "unigrams " + format_counts(model.unigrams()) + "\n";
  out += "lexicon " + std::to_string(model.lexicon().size()) + "\n";
  for (const auto& [form, counts] : model.lexicon().entries()) out += form + "\t" + format_counts(counts) + "\n";

  const auto& g = model.guesser();
  const auto& upper = g.trie(SuffixGuesser::CaseClass::Upper);
  const auto& lower = g.trie(SuffixGuesser::CaseClass::Lower);
  out += "guesser " + std::to_string(upper.size() + lower.size());
  for (TagId t : g.open_class()) out += " " + std::to_string(t);
  out += "\n";
  for (const auto& [suffix, counts] : upper) out += "U\t" + suffix + "\t" + format_counts(counts) + "\n";
  for (const auto& [suffix, counts] : lower) out += "L\t" + suffix + "\t" + format_counts(counts) + "\n";

  const auto& nodes = model.context().nodes();
  out += "tree " + std::to_string(nodes.size()) + "\n";
  for (const auto& node : nodes) {
    if (node.is_leaf())
      out += "L " + format_counts(node.counts) + "\n";
    else
      out += "S " + std::to_string(node.position) + " " + std::to_string(node.value) + " " +
             std::to_string(node.yes) + " " + std::to_string(node.no) + "\n";
  }
  out += "end\n";
  return out;
}

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : rest_(text) {}

  std::string_view next() {
    if (rest_.empty()) throw Error(Errc::CorruptModel, "unexpected end of model file", line_);
    ++line_;
    const auto nl = rest_.find('\n');
    if (nl == std::string_view::npos) throw Error(Errc::CorruptModel, "unterminated line", line_);
    std::string_view line = rest_.substr(0, nl);
    rest_ = rest_.substr(nl + 1);
    return line;
  }

  /// Reads "<keyword> <rest>" and returns <rest>.
  std::string_view expect(std::string_view keyword) {
    std::string_view line = next();
    if (!text::starts_with(line, keyword) ||
        (line.size() > keyword.size() && line[keyword.size()] != ' '))
      throw Error(Errc::CorruptModel, "expected '" + std::string(keyword) + "'", line_);
    return line.size() > keyword.size() ? line.substr(keyword.size() + 1) : std::string_view{};
  }

  bool at_end() const { return rest_.empty(); }
  std::size_t line() const { return line_; }

 private:
  std::string_view rest_;
  std::size_t line_ = 0;
};

inline std::size_t parse_size(std::string_view s, std::size_t line) {
  const auto v = text::parse_index(s);
  if (!v) throw Error(Errc::CorruptModel, "bad number '" + std::string(s) + "'", line);
  return static_cast<std::size_t>(*v);
}

inline double parse_real(std::string_view s, std::size_t line) {
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size())
    throw Error(Errc::CorruptModel, "bad real '" + buf + "'", line);
  return v;
}

}  // namespace detail

inline TaggerModel parse_model(std::string_view content) {
  detail::LineReader in(content);
  if (content.empty() || in.next() != kModelMagic)
    throw Error(Errc::VersionMismatch, "not a thatsort tagger model");
  {
    const auto version = in.expect("format_version");
    if (version != std::to_string(TaggerModel::kFormatVersion))
      throw Error(Errc::VersionMismatch, "model format version " + std::string(version) +
                                             ", expected " + std::to_string(TaggerModel::kFormatVersion));
  }
  try {
    const auto pf = text::split_ws(in.expect("params"));
    if (pf.size() != 7) throw Error(Errc::CorruptModel, "params needs 7 fields", in.line());
    TrainParams params;
    params.min_leaf = static_cast<int>(detail::parse_size(pf[0], in.line()));
    params.gain_threshold = detail::parse_real(pf[1], in.line());
    params.suffix_len = static_cast<int>(detail::parse_size(pf[2], in.line()));
    params.smoothing = detail::parse_real(pf[3], in.line());
    params.suffix_weight = detail::parse_real(pf[4], in.line());
    params.rare_max = static_cast<int>(detail::parse_size(pf[5], in.line()));
    if (pf[6] != "0" && pf[6] != "1") throw Error(Errc::CorruptModel, "bad fold_case flag", in.line());
    params.fold_case = pf[6] == "1";
    if (!(params.smoothing > 0)) throw Error(Errc::CorruptModel, "smoothing must be positive", in.line());

    const std::size_t num_tags = detail::parse_size(in.expect("tagset"), in.line());
    std::vector<std::string> tagset;
    for (std::size_t i = 0; i < num_tags; ++i) tagset.emplace_back(in.next());
    const int nt = static_cast<int>(num_tags);

    auto unigrams = parse_counts(in.expect("unigrams"), nt);

    const std::size_t lex_size = detail::parse_size(in.expect("lexicon"), in.line());
    Lexicon lexicon(params.fold_case);
    for (std::size_t i = 0; i < lex_size; ++i) {
      const auto line = in.next();
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos) throw Error(Errc::CorruptModel, "bad lexicon line", in.line());
      for (const auto& [tag, c] : parse_counts(line.substr(tab + 1), nt)) lexicon.add(line.substr(0, tab), tag, c);
    }

    const auto gf = text::split_ws(in.expect("guesser"));
    if (gf.empty()) throw Error(Errc::CorruptModel, "bad guesser header", in.line());
    const std::size_t nodes_count = detail::parse_size(gf[0], in.line());
    std::vector<TagId> open;
    for (std::size_t i = 1; i < gf.size(); ++i) {
      const auto id = detail::parse_size(gf[i], in.line());
      if (id >= num_tags) throw Error(Errc::CorruptModel, "open-class id out of range", in.line());
      open.push_back(static_cast<TagId>(id));
    }
    SuffixGuesser guesser(params.suffix_len, *params.suffix_weight, open);
    for (std::size_t i = 0; i < nodes_count; ++i) {
      const auto parts = text::split(in.next(), '\t');
      if (parts.size() != 3 || (parts[0] != "U" && parts[0] != "L"))
        throw Error(Errc::CorruptModel, "bad guesser line", in.line());
      guesser.set_node(parts[0] == "U" ? SuffixGuesser::CaseClass::Upper : SuffixGuesser::CaseClass::Lower,
                       std::string(parts[1]), parse_counts(parts[2], nt));
    }

    const std::size_t tree_size = detail::parse_size(in.expect("tree"), in.line());
    std::vector<ContextTree::Node> nodes;
    for (std::size_t i = 0; i < tree_size; ++i) {
      const auto line = in.next();
      ContextTree::Node node;
      if (text::starts_with(line, "L")) {
        node.counts = parse_counts(line.substr(std::min<std::size_t>(line.size(), 2)), nt);
      } else {
        const auto f = text::split_ws(line);
        if (f.size() != 5 || f[0] != "S") throw Error(Errc::CorruptModel, "bad tree line", in.line());
        node.position = static_cast<int>(detail::parse_size(f[1], in.line()));
        node.value = static_cast<TagId>(detail::parse_size(f[2], in.line()));
        node.yes = static_cast<int>(detail::parse_size(f[3], in.line()));
        node.no = static_cast<int>(detail::parse_size(f[4], in.line()));
      }
      nodes.push_back(std::move(node));
    }
    if (in.next() != "end" || !in.at_end()) throw Error(Errc::CorruptModel, "trailing content", in.line());

    ContextTree tree(nt, params.smoothing, std::move(nodes));
    return TaggerModel(std::move(tagset), std::move(lexicon), std::move(guesser), std::move(tree),
                       std::move(unigrams), params);
  } catch (const Error& e) {
    if (e.code() == Errc::CorruptModel || e.code() == Errc::VersionMismatch) throw;
    throw Error(Errc::CorruptModel, e.what(), in.line());
  }
}

inline void save_model(const TaggerModel& model, const std::filesystem::path& path) {
  const std::string content = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

inline TaggerModel load_model(const std::filesystem::path& path) {
  return parse_model(text::read_file(path.string()));
}

}  // namespace thatsort::tagger
