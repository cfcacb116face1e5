#pragma once

// Shared document model for CoNLL-U treebanks and slash-tagged
// (Brown-style) corpora.

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "thatsort/error.hpp"
#include "thatsort/text.hpp"

namespace thatsort {

inline constexpr std::string_view kEmpty = "_";

/// One syntactic word: a CoNLL-U row. Empty columns hold "_".
struct Token {
  int id = 0;  ///< 1-based position within the sentence
  std::string form{kEmpty};
  std::string lemma{kEmpty};
  std::string upos{kEmpty};
  std::string xpos{kEmpty};
  std::string feats{kEmpty};
  int head = 0;  ///< 0 = root
  std::string deprel{kEmpty};
  std::string deps{kEmpty};
  std::string misc{kEmpty};

  friend bool operator==(const Token&, const Token&) = default;
};

/// A multiword-token line ("3-4\tdon't\t..."), kept verbatim.
struct MultiwordRange {
  int start = 0;
  int end = 0;
  std::string form;
  std::string raw;

  friend bool operator==(const MultiwordRange&, const MultiwordRange&) = default;
};

/// An empty-node line ("8.1\t..."), kept verbatim after token `after`.
struct EmptyNode {
  int after = 0;
  std::string raw;

  friend bool operator==(const EmptyNode&, const EmptyNode&) = default;
};

struct Sentence {
  std::vector<std::string> comments;  ///< full lines, including the leading '#'
  std::vector<Token> tokens;
  std::vector<MultiwordRange> multiword_ranges;
  std::vector<EmptyNode> empty_nodes;

  std::size_t size() const noexcept { return tokens.size(); }

  /// Token by 1-based id. Precondition: 1 <= id <= size().
  const Token& at_id(int id) const { return tokens[static_cast<std::size_t>(id - 1)]; }
  Token& at_id(int id) { return tokens[static_cast<std::size_t>(id - 1)]; }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Document {
  std::vector<Sentence> sentences;
  std::string source_name;

  std::size_t token_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }

  friend bool operator==(const Document& a, const Document& b) {
    return a.sentences == b.sentences;
  }
};

namespace detail {

inline std::string column(std::string_view field) {
  return field.empty() ? std::string(kEmpty) : std::string(field);
}

struct PendingSentence {
  Sentence sentence;
  std::vector<std::size_t> token_lines;
  bool has_content = false;
};

inline void check_heads(const PendingSentence& pending) {
  const auto n = static_cast<int>(pending.sentence.size());
  for (std::size_t i = 0; i < pending.sentence.tokens.size(); ++i) {
    const Token& t = pending.sentence.tokens[i];
    if (t.head < 0 || t.head > n || t.head == t.id) {
      throw Error(Errc::HeadOutOfRange,
                  "head " + std::to_string(t.head) + " of token " + std::to_string(t.id) +
                      " outside [0, " + std::to_string(n) + "] or self-referential",
                  pending.token_lines[i]);
    }
  }
}

}  // namespace detail

/// Parses CoNLL-U text. Line endings are normalized to "\n".
inline Document parse_conllu(std::string_view input, std::string source_name = {}) {
  const std::string text = text::normalize_newlines(input);
  Document doc;
  doc.source_name = std::move(source_name);

  detail::PendingSentence pending;
  auto flush = [&] {
    if (pending.has_content) {
      detail::check_heads(pending);
      doc.sentences.push_back(std::move(pending.sentence));
    }
    pending = {};
  };

  std::string_view rest = text;
  std::size_t line_no = 0;
  while (!rest.empty()) {
    ++line_no;
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);

    if (line.empty()) {
      flush();
      continue;
    }
    pending.has_content = true;
    if (line.front() == '#') {
      pending.sentence.comments.emplace_back(line);
      continue;
    }

    const auto fields = text::split(line, '\t');
    if (fields.size() != 10) {
      throw Error(Errc::MalformedLine,
                  "expected 10 tab-separated columns, found " + std::to_string(fields.size()),
                  line_no);
    }
    const std::string_view id = fields[0];
    if (const auto dash = id.find('-'); dash != std::string_view::npos) {
      const auto a = text::parse_index(id.substr(0, dash));
      const auto b = text::parse_index(id.substr(dash + 1));
      if (!a || !b || *a < 1 || *b < *a)
        throw Error(Errc::MalformedLine, "bad multiword range '" + std::string(id) + "'", line_no);
      pending.sentence.multiword_ranges.push_back(
          {*a, *b, std::string(fields[1]), std::string(line)});
      continue;
    }
    if (const auto dot = id.find('.'); dot != std::string_view::npos) {
      const auto a = text::parse_index(id.substr(0, dot));
      if (!a) throw Error(Errc::MalformedLine, "bad empty-node id '" + std::string(id) + "'", line_no);
      pending.sentence.empty_nodes.push_back({*a, std::string(line)});
      continue;
    }

    const auto token_id = text::parse_index(id);
    if (!token_id) throw Error(Errc::MalformedLine, "bad token id '" + std::string(id) + "'", line_no);
    const int expected = static_cast<int>(pending.sentence.tokens.size()) + 1;
    if (*token_id != expected) {
      throw Error(Errc::NonContiguousIds,
                  "expected id " + std::to_string(expected) + ", found " + std::string(id), line_no);
    }
    const auto head = text::parse_index(fields[6]);
    if (!head) throw Error(Errc::MalformedLine, "bad head '" + std::string(fields[6]) + "'", line_no);

    Token t;
    t.id = *token_id;
    t.form = detail::column(fields[1]);
    t.lemma = detail::column(fields[2]);
    t.upos = detail::column(fields[3]);
    t.xpos = detail::column(fields[4]);
    t.feats = detail::column(fields[5]);
    t.head = *head;
    t.deprel = detail::column(fields[7]);
    t.deps = detail::column(fields[8]);
    t.misc = detail::column(fields[9]);
    pending.sentence.tokens.push_back(std::move(t));
    pending.token_lines.push_back(line_no);
  }
  flush();
  return doc;
}

inline void append_token_row(std::string& out, const Token& t) {
  out += std::to_string(t.id);
  for (const std::string* f : {&t.form, &t.lemma, &t.upos, &t.xpos, &t.feats}) {
    out += '\t';
    out += f->empty() ? kEmpty : std::string_view(*f);
  }
  out += '\t';
  out += std::to_string(t.head);
  for (const std::string* f : {&t.deprel, &t.deps, &t.misc}) {
    out += '\t';
    out += f->empty() ? kEmpty : std::string_view(*f);
  }
  out += '\n';
}

inline std::string serialize_conllu(const Document& doc) {
  std::string out;
  for (const Sentence& s : doc.sentences) {
    for (const auto& c : s.comments) {
      out += c;
      out += '\n';
    }
    auto emit_empty_after = [&](int id) {
      for (const auto& e : s.empty_nodes)
        if (e.after == id) out += e.raw + '\n';
    };
    emit_empty_after(0);
    for (const Token& t : s.tokens) {
      for (const auto& mw : s.multiword_ranges)
        if (mw.start == t.id) out += mw.raw + '\n';
      append_token_row(out, t);
      emit_empty_after(t.id);
    }
    out += '\n';
  }
  return out;
}

/// Parses one-sentence-per-line "form/TAG" text. Each item is split on its
/// last '/', so "1/2/CD" is form "1/2" with tag "CD". Blank lines are skipped.
inline Document parse_slash_tagged(std::string_view input, std::string source_name = {}) {
  const std::string text = text::normalize_newlines(input);
  Document doc;
  doc.source_name = std::move(source_name);
  std::size_t line_no = 0;
  for (std::string_view line : text::split(text, '\n')) {
    ++line_no;
    const auto items = text::split_ws(line);
    if (items.empty()) continue;
    Sentence s;
    s.tokens.reserve(items.size());
    for (std::string_view item : items) {
      const std::size_t slash = item.rfind('/');
      if (slash == std::string_view::npos || slash == 0 || slash + 1 == item.size()) {
        throw Error(Errc::MissingTagSeparator, "item '" + std::string(item) + "' is not form/TAG",
                    line_no);
      }
      Token t;
      t.id = static_cast<int>(s.tokens.size()) + 1;
      t.form = std::string(item.substr(0, slash));
      t.xpos = std::string(item.substr(slash + 1));
      s.tokens.push_back(std::move(t));
    }
    doc.sentences.push_back(std::move(s));
  }
  return doc;
}

inline std::string serialize_slash_tagged(const Document& doc) {
  std::string out;
  for (const Sentence& s : doc.sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out += ' ';
      out += s.tokens[i].form;
      out += '/';
      out += s.tokens[i].xpos;
    }
    out += '\n';
  }
  return out;
}

/// Gold label of one "that" token in a test set.
struct GoldThatRecord {
  std::size_t sentence_index = 0;  ///< 0-based
  int token_id = 0;                ///< 1-based, as in the CoNLL-U id column
  std::string gold_tag;

  friend bool operator==(const GoldThatRecord&, const GoldThatRecord&) = default;
};

inline constexpr std::array<std::string_view, 5> kGoldThatTags = {"WPR", "CST", "DT", "IN", "WDT"};

/// Collects the gold tag (xpos) of every "that" token, case-insensitively.
inline std::vector<GoldThatRecord> load_gold_that(const Document& doc) {
  std::vector<GoldThatRecord> out;
  for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
    for (const Token& t : doc.sentences[si].tokens) {
      if (!text::is_that(t.form)) continue;
      if (std::find(kGoldThatTags.begin(), kGoldThatTags.end(), t.xpos) == kGoldThatTags.end()) {
        throw Error(Errc::UnknownGoldTag, "\"that\" at sentence " + std::to_string(si + 1) +
                                              " token " + std::to_string(t.id) + " carries tag '" +
                                              t.xpos + "'");
      }
      out.push_back({si, t.id, t.xpos});
    }
  }
  return out;
}

/// Reads a file as CoNLL-U when it ends in ".conllu" (or ".conll"),
/// slash-tagged text otherwise.
inline Document load_document(const std::string& path) {
  const std::string content = text::read_file(path);
  const bool conllu = path.ends_with(".conllu") || path.ends_with(".conll");
  return conllu ? parse_conllu(content, path) : parse_slash_tagged(content, path);
}

}  // namespace thatsort
