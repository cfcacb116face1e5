#pragma once

// Shared helpers for the test binaries: fixture paths, tiny CoNLL-U
// builders and a seeded generator for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "thatsort/thatsort.hpp"

namespace thatsort::testing {

inline std::string fixture(const std::string& name) { return std::string(THATSORT_FIXTURES) + "/" + name; }

struct Row {
  std::string form;
  std::string xpos;
  int head;
  std::string deprel;
  std::string upos = "_";
};

/// One sentence from rows; ids are 1-based positions.
inline Sentence sentence(const std::vector<Row>& rows) {
  Sentence s;
  int id = 1;
  for (const auto& r : rows) {
    Token t;
    t.id = id++;
    t.form = r.form;
    t.xpos = r.xpos;
    t.head = r.head;
    t.deprel = r.deprel;
    t.upos = r.upos;
    s.tokens.push_back(t);
  }
  return s;
}

inline Document document(std::vector<Sentence> sentences) {
  Document d;
  d.sentences = std::move(sentences);
  return d;
}

/// Random well-formed trees with a controllable share of "that" tokens and
/// acl / acl:relcl verbs.
class TreeGen {
 public:
  explicit TreeGen(std::uint32_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  Sentence sentence(int max_len = 14) {
    static const std::vector<std::string> forms = {"that", "That", "the", "fact", "book", "he", "left",
                                                   "saw",  "idea", "we",  "made", "a",    "it", ".",
                                                   "thatch", "than"};
    static const std::vector<std::string> xpos = {"IN", "WDT", "DT", "NN", "VBD", "VBZ", "VB",
                                                  "PRP", "JJ", "NNS", "RB", ".", "VBN"};
    static const std::vector<std::string> rels = {"acl", "acl:relcl", "nsubj", "obj", "mark",
                                                  "det", "advmod", "punct", "acl", "acl:relcl"};
    const int n = uniform(1, max_len);
    const int root = uniform(1, n);
    Sentence s;
    for (int id = 1; id <= n; ++id) {
      Token t;
      t.id = id;
      t.form = pick(forms);
      t.xpos = pick(xpos);
      if (id == root) {
        t.head = 0;
        t.deprel = "root";
      } else {
        do t.head = uniform(0, n);
        while (t.head == id || t.head == 0);
        t.deprel = pick(rels);
      }
      t.upos = t.xpos.rfind("NN", 0) == 0 ? "NOUN" : "X";
      s.tokens.push_back(t);
    }
    return s;
  }

  Document document(int max_sentences = 6) {
    Document d;
    const int k = uniform(1, max_sentences);
    for (int i = 0; i < k; ++i) d.sentences.push_back(sentence());
    return d;
  }

  std::mt19937& engine() { return rng_; }

 private:
  std::mt19937 rng_;
};

/// `files` identical training files: noun-complement "that" (CST) before a
/// pronoun subject, subject-relative "that" (WPR) before a finite verb, and
/// one determiner "that".
inline std::vector<Document> uniform_cst_files(std::size_t files) {
  const Document file = parse_slash_tagged(
      "the/DT fact/NN that/CST he/PRP left/VBD surprised/VBD us/PRP ./.\n"
      "the/DT idea/NN that/CST we/PRP won/VBD pleased/VBD them/PRP ./.\n"
      "a/DT claim/NN that/CST she/PRP lied/VBD spread/VBD ./.\n"
      "the/DT man/NN that/WPR lives/VBZ here/RB is/VBZ kind/JJ ./.\n"
      "the/DT dog/NN that/WPR sleeps/VBZ there/RB is/VBZ old/JJ ./.\n"
      "I/PRP like/VBP that/DT song/NN ./.\n");
  std::vector<Document> out(files, file);
  for (std::size_t i = 0; i < files; ++i) out[i].source_name = "file" + std::to_string(i);
  return out;
}

/// Gold test set in which every "that" introduces a noun complement, plus
/// one relative and one determiner use.
inline Document uniform_cst_test() {
  return parse_slash_tagged(
      "the/DT news/NN that/CST they/PRP left/VBD surprised/VBD us/PRP ./.\n"
      "the/DT fact/NN that/CST she/PRP won/VBD pleased/VBD them/PRP ./.\n"
      "a/DT hope/NN that/CST he/PRP lied/VBD spread/VBD ./.\n"
      "the/DT man/NN that/WPR sleeps/VBZ here/RB is/VBZ old/JJ ./.\n"
      "I/PRP like/VBP that/DT dog/NN ./.\n");
}

/// Synthetic corpus over the five tags A..E: 30 words, each allowed one to
/// three tags, sentences drawn from a random first-order tag chain.
inline std::vector<Document> five_tag_corpus(std::uint32_t seed, int sentences = 400) {
  std::mt19937 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::vector<std::string> tags = {"A", "B", "C", "D", "E"};
  std::vector<std::vector<std::string>> words_of(tags.size());
  for (int w = 0; w < 30; ++w) {
    const std::string form = (w % 7 == 0 ? "W" : "w") + std::to_string(w) + (w % 3 == 0 ? "ing" : "ed");
    const int k = uni(1, 3);
    for (int j = 0; j < k; ++j) words_of[static_cast<std::size_t>(uni(0, 4))].push_back(form);
  }
  for (auto& ws : words_of)
    if (ws.empty()) ws.push_back("filler" + std::to_string(&ws - words_of.data()));
  std::vector<std::vector<int>> next(tags.size() + 1);
  for (auto& row : next)
    for (int j = 0; j < 3; ++j) row.push_back(uni(0, 4));

  Document doc;
  for (int s = 0; s < sentences; ++s) {
    Sentence sent;
    int prev = 5;
    const int n = uni(1, 10);
    for (int i = 1; i <= n; ++i) {
      const int tag = uni(0, 4) == 0 ? uni(0, 4) : next[static_cast<std::size_t>(prev)][static_cast<std::size_t>(uni(0, 2))];
      const auto& ws = words_of[static_cast<std::size_t>(tag)];
      Token t;
      t.id = i;
      t.form = ws[static_cast<std::size_t>(uni(0, static_cast<int>(ws.size()) - 1))];
      t.xpos = tags[static_cast<std::size_t>(tag)];
      sent.tokens.push_back(t);
      prev = tag;
    }
    doc.sentences.push_back(std::move(sent));
  }
  return {doc};
}

/// Random sentence of 1..max_len forms over the vocabulary of `corpus`,
/// with an occasional unseen word.
inline std::vector<std::string> random_forms(const std::vector<Document>& corpus, std::mt19937& rng,
                                             int max_len = 8) {
  std::vector<std::string> vocab;
  for (const auto& d : corpus)
    for (const auto& s : d.sentences)
      for (const auto& t : s.tokens) vocab.push_back(t.form);
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  static const std::vector<std::string> unseen = {"zorging", "Qued", "blah", "xed", "Ving", "quux"};
  const int n = std::uniform_int_distribution<int>(1, max_len)(rng);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    if (std::uniform_int_distribution<int>(0, 9)(rng) == 0)
      out.push_back(unseen[std::uniform_int_distribution<std::size_t>(0, unseen.size() - 1)(rng)]);
    else
      out.push_back(vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)]);
  }
  return out;
}

/// Exhaustive argmax over all tag sequences, scored left to right exactly as
/// the decoder accumulates. Enumeration is in lexicographic tag-id order and
/// only a strictly better score replaces the incumbent.
inline std::vector<tagger::TagId> brute_force_tags(const tagger::TaggerModel& model,
                                                   const std::vector<std::string>& forms) {
  using tagger::TagId;
  const int t = model.num_tags();
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> log_e(forms.size(), std::vector<double>(static_cast<std::size_t>(t), ninf));
  for (std::size_t i = 0; i < forms.size(); ++i)
    for (const auto& [tag, e] : model.emissions(forms[i]))
      if (e > 0) log_e[i][static_cast<std::size_t>(tag)] = std::log(e);

  std::vector<TagId> current(forms.size()), best;
  double best_score = ninf;
  auto walk = [&](auto&& self, std::size_t i, double score) -> void {
    if (i == forms.size()) {
      if (best.empty() || score > best_score) {
        best = current;
        best_score = score;
      }
      return;
    }
    const TagId p2 = i >= 2 ? current[i - 2] : model.boundary();
    const TagId p1 = i >= 1 ? current[i - 1] : model.boundary();
    for (TagId tag = 0; tag < t; ++tag) {
      const double e = log_e[i][static_cast<std::size_t>(tag)];
      if (e == ninf) continue;
      current[i] = tag;
      self(self, i + 1, (score + model.log_transition(tag, p2, p1)) + e);
    }
  };
  walk(walk, 0, 0.0);
  return best;
}

}  // namespace thatsort::testing
