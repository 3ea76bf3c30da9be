// SPDX-License-Identifier: Apache-2.0
//
// Text ingestion: UTF-8 tokenization into lowercase letter runs, and the
// occupancy/estimator pipeline applied to real texts.
//
// Letter coverage spans U+0000..U+052F (Basic Latin through Cyrillic
// Supplement, so Latin, Greek, and Cyrillic scripts); code points above
// that range act as word separators. Case folding is the one-to-one
// lowercase mapping from the Unicode character database; the handful of
// code points whose lowercase form expands to multiple code points are
// kept as they are. Apostrophes, hyphens, and digits split tokens.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "urnlab/analysis.hpp"
#include "urnlab/occupancy.hpp"

namespace urnlab::corpus {

struct TokenizerRules {
  bool fold_case = true;
};

bool is_letter(char32_t cp);
char32_t fold_letter(char32_t cp);

struct TokenStream {
  std::string source;
  std::vector<std::string> tokens;
  std::uint64_t n = 0;  // equals tokens.size()
};

// Splits UTF-8 text into tokens. Invalid UTF-8 raises std::runtime_error
// naming the byte offset of the offending sequence.
TokenStream tokenize(std::string_view text, const TokenizerRules& rules = {},
                     std::string source = "<memory>");

using TokenSink = std::function<void(std::string&&)>;

// Incremental tokenizer used by the streaming file path. Bytes may be fed
// in arbitrary chunks; multi-byte sequences and tokens crossing chunk
// boundaries are carried over. finish() flushes the last token and rejects
// a truncated trailing sequence.
class StreamTokenizer {
 public:
  explicit StreamTokenizer(TokenizerRules rules = {}) : rules_(rules) {}

  void feed(std::string_view chunk, const TokenSink& sink);
  void finish(const TokenSink& sink);

 private:
  void emit(char32_t cp, const TokenSink& sink);
  void flush(const TokenSink& sink);
  [[noreturn]] void fail(std::uint64_t offset) const;

  TokenizerRules rules_;
  std::string pending_;  // incomplete trailing multi-byte sequence
  std::string token_;
  std::uint64_t offset_ = 0;  // absolute offset of the next undecoded byte
};

struct TextAnalysis {
  Trajectory trajectory;
  analysis::EstimatorResult estimators;
  std::uint64_t vocabulary = 0;
  // Distinct tokens in first-occurrence order; token at index i carries
  // urn id i + 1, so the mapping is a bijection onto 1..R_n.
  std::vector<std::string> vocabulary_order;
};

// Feeds the stream through the occupancy pipeline (urn ids assigned by
// first occurrence) and computes both estimators. Needs n >= 2.
TextAnalysis analyze_text(const TokenStream& stream, std::uint32_t kmax = 10);

// Two-pass streaming variant: the first pass counts tokens to fix the
// checkpoint schedule, the second feeds them. Memory stays proportional
// to the vocabulary, not the text.
TextAnalysis analyze_file(const std::string& path, std::uint32_t kmax = 10,
                          const TokenizerRules& rules = {});

}  // namespace urnlab::corpus
