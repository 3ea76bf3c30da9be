// SPDX-License-Identifier: Apache-2.0

#include "urnlab/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace urnlab::corpus {

namespace {

struct Range {
  char32_t lo, hi;
};

// Letter-category code points below U+0530, from the Unicode character
// database.
constexpr Range kLetterRanges[] = {
    {0x0041, 0x005A}, {0x0061, 0x007A}, {0x00AA, 0x00AA}, {0x00B5, 0x00B5},
    {0x00BA, 0x00BA}, {0x00C0, 0x00D6}, {0x00D8, 0x00F6}, {0x00F8, 0x02C1},
    {0x02C6, 0x02D1}, {0x02E0, 0x02E4}, {0x02EC, 0x02EC}, {0x02EE, 0x02EE},
    {0x0370, 0x0374}, {0x0376, 0x0377}, {0x037A, 0x037D}, {0x037F, 0x037F},
    {0x0386, 0x0386}, {0x0388, 0x038A}, {0x038C, 0x038C}, {0x038E, 0x03A1},
    {0x03A3, 0x03F5}, {0x03F7, 0x0481}, {0x048A, 0x052F},
};

struct FoldPair {
  char32_t from, to;
};

// Lowercase mappings that the uniform range rules below do not produce.
// U+0130 maps to itself: its true lowercase form expands to two code
// points, and this tokenizer folds one-to-one only.
constexpr FoldPair kIrregularFolds[] = {
    {0x0130, 0x0130}, {0x0178, 0x00FF}, {0x0181, 0x0253}, {0x0182, 0x0183},
    {0x0184, 0x0185}, {0x0186, 0x0254}, {0x0187, 0x0188}, {0x0189, 0x0256},
    {0x018A, 0x0257}, {0x018B, 0x018C}, {0x018E, 0x01DD}, {0x018F, 0x0259},
    {0x0190, 0x025B}, {0x0191, 0x0192}, {0x0193, 0x0260}, {0x0194, 0x0263},
    {0x0196, 0x0269}, {0x0197, 0x0268}, {0x0198, 0x0199}, {0x019C, 0x026F},
    {0x019D, 0x0272}, {0x019F, 0x0275}, {0x01A0, 0x01A1}, {0x01A2, 0x01A3},
    {0x01A4, 0x01A5}, {0x01A6, 0x0280}, {0x01A7, 0x01A8}, {0x01A9, 0x0283},
    {0x01AC, 0x01AD}, {0x01AE, 0x0288}, {0x01AF, 0x01B0}, {0x01B1, 0x028A},
    {0x01B2, 0x028B}, {0x01B3, 0x01B4}, {0x01B5, 0x01B6}, {0x01B7, 0x0292},
    {0x01B8, 0x01B9}, {0x01BC, 0x01BD}, {0x01C4, 0x01C6}, {0x01C5, 0x01C6},
    {0x01C7, 0x01C9}, {0x01C8, 0x01C9}, {0x01CA, 0x01CC}, {0x01CB, 0x01CC},
    {0x01CD, 0x01CE}, {0x01CF, 0x01D0}, {0x01D1, 0x01D2}, {0x01D3, 0x01D4},
    {0x01D5, 0x01D6}, {0x01D7, 0x01D8}, {0x01D9, 0x01DA}, {0x01DB, 0x01DC},
    {0x01DE, 0x01DF}, {0x01E0, 0x01E1}, {0x01E2, 0x01E3}, {0x01E4, 0x01E5},
    {0x01E6, 0x01E7}, {0x01E8, 0x01E9}, {0x01EA, 0x01EB}, {0x01EC, 0x01ED},
    {0x01EE, 0x01EF}, {0x01F1, 0x01F3}, {0x01F2, 0x01F3}, {0x01F4, 0x01F5},
    {0x01F6, 0x0195}, {0x01F7, 0x01BF}, {0x01F8, 0x01F9}, {0x01FA, 0x01FB},
    {0x01FC, 0x01FD}, {0x01FE, 0x01FF}, {0x0200, 0x0201}, {0x0202, 0x0203},
    {0x0204, 0x0205}, {0x0206, 0x0207}, {0x0208, 0x0209}, {0x020A, 0x020B},
    {0x020C, 0x020D}, {0x020E, 0x020F}, {0x0210, 0x0211}, {0x0212, 0x0213},
    {0x0214, 0x0215}, {0x0216, 0x0217}, {0x0218, 0x0219}, {0x021A, 0x021B},
    {0x021C, 0x021D}, {0x021E, 0x021F}, {0x0220, 0x019E}, {0x0222, 0x0223},
    {0x0224, 0x0225}, {0x0226, 0x0227}, {0x0228, 0x0229}, {0x022A, 0x022B},
    {0x022C, 0x022D}, {0x022E, 0x022F}, {0x0230, 0x0231}, {0x0232, 0x0233},
    {0x023A, 0x2C65}, {0x023B, 0x023C}, {0x023D, 0x019A}, {0x023E, 0x2C66},
    {0x0241, 0x0242}, {0x0243, 0x0180}, {0x0244, 0x0289}, {0x0245, 0x028C},
    {0x0246, 0x0247}, {0x0248, 0x0249}, {0x024A, 0x024B}, {0x024C, 0x024D},
    {0x024E, 0x024F}, {0x0370, 0x0371}, {0x0372, 0x0373}, {0x0376, 0x0377},
    {0x037F, 0x03F3}, {0x0386, 0x03AC}, {0x0388, 0x03AD}, {0x0389, 0x03AE},
    {0x038A, 0x03AF}, {0x038C, 0x03CC}, {0x038E, 0x03CD}, {0x038F, 0x03CE},
    {0x03CF, 0x03D7}, {0x03D8, 0x03D9}, {0x03DA, 0x03DB}, {0x03DC, 0x03DD},
    {0x03DE, 0x03DF}, {0x03E0, 0x03E1}, {0x03E2, 0x03E3}, {0x03E4, 0x03E5},
    {0x03E6, 0x03E7}, {0x03E8, 0x03E9}, {0x03EA, 0x03EB}, {0x03EC, 0x03ED},
    {0x03EE, 0x03EF}, {0x03F4, 0x03B8}, {0x03F7, 0x03F8}, {0x03F9, 0x03F2},
    {0x03FA, 0x03FB}, {0x03FD, 0x037B}, {0x03FE, 0x037C}, {0x03FF, 0x037D},
    {0x04C0, 0x04CF},
};

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Expected sequence length for a lead byte; 0 marks an invalid lead.
int lead_length(unsigned char b) {
  if (b < 0x80) return 1;
  if (b < 0xC2) return 0;  // continuation or overlong lead
  if (b < 0xE0) return 2;
  if (b < 0xF0) return 3;
  if (b < 0xF5) return 4;
  return 0;
}

bool is_cont(unsigned char b) { return (b & 0xC0) == 0x80; }

// Decodes one complete sequence of `len` bytes at `s`. Returns false on a
// malformed sequence (bad continuation, overlong form, surrogate, out of
// range).
bool decode_sequence(const unsigned char* s, int len, char32_t& cp) {
  switch (len) {
    case 1:
      cp = s[0];
      return true;
    case 2:
      if (!is_cont(s[1])) return false;
      cp = (static_cast<char32_t>(s[0] & 0x1F) << 6) | (s[1] & 0x3F);
      return true;
    case 3:
      if (!is_cont(s[1]) || !is_cont(s[2])) return false;
      if (s[0] == 0xE0 && s[1] < 0xA0) return false;  // overlong
      if (s[0] == 0xED && s[1] > 0x9F) return false;  // surrogate
      cp = (static_cast<char32_t>(s[0] & 0x0F) << 12) |
           (static_cast<char32_t>(s[1] & 0x3F) << 6) | (s[2] & 0x3F);
      return true;
    case 4:
      if (!is_cont(s[1]) || !is_cont(s[2]) || !is_cont(s[3])) return false;
      if (s[0] == 0xF0 && s[1] < 0x90) return false;  // overlong
      if (s[0] == 0xF4 && s[1] > 0x8F) return false;  // above U+10FFFF
      cp = (static_cast<char32_t>(s[0] & 0x07) << 18) |
           (static_cast<char32_t>(s[1] & 0x3F) << 12) |
           (static_cast<char32_t>(s[2] & 0x3F) << 6) | (s[3] & 0x3F);
      return true;
    default:
      return false;
  }
}

}  // namespace

bool is_letter(char32_t cp) {
  if (cp < 0x80)
    return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
  auto it = std::upper_bound(
      std::begin(kLetterRanges), std::end(kLetterRanges), cp,
      [](char32_t v, const Range& r) { return v < r.lo; });
  return it != std::begin(kLetterRanges) && cp <= (it - 1)->hi;
}

char32_t fold_letter(char32_t cp) {
  auto it = std::lower_bound(
      std::begin(kIrregularFolds), std::end(kIrregularFolds), cp,
      [](const FoldPair& p, char32_t v) { return p.from < v; });
  if (it != std::end(kIrregularFolds) && it->from == cp) return it->to;
  if (cp >= 0x41 && cp <= 0x5A) return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x137 && cp % 2 == 0) return cp + 1;
  if (cp >= 0x139 && cp <= 0x147 && cp % 2 == 1) return cp + 1;
  if (cp >= 0x14A && cp <= 0x176 && cp % 2 == 0) return cp + 1;
  if (cp >= 0x179 && cp <= 0x17D && cp % 2 == 1) return cp + 1;
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x460 && cp <= 0x480 && cp % 2 == 0) return cp + 1;
  if (cp >= 0x48A && cp <= 0x4BE && cp % 2 == 0) return cp + 1;
  if (cp >= 0x4C1 && cp <= 0x4CD && cp % 2 == 1) return cp + 1;
  if (cp >= 0x4D0 && cp <= 0x4FE && cp % 2 == 0) return cp + 1;
  if (cp >= 0x500 && cp <= 0x52E && cp % 2 == 0) return cp + 1;
  return cp;
}

void StreamTokenizer::fail(std::uint64_t offset) const {
  throw std::runtime_error("invalid UTF-8 byte sequence at byte offset " +
                           std::to_string(offset));
}

void StreamTokenizer::emit(char32_t cp, const TokenSink& sink) {
  if (is_letter(cp)) {
    encode_utf8(rules_.fold_case ? fold_letter(cp) : cp, token_);
  } else {
    flush(sink);
  }
}

void StreamTokenizer::flush(const TokenSink& sink) {
  if (!token_.empty()) {
    sink(std::move(token_));
    token_.clear();
  }
}

void StreamTokenizer::feed(std::string_view chunk, const TokenSink& sink) {
  std::size_t i = 0;

  // Complete a sequence left dangling by the previous chunk.
  while (!pending_.empty() && i < chunk.size()) {
    pending_.push_back(chunk[i++]);
    int len = lead_length(static_cast<unsigned char>(pending_[0]));
    if (static_cast<int>(pending_.size()) < len) continue;
    char32_t cp;
    if (!decode_sequence(
            reinterpret_cast<const unsigned char*>(pending_.data()), len, cp))
      fail(offset_);
    offset_ += static_cast<std::uint64_t>(len);
    pending_.clear();
    emit(cp, sink);
  }

  while (i < chunk.size()) {
    unsigned char lead = static_cast<unsigned char>(chunk[i]);
    int len = lead_length(lead);
    if (len == 0) fail(offset_);
    if (i + static_cast<std::size_t>(len) > chunk.size()) {
      pending_.assign(chunk.substr(i));
      return;
    }
    char32_t cp;
    if (!decode_sequence(
            reinterpret_cast<const unsigned char*>(chunk.data()) + i, len, cp))
      fail(offset_);
    i += static_cast<std::size_t>(len);
    offset_ += static_cast<std::uint64_t>(len);
    emit(cp, sink);
  }
}

void StreamTokenizer::finish(const TokenSink& sink) {
  if (!pending_.empty()) fail(offset_);
  flush(sink);
}

TokenStream tokenize(std::string_view text, const TokenizerRules& rules,
                     std::string source) {
  TokenStream ts;
  ts.source = std::move(source);
  StreamTokenizer st(rules);
  auto sink = [&ts](std::string&& tok) { ts.tokens.push_back(std::move(tok)); };
  st.feed(text, sink);
  st.finish(sink);
  ts.n = ts.tokens.size();
  return ts;
}

namespace {

// Shared pipeline: n is known, tokens arrive through `pump`, which calls
// its argument once per token in order.
TextAnalysis analyze_pipeline(
    std::uint64_t n, std::uint32_t kmax, const std::string& source,
    const std::function<void(const TokenSink&)>& pump) {
  if (n < 2)
    throw std::invalid_argument(
        "text has fewer than 2 tokens; estimators are undefined");
  if (kmax < 1) throw std::invalid_argument("kmax must be at least 1");

  OccupancyState state(kmax);
  CheckpointRecorder rec(checkpoint_schedule(n, ScheduleKind::both), kmax);
  TextAnalysis out;
  std::unordered_map<std::string, std::uint64_t> ids;
  std::uint64_t placed = 0;

  pump([&](std::string&& tok) {
    auto [it, inserted] = ids.try_emplace(std::move(tok), ids.size() + 1);
    if (inserted) out.vocabulary_order.push_back(it->first);
    place_ball(state, it->second);
    ++placed;
    if (rec.due(placed)) rec.record(state, placed);
  });
  if (placed != n)
    throw std::runtime_error("token stream changed length between passes");

  out.trajectory = rec.take("text n=" + std::to_string(n) +
                            " source=" + source);
  out.estimators = analysis::estimate_theta(out.trajectory);
  out.vocabulary = ids.size();
  return out;
}

}  // namespace

TextAnalysis analyze_text(const TokenStream& stream, std::uint32_t kmax) {
  return analyze_pipeline(stream.n, kmax, stream.source,
                          [&stream](const TokenSink& sink) {
                            for (const std::string& t : stream.tokens)
                              sink(std::string(t));
                          });
}

TextAnalysis analyze_file(const std::string& path, std::uint32_t kmax,
                          const TokenizerRules& rules) {
  constexpr std::size_t kChunk = 1 << 16;
  auto for_each_token = [&](const TokenSink& sink) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    StreamTokenizer st(rules);
    std::string buf(kChunk, '\0');
    while (in) {
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      std::streamsize got = in.gcount();
      if (got <= 0) break;
      st.feed(std::string_view(buf.data(), static_cast<std::size_t>(got)),
              sink);
    }
    st.finish(sink);
  };

  std::uint64_t n = 0;
  for_each_token([&n](std::string&&) { ++n; });
  return analyze_pipeline(n, kmax, path, for_each_token);
}

}  // namespace urnlab::corpus
