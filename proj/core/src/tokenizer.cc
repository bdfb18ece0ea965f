#include "ersearch/tokenizer.h"

#include "ersearch/utf8.h"

namespace ersearch {

bool IsWordChar(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  }
  // Latin-1 punctuation and symbols are separators; the multiplication and
  // division signs sit inside the letter block.
  if (cp < 0xC0) return false;
  return cp != 0xD7 && cp != 0xF7;
}

bool IsUpper(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  return cp >= 0xC0 && cp <= 0xDE && cp != 0xD7;
}

char32_t ToLower(char32_t cp) { return IsUpper(cp) ? cp + 0x20 : cp; }

std::vector<Token> TokenizeWithOffsets(std::u32string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!IsWordChar(text[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    std::u32string word;
    while (i < text.size() && IsWordChar(text[i])) word.push_back(ToLower(text[i++]));
    tokens.push_back({utf8::Encode(word), start, i});
  }
  return tokens;
}

std::vector<std::string> Tokenize(std::string_view utf8_text) {
  std::vector<std::string> out;
  for (auto &token : TokenizeWithOffsets(utf8::Decode(utf8_text))) {
    out.push_back(std::move(token.text));
  }
  return out;
}

}  // namespace ersearch
