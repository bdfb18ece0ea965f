#ifndef ERSEARCH_TOKENIZER_H_
#define ERSEARCH_TOKENIZER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ersearch {

// A token with its code-point span [start, end) in the source text.
struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
};

// Shared tokenizer for corpus text and query terms: lowercase, split on
// anything that is not alphanumeric, drop empty tokens. Non-ASCII code
// points count as word characters; ASCII and Latin-1 letters are folded.
std::vector<Token> TokenizeWithOffsets(std::u32string_view text);

std::vector<std::string> Tokenize(std::string_view utf8_text);

bool IsWordChar(char32_t cp);
bool IsUpper(char32_t cp);
char32_t ToLower(char32_t cp);

}  // namespace ersearch

#endif  // ERSEARCH_TOKENIZER_H_
