#ifndef ERSEARCH_UTF8_H_
#define ERSEARCH_UTF8_H_

#include <string>
#include <string_view>

namespace ersearch::utf8 {

// Decodes UTF-8 into code points. Invalid bytes decode as U+FFFD.
std::u32string Decode(std::string_view bytes);

std::string Encode(std::u32string_view code_points);

// Number of code points in a UTF-8 string.
std::size_t Length(std::string_view bytes);

}  // namespace ersearch::utf8

#endif  // ERSEARCH_UTF8_H_
