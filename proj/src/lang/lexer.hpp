#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ttd/lang/types.hpp"

namespace ttd::lang {

enum class Tok : uint8_t {
  End,
  Ident,
  Number,
  String,
  Punct,  // operators and delimiters; spelling in `text`
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0;
  uint32_t line = 1;
  uint32_t col = 1;
};

std::vector<Token> tokenize(std::string_view source);

}  // namespace ttd::lang
