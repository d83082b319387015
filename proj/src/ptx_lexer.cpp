/*
 * Copyright (c) 2026, the gpe authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gpe/ptx.hpp"

#include <cctype>

#include "gpe/error.hpp"

namespace gpe::ptx {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Mnemonics and directive bodies are dotted identifiers (add.s32, tid.x).
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '.';
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

bool is_hex_digit(char c) { return std::isxdigit(static_cast<unsigned char>(c)); }

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n && i < source.size(); ++j, ++i) {
      if (source[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto peek = [&](std::size_t off = 0) -> char {
    return i + off < source.size() ? source[i + off] : '\0';
  };
  auto push = [&](TokKind kind, std::string text, int tline, int tcol) {
    tokens.push_back(Token{kind, std::move(text), tline, tcol, false});
  };

  while (i < source.size()) {
    char c = source[i];
    int tline = line;
    int tcol = col;

    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (i < source.size() && source[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '*') {
      advance(2);
      bool closed = false;
      while (i < source.size()) {
        if (source[i] == '*' && peek(1) == '/') {
          advance(2);
          closed = true;
          break;
        }
        advance(1);
      }
      if (!closed) {
        throw Error(Errc::LexError, "unterminated block comment starting at line " +
                                        std::to_string(tline) + ", col " + std::to_string(tcol));
      }
      continue;
    }

    // Numeric literals. PTX hex floats: 0fXXXXXXXX (f32), 0dXXXXXXXXXXXXXXXX (f64).
    if (is_digit(c) || (c == '-' && is_digit(peek(1)))) {
      std::size_t start = i;
      if (c == '-') advance(1);
      if (peek() == '0' && (peek(1) == 'f' || peek(1) == 'F' || peek(1) == 'd' || peek(1) == 'D') &&
          is_hex_digit(peek(2))) {
        advance(2);
        while (is_hex_digit(peek())) advance(1);
        push(TokKind::FloatLit, std::string(source.substr(start, i - start)), tline, tcol);
        continue;
      }
      if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X') && is_hex_digit(peek(2))) {
        advance(2);
        while (is_hex_digit(peek())) advance(1);
        push(TokKind::IntLit, std::string(source.substr(start, i - start)), tline, tcol);
        continue;
      }
      while (is_digit(peek())) advance(1);
      bool is_float = false;
      if (peek() == '.' && is_digit(peek(1))) {
        is_float = true;
        advance(1);
        while (is_digit(peek())) advance(1);
      }
      if (peek() == 'e' || peek() == 'E') {
        std::size_t mark = i;
        int mark_col = col;
        advance(1);
        if (peek() == '+' || peek() == '-') advance(1);
        if (is_digit(peek())) {
          is_float = true;
          while (is_digit(peek())) advance(1);
        } else {
          i = mark;  // not an exponent; leave 'e...' for the next token
          col = mark_col;
        }
      }
      push(is_float ? TokKind::FloatLit : TokKind::IntLit,
           std::string(source.substr(start, i - start)), tline, tcol);
      continue;
    }

    if (c == '%') {
      std::size_t start = i;
      advance(1);
      if (!is_ident_start(peek()) && !is_digit(peek())) {
        throw Error(Errc::LexError, "stray '%' at line " + std::to_string(tline) + ", col " +
                                        std::to_string(tcol));
      }
      while (is_ident_char(peek())) advance(1);
      push(TokKind::Reg, std::string(source.substr(start, i - start)), tline, tcol);
      continue;
    }

    if (c == '.') {
      std::size_t start = i;
      advance(1);
      if (!is_ident_start(peek())) {
        throw Error(Errc::LexError, "stray '.' at line " + std::to_string(tline) + ", col " +
                                        std::to_string(tcol));
      }
      // Directive names stay single-segment (.reg, .param); a further dotted
      // tail such as .f32 arrives as its own Directive token.
      while (is_ident_char(peek()) && peek() != '.') advance(1);
      push(TokKind::Directive, std::string(source.substr(start, i - start)), tline, tcol);
      continue;
    }

    if (is_ident_start(c)) {
      std::size_t start = i;
      while (is_ident_char(peek())) advance(1);
      push(TokKind::Ident, std::string(source.substr(start, i - start)), tline, tcol);
      continue;
    }

    if (c == '@') {
      bool negated = false;
      advance(1);
      if (peek() == '!') {
        negated = true;
        advance(1);
      }
      Token tok{TokKind::Guard, negated ? "@!" : "@", tline, tcol, negated};
      tokens.push_back(std::move(tok));
      continue;
    }

    switch (c) {
      case ',': push(TokKind::Comma, ",", tline, tcol); advance(1); continue;
      case ';': push(TokKind::Semi, ";", tline, tcol); advance(1); continue;
      case ':': push(TokKind::Colon, ":", tline, tcol); advance(1); continue;
      case '{': push(TokKind::LBrace, "{", tline, tcol); advance(1); continue;
      case '}': push(TokKind::RBrace, "}", tline, tcol); advance(1); continue;
      case '(': push(TokKind::LParen, "(", tline, tcol); advance(1); continue;
      case ')': push(TokKind::RParen, ")", tline, tcol); advance(1); continue;
      case '[': push(TokKind::LBracket, "[", tline, tcol); advance(1); continue;
      case ']': push(TokKind::RBracket, "]", tline, tcol); advance(1); continue;
      case '+': push(TokKind::Plus, "+", tline, tcol); advance(1); continue;
      case '<': push(TokKind::Lt, "<", tline, tcol); advance(1); continue;
      case '>': push(TokKind::Gt, ">", tline, tcol); advance(1); continue;
      default:
        throw Error(Errc::LexError, std::string("illegal character '") + c + "' at line " +
                                        std::to_string(tline) + ", col " + std::to_string(tcol));
    }
  }

  return tokens;
}

}  // namespace gpe::ptx
