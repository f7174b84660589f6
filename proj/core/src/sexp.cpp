#include "nsa/sexp.hpp"

#include <cctype>

#include "nsa/errors.hpp"

namespace nsa {
namespace {

struct Lexer {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  explicit Lexer(const std::string& t) : text(t) {}

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  char advance() {
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (!eof()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' ||
           std::isspace(static_cast<unsigned char>(c));
  }

  Sexp read() {
    skip_space_and_comments();
    if (eof()) fail("SyntaxError", "unexpected end of input");
    int l = line, c = col;
    if (peek() == '(') {
      advance();
      Sexp node;
      node.kind = Sexp::Kind::List;
      node.line = l;
      node.col = c;
      while (true) {
        skip_space_and_comments();
        if (eof())
          fail("SyntaxError", "unclosed '(' opened at line " +
                                  std::to_string(l) + ", column " +
                                  std::to_string(c));
        if (peek() == ')') {
          advance();
          return node;
        }
        node.items.push_back(read());
      }
    }
    if (peek() == ')')
      fail("SyntaxError", "unexpected ')' at line " + std::to_string(l) +
                              ", column " + std::to_string(c));
    Sexp node;
    node.kind = Sexp::Kind::Atom;
    node.line = l;
    node.col = c;
    while (!eof() && !is_delim(peek())) node.atom.push_back(advance());
    return node;
  }
};

}  // namespace

std::vector<Sexp> parse_sexps(const std::string& text) {
  Lexer lx(text);
  std::vector<Sexp> out;
  while (true) {
    lx.skip_space_and_comments();
    if (lx.eof()) break;
    out.push_back(lx.read());
  }
  return out;
}

Sexp parse_sexp(const std::string& text) {
  auto forms = parse_sexps(text);
  if (forms.empty()) fail("SyntaxError", "empty input, expected one form");
  if (forms.size() > 1)
    fail("SyntaxError", "expected a single form, found a second one at " +
                            forms[1].where());
  return forms[0];
}

std::string to_string(const Sexp& s) {
  if (s.is_atom()) return s.atom;
  std::string out = "(";
  for (size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ' ';
    out += to_string(s.items[i]);
  }
  out += ')';
  return out;
}

}  // namespace nsa
