#pragma once

#include <memory>
#include <string>
#include <vector>

namespace nsa {

// Minimal s-expression reader shared by the formula, term, script and
// interpretation parsers. Atoms are bare tokens (symbols or numerals); lists
// are parenthesised sequences. Every node remembers the 1-based line/column of
// its first character so later passes can point at the offending subtree.
struct Sexp {
  enum class Kind { Atom, List };

  Kind kind = Kind::Atom;
  std::string atom;          // valid when kind == Atom
  std::vector<Sexp> items;   // valid when kind == List
  int line = 0;
  int col = 0;

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_list() const { return kind == Kind::List; }
  bool is_atom(const std::string& s) const { return is_atom() && atom == s; }

  // True for lists of the shape (head ...).
  bool headed(const std::string& head) const {
    return is_list() && !items.empty() && items[0].is_atom(head);
  }

  std::string where() const {
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
  }
};

// Parses the entire input, requiring exactly one toplevel form.
// Throws Error("SyntaxError", ...) on malformed input.
Sexp parse_sexp(const std::string& text);

// Parses a sequence of zero or more toplevel forms.
std::vector<Sexp> parse_sexps(const std::string& text);

// Renders a tree back to text (single line, canonical single spaces).
std::string to_string(const Sexp& s);

}  // namespace nsa
