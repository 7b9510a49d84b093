#ifndef KGSYM_PARSE_HPP
#define KGSYM_PARSE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

#include "kgsym/expr.hpp"

namespace kgsym {

/// Syntax error with the byte offset of the failure and the set of tokens
/// that would have been accepted there.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t offset, std::string expected, const std::string& detail)
        : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " +
                             detail + " (expected " + expected + ")"),
          offset_(offset),
          expected_(std::move(expected)) {}
    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

  private:
    std::size_t offset_;
    std::string expected_;
};

/// Recursive-descent parser for the expression grammar:
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' unary | pow
///   pow   := atom ('^' unary)?
///   atom  := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
/// '^' binds tighter than unary minus and is right-associative. Subtraction,
/// division and unary minus desugar onto the sum/product/power node algebra.
/// Number literals become exact rationals. The returned tree is the raw AST
/// (no simplification).
Expr parse(const std::string& text);

}  // namespace kgsym

#endif
