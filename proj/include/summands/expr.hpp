#pragma once

#include <string>
#include <string_view>

#include "summands/polyring.hpp"

namespace summands {

// Error raised while reading an expression, with the byte offset into the
// text that was being parsed.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, size_t offset, const std::string& msg) : Error(code, msg), offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

// Skip blanks and '#' comments.
void skip_space(std::string_view text, size_t& pos);

// Polynomial over `ring` read from text[pos...]; stops before the first
// character that cannot continue the expression and leaves `pos` there.
// Grammar: sums of products of powers of integers, variables, the field
// generator and parenthesised expressions; '/' only by integer constants.
Poly parse_expression(const Ring& ring, std::string_view text, size_t& pos, bool implicit_mult = false);

// Whole string must be one expression.
Poly parse_poly(const Ring& ring, std::string_view text, bool implicit_mult = false);

}  // namespace summands
