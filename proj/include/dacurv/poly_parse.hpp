#pragma once

#include <string_view>

#include "dacurv/polynomial.hpp"

namespace dacurv {

/// Parse text such as "3/2*z1^2*z3 - z2" into an exact polynomial.
///
/// Grammar (whitespace ignored):
///   poly   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor (('*' | '/') factor)*     -- '/' only before a number
///   factor := number | 'z' index ['^' number] | '(' poly ')'
/// Throws ParseError with a 1-based column relative to text, offset by
/// (line, column_offset) so callers embedding the string elsewhere can report
/// positions in their own file.
Polynomial parse_polynomial(std::string_view text, std::size_t line = 1,
                            std::size_t column_offset = 0);

}  // namespace dacurv
