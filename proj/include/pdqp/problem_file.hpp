#pragma once

#include "pdqp/driver.hpp"

#include <string>

namespace pdqp {

// Raised for malformed input. line is 1-based, 0 when the error is not tied
// to a single line.
class ParseError : public ModelError {
 public:
  ParseError(const std::string& origin, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Reads the "QPT 1" text format (see docs/problem-format.md).
GeneralQp parse_problem(const std::string& path);
GeneralQp parse_problem_text(const std::string& text, const std::string& origin = "<string>");

// Shortest round-trip form for every value, so parse(write(g)) == g.
std::string write_problem(const GeneralQp& g);
void write_problem_file(const GeneralQp& g, const std::string& path);

bool same_data(const GeneralQp& a, const GeneralQp& b);

// Formats a double so that strtod reads back the identical value. Infinite
// values print as inf / -inf.
std::string format_double(double v);

}  // namespace pdqp
