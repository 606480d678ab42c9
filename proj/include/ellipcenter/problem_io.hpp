#pragma once

// Problem text format (whitespace separated decimals):
//
//   diag n            | dense n            | rank1 n sigma
//   <n diagonal entries | n rows of n entries | n entries of v>
//   b
//   <n entries>
//   c <value>         (optional)
//
// Lines starting with '#' are ignored.

#include "ellipcenter/quad_core.hpp"

#include <iosfwd>
#include <string>

namespace ellipcenter {

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message);

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

QuadraticProblem parse_problem(std::istream& in, const std::string& source = "<stream>");
QuadraticProblem load_problem(const std::string& path);

/// Writes the same format with 17 significant digits.
void write_problem(std::ostream& out, const QuadraticProblem& p);
void save_problem(const std::string& path, const QuadraticProblem& p);

}  // namespace ellipcenter
