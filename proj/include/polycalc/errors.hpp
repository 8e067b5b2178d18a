#pragma once

#include <stdexcept>
#include <string>

namespace polycalc {

// Input that cannot be read at all (syntax, unknown tokens). CLI exit code 2.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
    explicit ParseError(const std::string& what_) : std::runtime_error(what_), line(0) {}
};

// Well-formed input that violates a semantic precondition. CLI exit code 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace polycalc
