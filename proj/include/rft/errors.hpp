#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rft {

  class error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  // A symbol that is not declared in the alphabet in use.
  class alphabet_error : public error {
   public:
    using error::error;
  };

  // An operation applied outside its domain (trivial word to a root
  // extraction, bounded surface to Dehn's algorithm, ...).
  class domain_error : public error {
   public:
    using error::error;
  };

  // A validity obligation of a tower block or embedding failed.
  class obligation_error : public error {
   public:
    obligation_error(std::string check, std::string const& detail)
        : error(check + ": " + detail), check_(std::move(check)) {}
    std::string const& check() const noexcept { return check_; }

   private:
    std::string check_;
  };

  class parse_error : public error {
   public:
    parse_error(std::string const& msg, std::size_t line, std::size_t column)
        : error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

   private:
    std::size_t line_;
    std::size_t column_;
  };

}  // namespace rft
