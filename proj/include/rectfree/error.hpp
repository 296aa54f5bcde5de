#pragma once

#include <stdexcept>
#include <string>

namespace rectfree {

/// Base class of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A combinatorial enumeration was asked for more than its configured limit.
class SizeLimitError : public Error {
 public:
  SizeLimitError(const std::string& what, int requested, int limit)
      : Error(what + ": requested " + std::to_string(requested) + ", limit " +
              std::to_string(limit)),
        requested_(requested),
        limit_(limit) {}
  int requested() const { return requested_; }
  int limit() const { return limit_; }

 private:
  int requested_;
  int limit_;
};

/// Invalid argument: wrong order, non-normalized measure, point on a cut, ...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Numerical inversion left the domain where it could be certified.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double certified_beta)
      : Error(what + " (largest certified beta " + std::to_string(certified_beta) + ")"),
        certified_beta_(certified_beta) {}
  double certified_beta() const { return certified_beta_; }

 private:
  double certified_beta_;
};

/// Malformed input file or command-line value.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace rectfree
