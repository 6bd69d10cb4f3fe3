#ifndef EXARRAY_ERROR_HPP
#define EXARRAY_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace exarray {

/**
 * Base class of every error raised by the library. The CLI maps each
 * subclass onto a distinct exit status.
 */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed parameters, shape mismatches, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/**
 * Exact enumeration would exceed the configured term budget. Carries the
 * number of terms requested so callers can suggest the Monte Carlo path.
 */
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, double terms, double budget)
      : Error(what), terms_(terms), budget_(budget) {}
  double terms() const { return terms_; }
  double budget() const { return budget_; }

 private:
  double terms_;
  double budget_;
};

/// A conditional estimate had no (or too few) conditioning events.
class InsufficientData : public Error {
 public:
  InsufficientData(const std::string& what, std::uint64_t events, std::uint64_t runs)
      : Error(what), events_(events), runs_(runs) {}
  std::uint64_t events() const { return events_; }
  std::uint64_t runs() const { return runs_; }

 private:
  std::uint64_t events_;
  std::uint64_t runs_;
};

}  // namespace exarray

#endif  // EXARRAY_ERROR_HPP
