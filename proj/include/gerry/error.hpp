#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gerry {

// Base for every failure raised by the library. Value-level "undefined"
// results (e.g. a one-party sweep) are std::optional, never exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyElection : public Error {
 public:
  EmptyElection() : Error("election has no districts") {}
};

class InvalidShare : public Error {
 public:
  InvalidShare(std::size_t index, double value)
      : Error("share at index " + std::to_string(index) + " is outside [0,1]: " +
              std::to_string(value)),
        index_(index),
        value_(value) {}

  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t index_;
  double value_;
};

class InvalidTau : public Error {
 public:
  explicit InvalidTau(double tau)
      : Error("tau must be finite and nonnegative, got " + std::to_string(tau)) {}
};

class InvalidPlan : public Error {
 public:
  explicit InvalidPlan(std::string reason)
      : Error("invalid plan: " + reason), reason_(std::move(reason)) {}

  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

class DegenerateElection : public Error {
 public:
  DegenerateElection() : Error("election is a one-party sweep (k = 0 or k' = 0)") {}
};

class UndefinedDeclination : public Error {
 public:
  UndefinedDeclination() : Error("declination is undefined for a one-party sweep") {}
};

class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(std::vector<std::string> missing);

  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

class BothZero : public Error {
 public:
  BothZero() : Error("both vote counts are zero") {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& what) : Error("insufficient data: " + what) {}
};

class MissingEffect : public Error {
 public:
  explicit MissingEffect(const std::string& district)
      : Error("no fitted district effect for " + district) {}
};

class EmptyEffectPool : public Error {
 public:
  EmptyEffectPool() : Error("no district effects available to draw from") {}
};

}  // namespace gerry
