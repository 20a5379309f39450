// Exception types shared by all crext modules.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace crext {

using cplx = std::complex<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was not met by its arguments.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A geometric value violated its invariant (lo >= hi, radius <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyGridError : public Error {
 public:
  using Error::Error;
};

/// Oracle produced a non-finite value during coefficient extraction.
class ExtractionError : public Error {
 public:
  ExtractionError(const std::string& what, cplx point)
      : Error(what), point_(point) {}
  cplx point() const { return point_; }

 private:
  cplx point_;
};

/// Evaluation requested at or beyond the estimated radius of convergence.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class OutOfRadiusError : public Error {
 public:
  using Error::Error;
};

class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// An empirical hypothesis check failed; `clause()` names the failing clause.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(std::string clause, const std::string& what)
      : Error(what), clause_(std::move(clause)) {}
  const std::string& clause() const { return clause_; }

 private:
  std::string clause_;
};

/// A disc boundary left the region where the oracle may be evaluated.
class ContainmentError : public Error {
 public:
  ContainmentError(const std::string& what, double theta)
      : Error(what), theta_(theta) {}
  double theta() const { return theta_; }

 private:
  double theta_;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

class ScanFailure : public Error {
 public:
  ScanFailure(const std::string& what, double sup)
      : Error(what), sup_(sup) {}
  double sup() const { return sup_; }

 private:
  double sup_;
};

/// The oracle is not CR extendible somewhere the pipeline needs it to be.
class NonExtendibleError : public Error {
 public:
  NonExtendibleError(const std::string& what, double location)
      : Error(what), location_(location) {}
  double location() const { return location_; }

 private:
  double location_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An atlas failed a consistency check; `record()` is the offending sample or
/// certificate serialized as JSON.
class AtlasError : public Error {
 public:
  AtlasError(const std::string& what, std::string record)
      : Error(what), record_(std::move(record)) {}
  const std::string& record() const { return record_; }

 private:
  std::string record_;
};

}  // namespace crext
