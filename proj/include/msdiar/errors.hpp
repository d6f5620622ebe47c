#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msdiar {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BoundOrderingError : public Error { public: using Error::Error; };
class EmptyGridError : public Error { public: using Error::Error; };
class InvalidConfigError : public Error { public: using Error::Error; };
class EmptyInputError : public Error { public: using Error::Error; };
class DimensionMismatchError : public Error { public: using Error::Error; };
class InvalidRecordError : public Error { public: using Error::Error; };
class TargetTooLargeError : public Error { public: using Error::Error; };
class EmptyClusterError : public Error { public: using Error::Error; };
class TooFewInputsError : public Error { public: using Error::Error; };
class TooFewEigenvaluesError : public Error { public: using Error::Error; };
class NumericalError : public Error { public: using Error::Error; };
class KTooLargeError : public Error { public: using Error::Error; };
class SizeMismatchError : public Error { public: using Error::Error; };
class IncompleteMappingError : public Error { public: using Error::Error; };
class EmptySessionError : public Error { public: using Error::Error; };
class StaleLabelingError : public Error { public: using Error::Error; };
class NoScoredTimeError : public Error { public: using Error::Error; };
class InfeasibleAngleError : public Error { public: using Error::Error; };

// Raised by the text parsers; carries the 1-based line number.
class MalformedLineError : public Error {
 public:
  MalformedLineError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace msdiar
