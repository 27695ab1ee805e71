#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace interlock {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, std::string expected,
              std::string found = {});

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

/// A temporal operator or state function the formula language lacks.
class UnknownOperator : public Error {
 public:
  explicit UnknownOperator(const std::string& name)
      : Error("unknown operator '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DuplicateRule : public Error {
 public:
  explicit DuplicateRule(std::string name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// A condition or action tag that does not apply to the subject's kind.
class KindMismatch : public Error {
 public:
  KindMismatch(std::string name, std::string tag);
  const std::string& name() const noexcept { return name_; }
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string name_;
  std::string tag_;
};

class XmlError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string element, std::string reason);
  const std::string& element() const noexcept { return element_; }

 private:
  std::string element_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class UnknownTrack : public Error {
 public:
  explicit UnknownTrack(const std::string& track)
      : Error("unknown track '" + track + "'") {}
};

class UnknownRoute : public Error {
 public:
  explicit UnknownRoute(const std::string& route)
      : Error("unknown route '" + route + "'") {}
};

class UnknownTrain : public Error {
 public:
  explicit UnknownTrain(std::uint32_t id)
      : Error("unknown train " + std::to_string(id)) {}
};

class NoPath : public Error {
 public:
  NoPath(std::string route, const std::string& reason)
      : Error("no path for route '" + route + "': " + reason),
        route_(std::move(route)) {}
  const std::string& route() const noexcept { return route_; }

 private:
  std::string route_;
};

class LinkError : public Error {
 public:
  using Error::Error;
};

class QueueEmpty : public Error {
 public:
  QueueEmpty() : Error("event queue is empty") {}
};

class MonitorFinished : public Error {
 public:
  MonitorFinished() : Error("monitor already reached a final verdict") {}
};

class TraceTooShort : public Error {
 public:
  TraceTooShort() : Error("trace ends before the formula is decided") {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure inside one simulation replica; carries the replica seed for replay.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::uint64_t seed)
      : Error(what + " (replica seed " + std::to_string(seed) + ")"),
        seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

class IncompatibleTarget : public Error {
 public:
  using Error::Error;
};

class NothingToRemove : public Error {
 public:
  using Error::Error;
};

}  // namespace interlock
