#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace motif {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
  using std::domain_error::domain_error;
};

class SamplingError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Collects non-fatal diagnostics. When no sink is given, warnings go to stderr.
class Warnings;
void warn(Warnings* sink, const std::string& message);

class Warnings {
 public:
  void add(std::string message) { messages_.push_back(std::move(message)); }
  const std::vector<std::string>& messages() const { return messages_; }
  bool empty() const { return messages_.empty(); }

 private:
  std::vector<std::string> messages_;
};

}  // namespace motif
