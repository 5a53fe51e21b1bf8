#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mcpd::config {

enum class ErrorKind {
  MissingFile,
  Syntax,
  DuplicateKey,
  UnknownKey,
  Type,
  Range,
  Command,
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Ordered key=value pairs. One pair per line; '#' lines and blank lines are
// skipped; whitespace around keys and values is trimmed; a repeated key is an
// error, not an override.
using Entries = std::vector<std::pair<std::string, std::string>>;

Entries parse(std::istream& is, const std::string& origin);
Entries load_file(const std::string& path);

// The manifest is itself a loadable config.
void write_manifest(std::ostream& os, const Entries& entries);
void write_manifest_file(const std::string& path, const Entries& entries);

}  // namespace mcpd::config
