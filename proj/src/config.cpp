#include "mcpd/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace mcpd::config {

namespace {

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile:
      return "missing-file";
    case ErrorKind::Syntax:
      return "syntax-error";
    case ErrorKind::DuplicateKey:
      return "duplicate-key";
    case ErrorKind::UnknownKey:
      return "unknown-key";
    case ErrorKind::Type:
      return "type-error";
    case ErrorKind::Range:
      return "range-error";
    case ErrorKind::Command:
      return "command-mismatch";
  }
  return "config-error";
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

ConfigError::ConfigError(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + message),
      kind_(kind) {}

Entries parse(std::istream& is, const std::string& origin) {
  Entries entries;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(ErrorKind::Syntax,
                        origin + ":" + std::to_string(lineno) +
                            ": expected key=value, got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(ErrorKind::Syntax,
                        origin + ":" + std::to_string(lineno) +
                            ": empty key");
    }
    const bool duplicate =
        std::any_of(entries.begin(), entries.end(),
                    [&](const auto& e) { return e.first == key; });
    if (duplicate) {
      throw ConfigError(ErrorKind::DuplicateKey,
                        origin + ": key '" + key + "' appears more than once");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

Entries load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw ConfigError(ErrorKind::MissingFile, "cannot open '" + path + "'");
  }
  return parse(is, path);
}

void write_manifest(std::ostream& os, const Entries& entries) {
  for (const auto& [key, value] : entries) {
    os << key << '=' << value << '\n';
  }
}

void write_manifest_file(const std::string& path, const Entries& entries) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_manifest(os, entries);
}

}  // namespace mcpd::config
