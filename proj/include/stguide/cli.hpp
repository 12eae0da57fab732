#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stguide/error.hpp"
#include "stguide/serialization.hpp"

namespace stguide::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitGeometry = 3;
inline constexpr int kExitPipeline = 4;
inline constexpr int kExitProtocol = 5;

inline constexpr const char* kConfigEnv = "ST_GUIDANCE_CONFIG";

int exit_code_for(ErrorCode code);

// {"error": name, "exit_code": n, "message": ...[, "stage": ...]} on one line.
std::string error_line(const Error& error);
std::string usage_error_line(const std::string& message);

enum class ValueKind { kReal, kInteger, kWord };

struct ParameterInfo {
  std::string key;
  ValueKind kind;
  std::vector<std::string> choices;  // allowed words for kWord
};

// Every key accepted in config files.
const std::vector<ParameterInfo>& known_parameters();

// `key = value` lines; '#' starts a comment. Throws Config for unknown keys,
// duplicates, malformed lines and values of the wrong kind.
class ConfigFile {
 public:
  ConfigFile() = default;
  static ConfigFile parse(const std::string& text, const std::string& source = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<double> real(const std::string& key) const;
  std::optional<int> integer(const std::string& key) const;
  std::optional<std::string> word(const std::string& key) const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Parsed command line plus the merged config file. Flags take precedence
// over config values, which take precedence over built-in defaults.
struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::filesystem::path> inputs;
  std::map<std::string, std::filesystem::path> outputs;
  std::map<std::string, std::string> overrides;  // flag values, keyed like the config file
  ConfigFile config;
  std::optional<std::filesystem::path> config_path;
  int verbosity = 0;

  std::optional<double> real(const std::string& key) const;
  std::optional<int> integer(const std::string& key) const;
  std::optional<std::string> word(const std::string& key) const;

  // Throws Io for a missing input file.
  void validate_inputs() const;
};

// Runs one invocation; `args` excludes the program name. Errors are reported
// on `err` as one JSON line and mapped to the returned exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stguide::cli
