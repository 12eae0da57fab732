#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "stguide/cli.hpp"

namespace stguide::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const ParameterInfo* find_parameter(const std::string& key) {
  const auto& all = known_parameters();
  auto it = std::find_if(all.begin(), all.end(), [&](const ParameterInfo& p) { return p.key == key; });
  return it == all.end() ? nullptr : &*it;
}

std::optional<double> parse_real(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_integer(const std::string& text) {
  int v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

void check_value(const std::string& key, const std::string& value, const std::string& where) {
  const ParameterInfo* p = find_parameter(key);
  if (!p) throw Error(ErrorCode::kConfig, where + ": unknown key '" + key + "'");
  bool ok = false;
  switch (p->kind) {
    case ValueKind::kReal: ok = parse_real(value).has_value(); break;
    case ValueKind::kInteger: ok = parse_integer(value).has_value(); break;
    case ValueKind::kWord:
      ok = p->choices.empty() ? !value.empty()
                              : std::find(p->choices.begin(), p->choices.end(), value) != p->choices.end();
      break;
  }
  if (!ok) throw Error(ErrorCode::kConfig, where + ": bad value '" + value + "' for '" + key + "'");
}

std::optional<std::string> lookup(const std::map<std::string, std::string>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

}  // namespace

const std::vector<ParameterInfo>& known_parameters() {
  static const std::vector<ParameterInfo> all{
      {"tube_radius", ValueKind::kReal, {}},
      {"tube_shape", ValueKind::kWord, {"capsule", "balls"}},
      {"sigma", ValueKind::kReal, {}},
      {"alpha", ValueKind::kReal, {}},
      {"line_width", ValueKind::kInteger, {}},
      {"endpoint_radius", ValueKind::kReal, {}},
      {"epsilon", ValueKind::kReal, {}},
      {"degree", ValueKind::kInteger, {}},
      {"k", ValueKind::kInteger, {}},
      {"anchor_tolerance", ValueKind::kReal, {}},
      {"threshold", ValueKind::kReal, {}},
      {"replan_interval", ValueKind::kInteger, {}},
      {"max_steps", ValueKind::kInteger, {}},
      {"step_length", ValueKind::kReal, {}},
      {"consistency_px", ValueKind::kReal, {}},
      {"dead_zone", ValueKind::kReal, {}},
      {"seed", ValueKind::kInteger, {}},
      {"mode", ValueKind::kWord, {"finetuned", "frozen"}},
      {"scorer", ValueKind::kWord, {}},
      {"verbosity", ValueKind::kInteger, {}},
  };
  return all;
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& source) {
  ConfigFile c;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kConfig, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    check_value(key, value, where);
    if (!c.values_.emplace(key, value).second) throw Error(ErrorCode::kConfig, where + ": duplicate key '" + key + "'");
  }
  return c;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

std::optional<double> ConfigFile::real(const std::string& key) const {
  auto v = lookup(values_, key);
  return v ? parse_real(*v) : std::nullopt;
}

std::optional<int> ConfigFile::integer(const std::string& key) const {
  auto v = lookup(values_, key);
  return v ? parse_integer(*v) : std::nullopt;
}

std::optional<std::string> ConfigFile::word(const std::string& key) const { return lookup(values_, key); }

std::optional<double> RunConfig::real(const std::string& key) const {
  if (auto v = lookup(overrides, key)) {
    check_value(key, *v, "--" + key);
    return parse_real(*v);
  }
  return config.real(key);
}

std::optional<int> RunConfig::integer(const std::string& key) const {
  if (auto v = lookup(overrides, key)) {
    check_value(key, *v, "--" + key);
    return parse_integer(*v);
  }
  return config.integer(key);
}

std::optional<std::string> RunConfig::word(const std::string& key) const {
  if (auto v = lookup(overrides, key)) {
    check_value(key, *v, "--" + key);
    return v;
  }
  return config.word(key);
}

void RunConfig::validate_inputs() const {
  for (const auto& [name, path] : inputs) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::kIo, "--" + name + ": no such file " + path.string());
  }
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveDepth:
    case ErrorCode::kBehindCamera:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kOutOfBounds:
    case ErrorCode::kAllBehindCamera:
      return kExitGeometry;
    case ErrorCode::kTooFewPoints:
    case ErrorCode::kAllDepthInvalid:
    case ErrorCode::kRankDeficient:
    case ErrorCode::kZeroLength:
    case ErrorCode::kInvalidAnchor:
    case ErrorCode::kEmptyOccupancy:
    case ErrorCode::kHoleCoversImage:
    case ErrorCode::kStageStalled:
    case ErrorCode::kNoGuidance:
      return kExitPipeline;
    case ErrorCode::kProtocol:
      return kExitProtocol;
    default:
      return kExitInput;
  }
}

std::string error_line(const Error& error) {
  json::Json j{{"error", std::string(error_name(error.code()))},
               {"exit_code", exit_code_for(error.code())},
               {"message", error.what()}};
  if (!error.stage().empty()) j["stage"] = error.stage();
  return j.dump();
}

std::string usage_error_line(const std::string& message) {
  return json::Json{{"error", "Usage"}, {"exit_code", kExitInput}, {"message", message}}.dump();
}

}  // namespace stguide::cli
