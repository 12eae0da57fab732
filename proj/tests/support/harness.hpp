#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace harness {

namespace fs = std::filesystem;

inline fs::path fixtures() { return STGUIDE_FIXTURE_DIR; }
inline fs::path scenarios() { return STGUIDE_SCENARIO_DIR; }
inline fs::path plugins() { return STGUIDE_PLUGIN_DIR; }
inline fs::path tool() { return STGUIDE_TOOL_PATH; }

// Removed with its contents on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "stguide") {
    std::string pattern = (fs::temp_directory_path() / (tag + "-XXXXXX")).string();
    path_ = ::mkdtemp(pattern.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

// Every regular file below `root`, keyed by relative path.
inline std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  if (!fs::exists(root)) return files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_bytes(e.path());
  }
  return files;
}

struct ToolRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''"; else q += c;
  }
  return q + "'";
}

// Runs the command-line tool with stdout and stderr captured to files in
// `scratch`. `env` is prepended as NAME=value assignments.
inline ToolRun run_tool(const std::vector<std::string>& args, const fs::path& scratch,
                        const std::map<std::string, std::string>& env = {}) {
  std::string cmd = "env -u ST_GUIDANCE_CONFIG";
  for (const auto& [k, v] : env) cmd += " " + k + "=" + quote(v);
  cmd += " " + quote(tool().string());
  for (const auto& a : args) cmd += " " + quote(a);
  const fs::path out = scratch / ".stdout", err = scratch / ".stderr";
  cmd += " >" + quote(out.string()) + " 2>" + quote(err.string());
  const int status = std::system(cmd.c_str());
  ToolRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_bytes(out);
  r.err = read_bytes(err);
  fs::remove(out);
  fs::remove(err);
  return r;
}

}  // namespace harness
