#include "stguide/dataset.hpp"

namespace stguide {

PromptTemplates::PromptTemplates(std::map<std::string, std::string> templates)
    : templates_(std::move(templates)) {}

PromptTemplates PromptTemplates::load(const std::filesystem::path& path) {
  const json::Json doc = json::read_file(path);
  if (!doc.is_object()) throw Error(ErrorCode::kSchemaViolation, path.string() + ": expected an object");
  std::map<std::string, std::string> templates;
  for (const auto& [key, value] : doc.items()) templates[key] = json::string(value, path.string() + ":" + key);
  return PromptTemplates(std::move(templates));
}

std::filesystem::path bundled_data_dir() { return STGUIDE_DATA_DIR; }

PromptTemplates PromptTemplates::bundled() { return load(bundled_data_dir() / "prompts" / "templates.json"); }

std::string PromptTemplates::render(std::string_view key, const std::map<std::string, std::string>& vars) const {
  auto it = templates_.find(std::string(key));
  if (it == templates_.end()) {
    throw Error(ErrorCode::kSchemaViolation, "no prompt template named '" + std::string(key) + "'");
  }
  const std::string& t = it->second;
  std::string out;
  std::size_t pos = 0;
  while (pos < t.size()) {
    const std::size_t open = t.find('{', pos);
    if (open == std::string::npos) {
      out.append(t, pos, std::string::npos);
      break;
    }
    out.append(t, pos, open - pos);
    const std::size_t close = t.find('}', open);
    if (close == std::string::npos) {
      out.append(t, open, std::string::npos);
      break;
    }
    const std::string name = t.substr(open + 1, close - open - 1);
    auto var = vars.find(name);
    if (var == vars.end()) {
      throw Error(ErrorCode::kSchemaViolation,
                  "template '" + std::string(key) + "' needs a value for {" + name + "}");
    }
    out += var->second;
    pos = close + 1;
  }
  return out;
}

}  // namespace stguide
