#include <algorithm>
#include <cctype>
#include <map>

#include "stguide/metrics.hpp"

namespace stguide {

namespace {

std::map<std::string, int> tokens(std::string_view text) {
  std::map<std::string, int> out;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      ++out[current];
      current.clear();
    }
  }
  if (!current.empty()) ++out[current];
  return out;
}

int total(const std::map<std::string, int>& bag) {
  int n = 0;
  for (const auto& [token, count] : bag) n += count;
  return n;
}

}  // namespace

double token_f1(std::string_view predicted, std::string_view truth) {
  const auto p = tokens(predicted);
  const auto t = tokens(truth);
  const int np = total(p);
  const int nt = total(t);
  if (np == 0 && nt == 0) return 1.0;
  if (np == 0 || nt == 0) return 0.0;
  int overlap = 0;
  for (const auto& [token, count] : p) {
    if (auto it = t.find(token); it != t.end()) overlap += std::min(count, it->second);
  }
  if (overlap == 0) return 0.0;
  return 2.0 * overlap / static_cast<double>(np + nt);
}

ScorerRegistry ScorerRegistry::with_defaults() {
  ScorerRegistry r;
  r.add(std::string(kDefaultScorer), token_f1);
  return r;
}

void ScorerRegistry::add(std::string name, TextScorer scorer) {
  if (!scorer) throw Error(ErrorCode::kInvalidArgument, "null scorer '" + name + "'");
  scorers_[std::move(name)] = std::move(scorer);
}

const TextScorer& ScorerRegistry::get(std::string_view name) const {
  auto it = scorers_.find(name);
  if (it == scorers_.end()) throw Error(ErrorCode::kNoScorer, "no text scorer named '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> ScorerRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, scorer] : scorers_) out.push_back(name);
  return out;
}

double text_similarity(std::string_view predicted, std::string_view truth, const ScorerRegistry& registry,
                       std::string_view scorer) {
  return registry.get(scorer)(predicted, truth);
}

}  // namespace stguide
