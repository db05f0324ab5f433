#include "freetalky/text/vocabulary.hpp"

#include <algorithm>
#include <map>

namespace freetalky::text {

namespace {
const char* const kSpecialNames[Vocabulary::kSpecialCount] = {"<pad>", "<unk>", "<bos>", "<eos>", "<user>", "<bot>"};
}

Vocabulary::Vocabulary() {
  for (const char* s : kSpecialNames) push(s);
}

void Vocabulary::push(const std::string& token) {
  if (index_.count(token)) return;
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

Vocabulary Vocabulary::from_tokens(std::span<const std::string> tokens) {
  Vocabulary v;
  for (const auto& t : tokens) {
    if (t.empty() || t.find_first_of(" \t\n") != std::string::npos) throw VocabularyError("invalid vocabulary token '" + t + "'");
    v.push(t);
  }
  return v;
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> corpus, int min_count) {
  std::map<std::string, int> counts;
  for (const auto& sentence : corpus)
    for (const auto& t : sentence) ++counts[t];
  std::vector<std::pair<std::string, int>> kept;
  for (auto& [t, c] : counts)
    if (c >= min_count) kept.emplace_back(t, c);
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& [t, _] : kept) v.push(t);
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw VocabularyError("token id out of range: " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

}  // namespace freetalky::text
