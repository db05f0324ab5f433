#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace freetalky::text {

class VocabularyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense token <-> id map. The six special tokens always occupy ids 0..5.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr int kSpeakerUser = 4;
  static constexpr int kSpeakerBot = 5;
  static constexpr int kSpecialCount = 6;

  Vocabulary();

  // Specials followed by `tokens` in order; duplicates and specials are skipped.
  static Vocabulary from_tokens(std::span<const std::string> tokens);

  // Tokens seen at least `min_count` times, ordered by descending count then
  // lexicographically.
  static Vocabulary build(std::span<const std::vector<std::string>> corpus, int min_count = 1);

  int size() const { return static_cast<int>(tokens_.size()); }
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  int id(const std::string& token) const;  // kUnk when absent
  const std::string& token(int id) const;
  std::vector<int> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const int> ids) const;
  bool is_special(int id) const { return id >= 0 && id < kSpecialCount; }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  void push(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace freetalky::text
