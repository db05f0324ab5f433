#pragma once

#include "freetalky/dialogue/types.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>

namespace freetalky::dialogue {

// Templated persona corpus: each persona fills hobby/job/place/food slots,
// gold replies echo the persona's slot words, and the 19 distractors are
// off-topic replies built from other personas that share no slot word with
// this one.
// One example per bot turn; deterministic for a given seed.
std::vector<DialogueExample> gen_synthetic_dialogue(int num_personas, int turns_per_dialogue, std::uint64_t seed);

// Every word that fills a persona slot in the synthetic generator.
const std::set<std::string>& synthetic_slot_words();

// Slot words occurring in `text` (lowercased word match).
std::set<std::string> slot_words_in(std::string_view text);

// Corpus file: one JSON object per line,
// {"persona": [...], "history": [...], "gold": "...", "distractors": [19 strings]}.
void write_corpus(const std::filesystem::path& path, std::span<const DialogueExample> corpus);
std::vector<DialogueExample> read_corpus(const std::filesystem::path& path);

}  // namespace freetalky::dialogue
