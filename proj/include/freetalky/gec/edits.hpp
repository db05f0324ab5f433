#pragma once

#include "freetalky/gec/types.hpp"

#include <span>
#include <string_view>

namespace freetalky::gec {

// Case-preserving word/punctuation tokens.
std::vector<std::string> gec_tokens(std::string_view text);

// Minimal word-level alignment with unit costs, traced left to right. Among
// minimal alignments a match or substitution is taken whenever possible,
// then a deletion, then an insertion. Inserts at the same position keep
// target order.
std::vector<Edit> extract_edits(std::span<const std::string> source, std::span<const std::string> target);
std::vector<Edit> extract_edits(std::string_view source, std::string_view correction);

// Throws GecError if an edit does not match the source.
std::vector<std::string> apply_edits(std::span<const Edit> edits, std::span<const std::string> source);
std::string apply_edits(std::span<const Edit> edits, std::string_view source);

std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b);

// False when the two sentences only differ in case, terminal punctuation or
// spacing, or when the rewrite changes more than `threshold` of the words.
bool overcorrection_gate(std::string_view source, std::string_view correction, double threshold = 0.5);

// Throws SuppressedResult unless result.emit.
std::string format_feedback(const GecResult& result);

// Drops ellipses, then splits after '.', '?' and '!'.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace freetalky::gec
