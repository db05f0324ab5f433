#include "freetalky/gec/edits.hpp"

#include "freetalky/text/tokenizer.hpp"

#include <algorithm>
#include <sstream>

namespace freetalky::gec {

std::vector<std::string> gec_tokens(std::string_view text) { return text::tokenize(text, false); }

namespace {

using Table = std::vector<std::vector<std::size_t>>;

// suffix[i][j] = distance between a[i:] and b[j:]
Table suffix_distances(std::span<const std::string> a, std::span<const std::string> b) {
  const std::size_t n = a.size(), m = b.size();
  Table d(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][m] = n - i;
  for (std::size_t j = 0; j <= m; ++j) d[n][j] = m - j;
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      d[i][j] = std::min({d[i + 1][j + 1] + (a[i] == b[j] ? 0 : 1), d[i + 1][j] + 1, d[i][j + 1] + 1});
  return d;
}

}  // namespace

std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b) {
  return suffix_distances(a, b)[0][0];
}

std::vector<Edit> extract_edits(std::span<const std::string> source, std::span<const std::string> target) {
  const auto d = suffix_distances(source, target);
  const std::size_t n = source.size(), m = target.size();
  std::vector<Edit> edits;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m) {
      const bool same = source[i] == target[j];
      if (d[i][j] == d[i + 1][j + 1] + (same ? 0 : 1)) {
        if (!same) edits.push_back({EditKind::Replace, static_cast<int>(i), source[i], target[j]});
        ++i;
        ++j;
        continue;
      }
    }
    if (i < n && d[i][j] == d[i + 1][j] + 1) {
      edits.push_back({EditKind::Delete, static_cast<int>(i), source[i], ""});
      ++i;
    } else {
      edits.push_back({EditKind::Insert, static_cast<int>(i), "", target[j]});
      ++j;
    }
  }
  return edits;
}

std::vector<Edit> extract_edits(std::string_view source, std::string_view correction) {
  return extract_edits(gec_tokens(source), gec_tokens(correction));
}

std::vector<std::string> apply_edits(std::span<const Edit> edits, std::span<const std::string> source) {
  const std::size_t n = source.size();
  std::vector<std::vector<std::string>> inserts(n + 1);
  std::vector<const Edit*> change(n, nullptr);
  for (const auto& e : edits) {
    if (e.position < 0 || static_cast<std::size_t>(e.position) > n) throw GecError("edit position out of range");
    const auto p = static_cast<std::size_t>(e.position);
    if (e.kind == EditKind::Insert) {
      if (!e.original.empty() || e.replacement.empty()) throw GecError("malformed insert edit");
      inserts[p].push_back(e.replacement);
      continue;
    }
    if (p == n) throw GecError("edit position out of range");
    if (e.kind == EditKind::Delete && !e.replacement.empty()) throw GecError("malformed delete edit");
    if (e.kind == EditKind::Replace && e.replacement.empty()) throw GecError("malformed replace edit");
    if (e.original != source[p]) throw GecError("edit does not match source word '" + source[p] + "'");
    if (change[p]) throw GecError("two edits on one source word");
    change[p] = &e;
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i <= n; ++i) {
    out.insert(out.end(), inserts[i].begin(), inserts[i].end());
    if (i == n) break;
    if (!change[i])
      out.push_back(source[i]);
    else if (change[i]->kind == EditKind::Replace)
      out.push_back(change[i]->replacement);
  }
  return out;
}

std::string apply_edits(std::span<const Edit> edits, std::string_view source) {
  const auto tokens = apply_edits(edits, gec_tokens(source));
  return text::detokenize(tokens);
}

namespace {

std::string gate_normal_form(std::string_view s) {
  std::string t = text::to_lower(text::trim(s));
  while (!t.empty() && (t.back() == '.' || t.back() == '?' || t.back() == '!' || t.back() == ' ')) t.pop_back();
  std::string out;
  bool space = false;
  for (char c : t) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

}  // namespace

bool overcorrection_gate(std::string_view source, std::string_view correction, double threshold) {
  if (gate_normal_form(source) == gate_normal_form(correction)) return false;
  const auto a = text::normalized_tokens(source);
  const auto b = text::normalized_tokens(correction);
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return false;
  const double ratio = static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
  return ratio <= threshold;
}

namespace {

std::string display_form(const std::string& s) {
  std::string t = text::trim(s);
  if (!t.empty() && t.back() == '.') t.pop_back();
  return t;
}

}  // namespace

std::string format_feedback(const GecResult& result) {
  if (!result.emit) throw SuppressedResult("feedback requested for a suppressed result");
  const std::string source = display_form(result.source);
  const std::string correction = display_form(result.correction);
  const bool closed = !correction.empty() && (correction.back() == '?' || correction.back() == '!');
  return "You said, “" + source + "”, but “" + correction + "”" + (closed ? "" : ",") +
         " is a more grammatically correct expression.";
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::string cleaned;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '.' && i + 1 < text.size() && text[i + 1] == '.') {
      while (i < text.size() && text[i] == '.') ++i;
    } else if (text.substr(i, 3) == "\u2026") {
      i += 3;
    } else {
      cleaned += text[i++];
    }
  }
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    std::istringstream words(current);
    std::string w, joined;
    while (words >> w) joined += (joined.empty() ? "" : " ") + w;
    if (!joined.empty()) out.push_back(std::move(joined));
    current.clear();
  };
  for (char c : cleaned) {
    current += c;
    if (c == '.' || c == '?' || c == '!') flush();
  }
  flush();
  return out;
}

}  // namespace freetalky::gec
