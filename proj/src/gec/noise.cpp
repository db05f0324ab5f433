#include "freetalky/gec/noise.hpp"

#include "freetalky/gec/edits.hpp"
#include "freetalky/text/tokenizer.hpp"

#include <fstream>

namespace freetalky::gec {

void NoiseRule::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) throw GecError("rule '" + name + "': probability outside [0, 1]");
  if (patterns.empty()) throw GecError("rule '" + name + "' has no patterns");
  for (const auto& p : patterns)
    for (const auto& [from, to] : p.rewrite)
      if (from == to || from.empty()) throw GecError("rule '" + name + "' rewrites '" + from + "' to itself");
}

std::vector<std::size_t> NoiseRule::matches(std::span<const std::string> tokens) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    for (const auto& p : patterns) {
      if (!p.rewrite.count(tokens[i])) continue;
      if (!p.after.empty() && (i == 0 || !p.after.count(tokens[i - 1]))) continue;
      out.push_back(i);
      break;
    }
  return out;
}

std::vector<std::string> NoiseRule::apply_at(std::span<const std::string> tokens, std::size_t position) const {
  for (const auto& p : patterns) {
    const auto it = p.rewrite.find(tokens[position]);
    if (it == p.rewrite.end()) continue;
    if (!p.after.empty() && (position == 0 || !p.after.count(tokens[position - 1]))) continue;
    std::vector<std::string> out(tokens.begin(), tokens.end());
    if (!it->second.empty()) {
      out[position] = it->second;
      return out;
    }
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(position));
    if (position == 0 && !out.empty() && !out[0].empty() && out[0][0] >= 'a' && out[0][0] <= 'z')
      out[0][0] = static_cast<char>(out[0][0] - 'a' + 'A');
    return out;
  }
  throw GecError("rule '" + name + "' does not match at position " + std::to_string(position));
}

std::vector<NoiseRule> default_noise_rules(double probability) {
  const std::set<std::string> plural = {"you", "we", "they", "You", "We", "They"};
  const std::set<std::string> third = {"he", "she", "He", "She", "sister", "brother", "friend"};
  const std::map<std::string, std::string> base_to_s = {
      {"like", "likes"}, {"want", "wants"}, {"need", "needs"},   {"live", "lives"}, {"play", "plays"},
      {"work", "works"}, {"have", "has"},   {"think", "thinks"}, {"love", "loves"}, {"watch", "watches"},
      {"go", "goes"},    {"eat", "eats"},   {"read", "reads"},   {"hope", "hopes"}};
  std::map<std::string, std::string> s_to_base;
  for (const auto& [b, s] : base_to_s) s_to_base[s] = b;

  std::map<std::string, std::string> plural_swap = base_to_s;
  plural_swap["are"] = "is";
  std::map<std::string, std::string> first_swap = base_to_s;
  first_swap["am"] = "is";
  std::map<std::string, std::string> third_swap = s_to_base;
  third_swap["is"] = "are";

  return {
      {"to_deletion",
       probability,
       {{{"want", "wants", "need", "needs", "going", "like", "likes", "love", "loves", "nice", "hope"}, {{"to", ""}}}}},
      {"article_deletion", probability, {{{}, {{"a", ""}, {"an", ""}, {"the", ""}}}}},
      {"copula_deletion", probability, {{{}, {{"am", ""}, {"is", ""}, {"are", ""}, {"Is", ""}, {"Are", ""}}}}},
      {"agreement_swap", probability, {{{"I"}, first_swap}, {plural, plural_swap}, {third, third_swap}}},
      {"preposition_substitution", probability, {{{}, {{"in", "on"}, {"on", "in"}, {"at", "in"}}}}},
  };
}

std::string add_noise(std::string_view clean, std::span<const NoiseRule> rules, std::mt19937_64& rng) {
  std::vector<std::string> tokens = gec_tokens(clean);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (const auto& rule : rules) {
    rule.validate();
    const auto sites = rule.matches(tokens);
    // Always draw, so one rule's outcome does not shift the others' streams.
    const double u = coin(rng);
    const std::size_t pick = static_cast<std::size_t>(rng() % std::max<std::size_t>(sites.size(), 1));
    if (sites.empty() || u >= rule.probability) continue;
    tokens = rule.apply_at(tokens, sites[pick]);
  }
  return text::detokenize(tokens);
}

std::vector<ParallelPair> gen_noisy_corpus(std::span<const std::string> clean_sentences,
                                           std::span<const NoiseRule> rules, std::uint64_t seed) {
  if (rules.empty()) throw GecError("gen_noisy_corpus needs at least one rule");
  std::mt19937_64 rng(seed);
  std::vector<ParallelPair> out;
  out.reserve(clean_sentences.size());
  for (const auto& clean : clean_sentences) {
    const std::string canonical = text::detokenize(gec_tokens(clean));
    out.push_back({add_noise(canonical, rules, rng), canonical});
  }
  return out;
}

namespace {

struct Job {
  const char* article;
  const char* noun;
};

const std::vector<Job> kJobs = {{"an", "engineer"},  {"a", "teacher"},   {"a", "doctor"},     {"a", "nurse"},
                                {"an", "artist"},    {"a", "student"},   {"a", "lawyer"},     {"a", "farmer"},
                                {"an", "actor"},     {"a", "chef"},      {"an", "architect"}, {"an", "editor"},
                                {"an", "accountant"}, {"an", "officer"}, {"an", "author"},    {"a", "singer"}};
const std::vector<std::string> kActivities = {"hiking", "swimming", "fishing", "camping",
                                              "skiing", "running",  "cooking", "dancing"};
const std::vector<std::string> kDays = {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};
const std::vector<std::string> kFoods = {"pizza", "sushi", "pasta", "rice", "noodles", "bread", "soup", "salad"};
const std::vector<std::string> kPets = {"dog", "cat", "rabbit", "parrot", "hamster"};
const std::vector<std::string> kInstruments = {"piano", "guitar", "violin", "cello", "flute"};

// {N} name, {P} place, {J} job with article, {A} activity, {D} day, {F} food,
// {T} pet, {I} instrument.
const std::vector<std::string> kTemplates = {
    "I want to visit {P}.",
    "I live in {P}.",
    "My friend {N} lives in {P}.",
    "Are you {J}?",
    "I am {J}.",
    "{N} is {J}.",
    "Is she {J}?",
    "He wants to be {J}.",
    "My sister is {J} in {P}.",
    "I like to go {A} on {D}.",
    "We are going to visit {P} on {D}.",
    "I am going to study English.",
    "I need to study English at night.",
    "I think you like outdoor activities!",
    "I think he likes {F}.",
    "They want to eat {F} at home.",
    "Do you like {A}?",
    "My favorite activity is {A}.",
    "I see.",
    "Bye.",
    "Hi how are you?",
    "Wow That’s awesome.",
    "Okay It’s nice to meet you.",
    "It is nice to meet you, {N}.",
    "I usually read a book at night.",
    "She plays the {I} in the morning.",
    "You are very kind.",
    "We live in {P} with {N}.",
    "I have a {T}.",
    "{N} and I are going to meet at the park.",
    "Where do you live?",
    "I watch movies on {D}.",
    "Do you want to go to {P}?",
    "Thank you very much.",
    "What do you do?",
    "My brother works at the library.",
    "I hope to see you on {D}.",
    "They are students at the university.",
    "She loves to play the {I}.",
    "I was in {P} last year.",
    "He is from {P}.",
    "{N} likes {F}.",
    "Is {N} {J}?",
};

const std::vector<std::string> kNames = {
    "Emma",   "Liam",    "Olivia", "Noah",    "Ava",     "Ethan",  "Sophia", "Mason",  "Mia",     "Lucas",
    "Amelia", "Logan",   "Harper", "James",   "Evelyn",  "Henry",  "Ella",   "Jack",   "Grace",   "Owen",
    "Chloe",  "Samuel",  "Lily",   "Daniel",  "Zoe",     "Leo",    "Nora",   "Ryan",   "Hannah",  "Adam",
    "Sarah",  "David",   "Laura",  "Peter",   "Julia",   "Simon",  "Anna",   "Paul",   "Maria",   "Kevin",
    "Minji",  "Jisoo",   "Hyun",   "Seojun",  "Yuna",    "Kenji",  "Aiko",   "Haruto", "Mei",     "Wei",
    "Carlos", "Lucia",   "Diego",  "Sofia",   "Mateo",   "Elena",  "Pablo",  "Ines",   "Marco",   "Giulia",
    "Omar",   "Layla",   "Yusuf",  "Amira",   "Ivan",    "Olga",   "Dmitri", "Katya",  "Lars",    "Ingrid",
    "Sven",   "Freya",   "Pierre", "Claire",  "Hugo",    "Chiara", "Anika",  "Ravi",   "Priya",   "Arjun",
    "Kofi",   "Amara",   "Tariq",  "Nadia",   "Felix",   "Greta",  "Tomas",  "Vera",   "Oscar",   "Alice",
    "Bruno",  "Celine",  "Dario",  "Eliza",   "Fabio",   "Gemma",  "Hector", "Irene",  "Jonas",   "Klara"};
const std::vector<std::string> kPlaces = {
    "Colorado", "Texas",    "Paris",     "Tokyo",   "London",    "Boston",    "Chicago",  "Seattle",  "Miami",
    "Denver",   "Sydney",   "Toronto",   "Berlin",  "Madrid",    "Rome",      "Dublin",   "Vienna",   "Oslo",
    "Lisbon",   "Prague",   "Cairo",     "Lima",    "Seoul",     "Busan",     "Austin",   "Phoenix",  "Dallas",
    "Atlanta",  "Portland", "Nashville", "Houston", "Montreal",  "Vancouver", "Munich",   "Hamburg",  "Milan",
    "Naples",   "Athens",   "Istanbul",  "Dubai",   "Mumbai",    "Delhi",     "Bangkok",  "Hanoi",    "Manila",
    "Jakarta",  "Beijing",  "Shanghai",  "Osaka",   "Kyoto",     "Nairobi",   "Lagos",    "Santiago", "Bogota",
    "Havana",   "Quebec",   "Oregon",    "Utah",    "Nevada",    "Alaska"};
const std::vector<std::string> kUnseen = {
    "Xanthippe", "Quirinus", "Zebulon",   "Ottoline", "Thaddeus", "Wilhelmina", "Ysolde",   "Barnaby",
    "Persephone", "Leopold", "Cordelia",  "Ignatius", "Philippa", "Ebenezer",   "Marguerite", "Octavius",
    "Rosalind",  "Cornelius", "Evangeline", "Lysander", "Winnipeg", "Timbuktu", "Zanzibar", "Kathmandu",
    "Reykjavik", "Ulaanbaatar", "Tasmania", "Patagonia", "Samarkand", "Valparaiso"};

std::string expand(const std::string& tmpl, const CleanSentenceOptions& opt, std::mt19937_64& rng) {
  const auto& names = opt.names.empty() ? kNames : opt.names;
  const auto& places = opt.places.empty() ? kPlaces : opt.places;
  auto pick = [&rng](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '{') {
      out += tmpl[i];
      continue;
    }
    const char slot = tmpl[i + 1];
    i += 2;
    switch (slot) {
      case 'N': out += pick(names); break;
      case 'P': out += pick(places); break;
      case 'J': {
        const auto& j = kJobs[rng() % kJobs.size()];
        out += std::string(j.article) + " " + j.noun;
        break;
      }
      case 'A': out += pick(kActivities); break;
      case 'D': out += pick(kDays); break;
      case 'F': out += pick(kFoods); break;
      case 'T': out += pick(kPets); break;
      case 'I': out += pick(kInstruments); break;
      default: throw GecError(std::string("unknown template slot ") + slot);
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& default_names() { return kNames; }
const std::vector<std::string>& default_places() { return kPlaces; }
const std::vector<std::string>& unseen_names() { return kUnseen; }

std::vector<std::string> gen_clean_sentences(int count, std::uint64_t seed, const CleanSentenceOptions& options) {
  if (count < 0) throw GecError("sentence count must be nonnegative");
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto& tmpl = kTemplates[rng() % kTemplates.size()];
    out.push_back(text::detokenize(gec_tokens(expand(tmpl, options, rng))));
  }
  return out;
}

void write_parallel_corpus(const std::filesystem::path& path, std::span<const ParallelPair> pairs) {
  std::ofstream out(path);
  if (!out) throw GecError("cannot write parallel corpus: " + path.string());
  for (const auto& p : pairs) {
    if (p.noisy.find_first_of("\t\n") != std::string::npos || p.clean.find_first_of("\t\n") != std::string::npos)
      throw GecError("pair contains a tab or newline");
    out << p.noisy << '\t' << p.clean << '\n';
  }
}

std::vector<ParallelPair> read_parallel_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GecError("cannot open parallel corpus: " + path.string());
  std::vector<ParallelPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw GecError("line " + std::to_string(lineno) + ": expected exactly one tab");
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

}  // namespace freetalky::gec
