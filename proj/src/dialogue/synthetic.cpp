#include "freetalky/dialogue/synthetic.hpp"

#include "freetalky/text/tokenizer.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <fstream>
#include <random>

namespace freetalky::dialogue {

namespace {

const std::vector<std::string> kHobbies = {
    "hiking",  "swimming", "painting", "chess",   "surfing", "cooking", "fishing", "dancing", "gardening", "cycling",
    "skiing",  "knitting", "boxing",   "singing", "camping", "baking",  "climbing", "running", "drawing",  "bowling",
    "golfing", "sailing",  "skating",  "rowing",  "archery", "pottery", "juggling", "yoga",    "karate",   "tennis"};
const std::vector<std::string> kJobs = {
    "engineer", "teacher",   "nurse",     "chef",      "pilot",      "farmer",    "lawyer",      "dentist",
    "plumber",  "doctor",    "artist",    "writer",    "banker",     "driver",    "firefighter", "scientist",
    "librarian", "mechanic", "cashier",   "florist",   "architect",  "carpenter", "electrician", "photographer",
    "journalist", "waiter",  "tailor",    "barber",    "pharmacist", "accountant"};
const std::vector<std::string> kPlaces = {
    "colorado", "texas",  "paris",  "tokyo",  "london", "boston",  "chicago", "seattle",  "miami",   "denver",
    "sydney",   "toronto", "berlin", "madrid", "rome",   "dublin",  "vienna",  "oslo",     "lisbon",  "prague",
    "cairo",    "lima",   "seoul",  "austin", "phoenix", "dallas", "atlanta", "portland", "nashville", "houston"};
const std::vector<std::string> kFoods = {"pizza",   "sushi",     "tacos",    "pasta",      "burgers", "noodles", "salad",
                                         "curry",   "steak",     "pancakes", "dumplings",  "soup",    "waffles", "ramen",
                                         "burritos", "lasagna",  "omelets",  "cheesecake", "popcorn", "chocolate"};

enum Slot { kHobby = 0, kJob = 1, kPlace = 2, kFood = 3 };
enum Topic { kTopicHobby = 0, kTopicJob, kTopicPlace, kTopicFood, kTopicGreeting, kTopicCount };

using Slots = std::array<std::string, 4>;

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <typename T>
const T& pick_from(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[pick(rng, v.size())];
}

std::string article(const std::string& noun) {
  return std::string("aeiou").find(noun.front()) != std::string::npos ? "an" : "a";
}

std::string fill(std::string tmpl, const std::string& value) {
  const auto at = tmpl.find("{}");
  if (at != std::string::npos) tmpl.replace(at, 2, value);
  return tmpl;
}

std::vector<std::string> persona_sentences(const Slots& s, std::mt19937_64& rng) {
  std::vector<std::string> out = {
      fill(pick(rng, 2) == 0 ? "i love {} ." : "my favorite hobby is {} .", s[kHobby]),
      fill(pick(rng, 2) == 0 ? "i am {} ." : "i work as {} .", article(s[kJob]) + " " + s[kJob]),
      fill(pick(rng, 2) == 0 ? "i live in {} ." : "i grew up in {} .", s[kPlace]),
      fill("my favorite food is {} .", s[kFood]),
  };
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[pick(rng, i)]);
  return out;
}

const std::vector<std::string>& questions(Topic t) {
  static const std::array<std::vector<std::string>, kTopicCount> q = {{
      {"what do you do for fun ?", "do you have any hobbies ?", "what do you like to do on weekends ?"},
      {"what do you do for a living ?", "what is your job ?", "what kind of work do you do ?"},
      {"where do you live ?", "where are you from ?", "which city do you live in ?"},
      {"what is your favorite food ?", "what do you like to eat ?", "what did you have for dinner ?"},
      {"hi how are you ?", "hello , how is your day going ?", "hey , what are you up to ?"},
  }};
  return q[t];
}

std::string reply(Topic t, const Slots& s, std::mt19937_64& rng) {
  switch (t) {
    case kTopicHobby: {
      static const std::vector<std::string> r = {"i love {} , it is so much fun .", "i spend most weekends {} .",
                                                 "mostly {} , i do it every week ."};
      return fill(pick_from(rng, r), s[kHobby]);
    }
    case kTopicJob: {
      static const std::vector<std::string> r = {"i am {} .", "i work as {} in the city .", "i am {} , i like my job ."};
      return fill(pick_from(rng, r), article(s[kJob]) + " " + s[kJob]);
    }
    case kTopicPlace: {
      static const std::vector<std::string> r = {"i live in {} .", "i am from {} , it is lovely .",
                                                 "{} , i have lived there for years ."};
      return fill(pick_from(rng, r), s[kPlace]);
    }
    case kTopicFood: {
      static const std::vector<std::string> r = {"i really like {} .", "{} is my favorite .", "i could eat {} every day ."};
      return fill(pick_from(rng, r), s[kFood]);
    }
    default: {
      static const std::vector<std::string> r = {"i am great ! i just got back from {} .",
                                                 "doing well , i was {} all morning .", "good , i am going {} soon ."};
      return fill(pick_from(rng, r), s[kHobby]);
    }
  }
}

Slots random_slots(std::mt19937_64& rng) {
  return {pick_from(rng, kHobbies), pick_from(rng, kJobs), pick_from(rng, kPlaces), pick_from(rng, kFoods)};
}

// Slots sharing no word with `avoid`.
Slots disjoint_slots(const Slots& avoid, std::mt19937_64& rng) {
  const std::array<const std::vector<std::string>*, 4> pools = {&kHobbies, &kJobs, &kPlaces, &kFoods};
  Slots s;
  for (std::size_t i = 0; i < 4; ++i) {
    do {
      s[i] = pick_from(rng, *pools[i]);
    } while (s[i] == avoid[i]);
  }
  return s;
}

}  // namespace

const std::set<std::string>& synthetic_slot_words() {
  static const std::set<std::string> words = [] {
    std::set<std::string> w;
    for (const auto* pool : {&kHobbies, &kJobs, &kPlaces, &kFoods}) w.insert(pool->begin(), pool->end());
    return w;
  }();
  return words;
}

std::set<std::string> slot_words_in(std::string_view text) {
  std::set<std::string> out;
  for (const auto& tok : text::normalized_tokens(text))
    if (synthetic_slot_words().count(tok)) out.insert(tok);
  return out;
}

std::vector<DialogueExample> gen_synthetic_dialogue(int num_personas, int turns_per_dialogue, std::uint64_t seed) {
  if (num_personas <= 0 || turns_per_dialogue <= 0) throw DialogueError("synthetic corpus parameters must be positive");
  std::mt19937_64 rng(seed);
  std::vector<DialogueExample> corpus;
  for (int p = 0; p < num_personas; ++p) {
    const Slots slots = random_slots(rng);
    const auto persona = persona_sentences(slots, rng);

    std::vector<Topic> topics;
    for (int t = 0; t < kTopicCount; ++t) topics.push_back(static_cast<Topic>(t));
    for (std::size_t i = topics.size(); i > 1; --i) std::swap(topics[i - 1], topics[pick(rng, i)]);

    std::vector<std::string> history;
    for (int turn = 0; turn < turns_per_dialogue; ++turn) {
      const Topic topic = topics[static_cast<std::size_t>(turn) % topics.size()];
      history.push_back(pick_from(rng, questions(topic)));
      DialogueExample ex;
      ex.persona = persona;
      ex.history = history;
      ex.gold = reply(topic, slots, rng);
      while (ex.distractors.size() < static_cast<std::size_t>(kCandidateCount - 1)) {
        const Slots other = disjoint_slots(slots, rng);
        const auto off_topic = static_cast<Topic>((topic + 1 + pick(rng, kTopicCount - 1)) % kTopicCount);
        std::string d = reply(off_topic, other, rng);
        if (d != ex.gold) ex.distractors.push_back(std::move(d));
      }
      history.push_back(ex.gold);
      corpus.push_back(std::move(ex));
    }
  }
  return corpus;
}

void write_corpus(const std::filesystem::path& path, std::span<const DialogueExample> corpus) {
  std::ofstream out(path);
  if (!out) throw InvalidCorpus("cannot write corpus: " + path.string());
  for (const auto& ex : corpus)
    out << nlohmann::json{{"persona", ex.persona}, {"history", ex.history}, {"gold", ex.gold}, {"distractors", ex.distractors}}
               .dump()
        << '\n';
}

std::vector<DialogueExample> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidCorpus("cannot open corpus: " + path.string());
  std::vector<DialogueExample> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      DialogueExample ex{j.at("persona").get<std::vector<std::string>>(), j.at("history").get<std::vector<std::string>>(),
                         j.at("gold").get<std::string>(), j.at("distractors").get<std::vector<std::string>>()};
      if (ex.distractors.size() != static_cast<std::size_t>(kCandidateCount - 1))
        throw InvalidCorpus("line " + std::to_string(lineno) + ": expected 19 distractors");
      corpus.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidCorpus("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return corpus;
}

}  // namespace freetalky::dialogue
