#include "freetalky/speech/speech.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numbers>
#include <sstream>

namespace freetalky::speech {

std::string to_string(VoiceStyle s) { return s == VoiceStyle::Joyful ? "joyful" : "neutral"; }

VoiceStyle parse_voice_style(const std::string& s) {
  if (s == "neutral") return VoiceStyle::Neutral;
  if (s == "joyful") return VoiceStyle::Joyful;
  throw SpeechError("unknown voice style '" + s + "'");
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

void put_pcm(std::vector<std::uint8_t>& out, const AudioClip& clip) {
  for (std::int16_t s : clip.samples) put_u16(out, static_cast<std::uint16_t>(s));
}

}  // namespace

std::vector<std::uint8_t> encode_wav(const AudioClip& clip) {
  if (clip.sample_rate <= 0) throw WavError("sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  for (char c : std::string_view("RIFF")) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, 36 + data_bytes);
  for (char c : std::string_view("WAVEfmt ")) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  for (char c : std::string_view("data")) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, data_bytes);
  put_pcm(out, clip);
  return out;
}

AudioClip decode_wav(std::span<const std::uint8_t> b) {
  auto tag = [&b](std::size_t at, std::string_view t) {
    return at + 4 <= b.size() && std::equal(t.begin(), t.end(), b.begin() + static_cast<std::ptrdiff_t>(at));
  };
  if (!tag(0, "RIFF") || !tag(8, "WAVE")) throw WavError("not a RIFF/WAVE file");
  AudioClip clip;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const std::uint32_t size = get_u32(b, at + 4);
    const std::size_t body = at + 8;
    if (body + size > b.size()) throw WavError("truncated chunk");
    if (tag(at, "fmt ")) {
      if (size < 16) throw WavError("short fmt chunk");
      if (get_u16(b, body) != 1) throw WavError("only PCM audio is supported");
      if (get_u16(b, body + 2) != 1) throw WavError("only mono audio is supported");
      clip.sample_rate = static_cast<int>(get_u32(b, body + 4));
      if (get_u16(b, body + 14) != 16) throw WavError("only 16-bit audio is supported");
      if (clip.sample_rate <= 0) throw WavError("sample rate must be positive");
      have_fmt = true;
    } else if (tag(at, "data")) {
      if (!have_fmt) throw WavError("data chunk before fmt chunk");
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i)
        clip.samples[i] = static_cast<std::int16_t>(get_u16(b, body + 2 * i));
      return clip;
    }
    at = body + size + (size & 1);
  }
  throw WavError("no data chunk");
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  const auto bytes = encode_wav(clip);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WavError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

std::string clip_digest(const AudioClip& clip) {
  std::vector<std::uint8_t> bytes;
  put_u32(bytes, static_cast<std::uint32_t>(clip.sample_rate));
  put_pcm(bytes, clip);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw SpeechError("SHA-256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

FixtureStt FixtureStt::load(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw SpeechError("cannot open fixture manifest " + manifest.string());
  FixtureStt stt;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw SpeechError("manifest line " + std::to_string(lineno) + ": missing tab");
    stt.add_digest(line.substr(0, tab), line.substr(tab + 1));
  }
  return stt;
}

void FixtureStt::add(const AudioClip& clip, std::string transcript) {
  add_digest(clip_digest(clip), std::move(transcript));
}

void FixtureStt::add_digest(std::string digest, std::string transcript) {
  if (digest.size() != 64 || digest.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw SpeechError("malformed digest '" + digest + "'");
  transcripts_[std::move(digest)] = std::move(transcript);
}

std::string FixtureStt::transcribe(const AudioClip& audio) const {
  const auto it = transcripts_.find(clip_digest(audio));
  if (it == transcripts_.end()) throw UnrecognizedAudio("no fixture for this clip");
  return it->second;
}

void FixtureStt::save(const std::filesystem::path& manifest) const {
  std::ofstream out(manifest);
  if (!out) throw SpeechError("cannot write " + manifest.string());
  for (const auto& [digest, text] : transcripts_) out << digest << '\t' << text << '\n';
}

AudioClip ToneTts::synthesize(std::string_view text, VoiceStyle style) const {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) throw EmptyText("nothing to synthesize");
  AudioClip clip;
  clip.samples.reserve(text.size() * kSamplesPerChar);
  const double base = base_frequency(style);
  for (unsigned char c : text) {
    const double hz = base * std::pow(2.0, static_cast<double>(c % 12) / 12.0);
    for (int i = 0; i < kSamplesPerChar; ++i) {
      const double t = static_cast<double>(i) / clip.sample_rate;
      clip.samples.push_back(static_cast<std::int16_t>(std::lround(8000.0 * std::sin(2.0 * std::numbers::pi * hz * t))));
    }
  }
  return clip;
}

double estimate_first_tone_hz(const AudioClip& clip) {
  const std::size_t n = std::min<std::size_t>(clip.samples.size(), ToneTts::kSamplesPerChar);
  if (n < 2) throw SpeechError("clip too short");
  int crossings = 0;
  for (std::size_t i = 1; i < n; ++i)
    if ((clip.samples[i - 1] < 0) != (clip.samples[i] < 0)) ++crossings;
  return crossings * static_cast<double>(clip.sample_rate) / (2.0 * static_cast<double>(n));
}

}  // namespace freetalky::speech
