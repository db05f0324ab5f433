#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace freetalky::speech {

class SpeechError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnrecognizedAudio : public SpeechError {
 public:
  using SpeechError::SpeechError;
};

class EmptyText : public SpeechError {
 public:
  using SpeechError::SpeechError;
};

class WavError : public SpeechError {
 public:
  using SpeechError::SpeechError;
};

enum class VoiceStyle { Neutral, Joyful };

std::string to_string(VoiceStyle s);
VoiceStyle parse_voice_style(const std::string& s);

struct AudioClip {
  std::vector<std::int16_t> samples;  // mono
  int sample_rate = 16000;

  double duration_seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
  bool operator==(const AudioClip&) const = default;
};

// 16-bit PCM mono RIFF/WAVE.
std::vector<std::uint8_t> encode_wav(const AudioClip& clip);
AudioClip decode_wav(std::span<const std::uint8_t> bytes);
void write_wav(const std::filesystem::path& path, const AudioClip& clip);
AudioClip read_wav(const std::filesystem::path& path);

// Lowercase hex SHA-256 over the sample rate (u32 little-endian) followed by
// the little-endian PCM bytes.
std::string clip_digest(const AudioClip& clip);

class SpeechToText {
 public:
  virtual ~SpeechToText() = default;
  virtual std::string transcribe(const AudioClip& audio) const = 0;
};

class TextToSpeech {
 public:
  virtual ~TextToSpeech() = default;
  virtual AudioClip synthesize(std::string_view text, VoiceStyle style) const = 0;
};

// Returns the transcript registered for a clip's digest.
class FixtureStt : public SpeechToText {
 public:
  // Manifest: one "digest<TAB>transcript" per line; '#' lines are comments.
  static FixtureStt load(const std::filesystem::path& manifest);

  void add(const AudioClip& clip, std::string transcript);
  void add_digest(std::string digest, std::string transcript);
  std::string transcribe(const AudioClip& audio) const override;
  void save(const std::filesystem::path& manifest) const;
  std::size_t size() const { return transcripts_.size(); }

 private:
  std::map<std::string, std::string> transcripts_;
};

// One short sine tone per character; pitch steps above the style's base
// frequency by the character code.
class ToneTts : public TextToSpeech {
 public:
  static constexpr int kSamplesPerChar = 1600;
  static constexpr double kNeutralHz = 220.0;
  static constexpr double kJoyfulHz = 330.0;

  static double base_frequency(VoiceStyle style) { return style == VoiceStyle::Joyful ? kJoyfulHz : kNeutralHz; }
  AudioClip synthesize(std::string_view text, VoiceStyle style) const override;
};

// Dominant frequency of the first tone of a ToneTts clip, by zero crossings.
double estimate_first_tone_hz(const AudioClip& clip);

}  // namespace freetalky::speech
