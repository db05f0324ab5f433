#include "freetalky/speech/speech.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace freetalky::speech;
namespace ft = freetalky::testing;

// Reference digests computed with Python's hashlib over the same byte layout.
TEST(Digest, KnownVectors) {
  EXPECT_EQ(clip_digest(AudioClip{}), "5f8377b48932f9abeb2852042cbc232a72fb3d610ab308d374224dca7f33998c");
  EXPECT_EQ(clip_digest(AudioClip{{1, -2, 300}, 8000}),
            "d123bb6fe0792a3a40d9fdd6ceca069c8e793a366da8666b31cd300b51903dea");
}

TEST(Wav, EncodeDecodeRoundTrip) {
  AudioClip clip{{0, 1, -1, 32767, -32768, 1234}, 22050};
  const auto bytes = encode_wav(clip);
  EXPECT_EQ(bytes.size(), 44u + 2 * clip.samples.size());
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "RIFF");
  EXPECT_EQ(decode_wav(bytes), clip);
}

TEST(Wav, FileRoundTrip) {
  ft::TempDir dir;
  AudioClip clip{{5, 6, 7}, 16000};
  write_wav(dir / "a.wav", clip);
  EXPECT_EQ(read_wav(dir / "a.wav"), clip);
  EXPECT_THROW(read_wav(dir / "missing.wav"), WavError);
}

TEST(Wav, RejectsGarbage) {
  const std::vector<std::uint8_t> junk(60, 0x41);
  EXPECT_THROW(decode_wav(junk), WavError);
  auto bytes = encode_wav(AudioClip{{1, 2}, 16000});
  bytes.resize(20);
  EXPECT_THROW(decode_wav(bytes), WavError);
}

TEST(Tts, OneToneBlockPerCharacter) {
  ToneTts tts;
  const auto clip = tts.synthesize("Hi!", VoiceStyle::Neutral);
  EXPECT_EQ(clip.samples.size(), 3u * ToneTts::kSamplesPerChar);
  EXPECT_THROW(tts.synthesize("   ", VoiceStyle::Neutral), EmptyText);
}

TEST(Tts, StyleRaisesPitch) {
  ToneTts tts;
  const double neutral = estimate_first_tone_hz(tts.synthesize("a", VoiceStyle::Neutral));
  const double joyful = estimate_first_tone_hz(tts.synthesize("a", VoiceStyle::Joyful));
  EXPECT_GT(joyful, neutral);
  EXPECT_NEAR(joyful - neutral, ToneTts::kJoyfulHz - ToneTts::kNeutralHz, 15.0);
}

TEST(Tts, Deterministic) {
  ToneTts tts;
  EXPECT_EQ(tts.synthesize("hello", VoiceStyle::Joyful), tts.synthesize("hello", VoiceStyle::Joyful));
  EXPECT_NE(tts.synthesize("hello", VoiceStyle::Joyful), tts.synthesize("hellp", VoiceStyle::Joyful));
}

TEST(Stt, FixtureLookup) {
  ToneTts tts;
  FixtureStt stt;
  const auto clip = tts.synthesize("Bye.", VoiceStyle::Neutral);
  stt.add(clip, "Bye.");
  EXPECT_EQ(stt.transcribe(clip), "Bye.");
  EXPECT_THROW(stt.transcribe(tts.synthesize("Hi.", VoiceStyle::Neutral)), UnrecognizedAudio);
}

TEST(Stt, ManifestRoundTrip) {
  ft::TempDir dir;
  ToneTts tts;
  FixtureStt stt;
  const auto a = tts.synthesize("one", VoiceStyle::Neutral);
  const auto b = tts.synthesize("two", VoiceStyle::Joyful);
  stt.add(a, "I want visit Colorado.");
  stt.add(b, "Yes please.");
  stt.save(dir / "m.tsv");
  const auto loaded = FixtureStt::load(dir / "m.tsv");
  EXPECT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded.transcribe(a), "I want visit Colorado.");
  EXPECT_EQ(loaded.transcribe(b), "Yes please.");
}

TEST(Stt, ManifestSkipsCommentsAndRejectsBadLines) {
  ft::TempDir dir;
  std::ofstream(dir / "ok.tsv") << "# comment\n" << clip_digest(AudioClip{}) << "\thello\n";
  EXPECT_EQ(FixtureStt::load(dir / "ok.tsv").transcribe(AudioClip{}), "hello");
  std::ofstream(dir / "bad.tsv") << "no-tab-here\n";
  EXPECT_THROW(FixtureStt::load(dir / "bad.tsv"), SpeechError);
}

TEST(VoiceStyle, Names) {
  EXPECT_EQ(parse_voice_style(to_string(VoiceStyle::Joyful)), VoiceStyle::Joyful);
  EXPECT_THROW(parse_voice_style("angry"), SpeechError);
}
