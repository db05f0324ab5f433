#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace freetalky::gec {

class GecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SequenceTooLong : public GecError {
 public:
  using GecError::GecError;
};

class SuppressedResult : public GecError {
 public:
  using GecError::GecError;
};

enum class Device { Cpu, Gpu };

std::string to_string(Device d);
Device parse_device(const std::string& s);

struct GecConfig {
  int num_layers = 1;
  int num_heads = 4;
  int embedding_dim = 64;
  int feedforward_dim = 128;
  int max_positions = 32;
  int beam_size = 4;
  Device device_preference = Device::Cpu;
  double edit_ratio_threshold = 0.5;
  double dropout = 0.0;  // training only

  void validate() const;
};

enum class EditKind { Insert, Delete, Replace };

std::string to_string(EditKind k);
EditKind parse_edit_kind(const std::string& s);

struct Edit {
  EditKind kind;
  int position = 0;  // word index in the source
  std::string original;
  std::string replacement;

  bool operator==(const Edit&) const = default;
};

struct GecResult {
  std::string source;
  std::string correction;
  std::vector<Edit> edits;
  bool emit = false;

  bool operator==(const GecResult&) const = default;
};

}  // namespace freetalky::gec
