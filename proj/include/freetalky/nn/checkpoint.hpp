#pragma once

#include "freetalky/nn/layers.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace freetalky::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Archive layout:
//   8 bytes   magic "FTCKPT01"
//   8 bytes   little-endian header length H
//   H bytes   JSON header: {"kind", "metadata", "tensors": [{"name", "rows", "cols"}]}
//   payload   every tensor's values as little-endian float64, row-major, in header order
void save_checkpoint(const std::filesystem::path& path, const std::string& kind, const nlohmann::json& metadata,
                     const ParameterSet& params);

struct CheckpointHeader {
  std::string kind;
  nlohmann::json metadata;
};

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path);

// Copies stored tensors into `params`, matched by name and shape. Every
// parameter must be present.
void load_checkpoint_tensors(const std::filesystem::path& path, const std::string& expected_kind, ParameterSet& params);

}  // namespace freetalky::nn
