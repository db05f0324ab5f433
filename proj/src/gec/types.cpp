#include "freetalky/gec/types.hpp"

namespace freetalky::gec {

std::string to_string(Device d) { return d == Device::Gpu ? "gpu" : "cpu"; }

Device parse_device(const std::string& s) {
  if (s == "cpu") return Device::Cpu;
  if (s == "gpu") return Device::Gpu;
  throw GecError("unknown device '" + s + "'");
}

void GecConfig::validate() const {
  if (num_layers <= 0 || num_heads <= 0 || embedding_dim <= 0 || feedforward_dim <= 0 || max_positions <= 1 ||
      beam_size <= 0)
    throw GecError("GEC config sizes must be positive");
  if (embedding_dim % num_heads != 0) throw GecError("embedding_dim must be divisible by num_heads");
  if (!(edit_ratio_threshold >= 0.0 && edit_ratio_threshold <= 1.0))
    throw GecError("edit_ratio_threshold must lie in [0, 1]");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw GecError("dropout must lie in [0, 1)");
}

std::string to_string(EditKind k) {
  switch (k) {
    case EditKind::Insert: return "insert";
    case EditKind::Delete: return "delete";
    case EditKind::Replace: return "replace";
  }
  return "replace";
}

EditKind parse_edit_kind(const std::string& s) {
  if (s == "insert") return EditKind::Insert;
  if (s == "delete") return EditKind::Delete;
  if (s == "replace") return EditKind::Replace;
  throw GecError("unknown edit kind '" + s + "'");
}

}  // namespace freetalky::gec
