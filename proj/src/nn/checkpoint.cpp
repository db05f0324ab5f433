#include "freetalky/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

namespace freetalky::nn {

namespace {

constexpr char kMagic[8] = {'F', 'T', 'C', 'K', 'P', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

struct Archive {
  std::string kind;
  nlohmann::json metadata;
  nlohmann::json tensors;
  std::streamoff payload_offset = 0;
};

Archive read_archive(std::ifstream& in, const std::filesystem::path& path) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw CheckpointError("not a checkpoint archive: " + path.string());
  std::uint64_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), sizeof(len))) throw CheckpointError("truncated checkpoint header");
  std::string header(len, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(len))) throw CheckpointError("truncated checkpoint header");
  Archive a;
  try {
    auto j = nlohmann::json::parse(header);
    a.kind = j.at("kind").get<std::string>();
    a.metadata = j.at("metadata");
    a.tensors = j.at("tensors");
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
  }
  a.payload_offset = in.tellg();
  return a;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::string& kind, const nlohmann::json& metadata,
                     const ParameterSet& params) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& [name, v] : params.entries()) tensors.push_back({{"name", name}, {"rows", v.rows()}, {"cols", v.cols()}});
  const std::string header = nlohmann::json{{"kind", kind}, {"metadata", metadata}, {"tensors", tensors}}.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path.string());
  out.write(kMagic, 8);
  const std::uint64_t len = header.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto& [_, v] : params.entries())
    out.write(reinterpret_cast<const char*>(v.value().data()), static_cast<std::streamsize>(v.value().size() * sizeof(double)));
  if (!out) throw CheckpointError("failed writing checkpoint: " + path.string());
}

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
  Archive a = read_archive(in, path);
  return {a.kind, a.metadata};
}

void load_checkpoint_tensors(const std::filesystem::path& path, const std::string& expected_kind, ParameterSet& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
  Archive a = read_archive(in, path);
  if (a.kind != expected_kind)
    throw CheckpointError("checkpoint kind '" + a.kind + "' does not match expected '" + expected_kind + "'");

  std::map<std::string, Matrix> stored;
  for (const auto& t : a.tensors) {
    const auto rows = t.at("rows").get<Eigen::Index>();
    const auto cols = t.at("cols").get<Eigen::Index>();
    Matrix m(rows, cols);
    if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
      throw CheckpointError("truncated checkpoint payload");
    stored.emplace(t.at("name").get<std::string>(), std::move(m));
  }
  for (const auto& [name, v] : params.entries()) {
    auto it = stored.find(name);
    if (it == stored.end()) throw CheckpointError("checkpoint is missing tensor " + name);
    if (it->second.rows() != v.rows() || it->second.cols() != v.cols())
      throw CheckpointError("shape mismatch for tensor " + name);
    Var copy = v;
    copy.mutable_value() = it->second;
  }
}

}  // namespace freetalky::nn
