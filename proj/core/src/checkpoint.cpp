// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace importantaug {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'I', 'A', 'U', 'G', 'C', 'K', 'P', '1'};

void put_u32(std::ofstream& out, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}
void put_u64(std::ofstream& out, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}
uint32_t get_u32(const unsigned char* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
  return v;
}
uint64_t get_u64(const unsigned char* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  json header;
  header["kind"] = checkpoint.kind;
  header["words"] = checkpoint.words;
  header["config"] =
      checkpoint.config_json.empty() ? json::object() : json::parse(checkpoint.config_json);
  json directory = json::array();
  uint64_t offset = 0;
  for (const auto& [name, tensor] : checkpoint.tensors) {
    directory.push_back({{"name", name},
                         {"rows", tensor.rows()},
                         {"cols", tensor.cols()},
                         {"offset", offset}});
    offset += static_cast<uint64_t>(tensor.size()) * 8;
  }
  header["tensors"] = directory;
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("checkpoint '" + path.string() + "': cannot open for writing");
  out.write(kMagic, 8);
  put_u32(out, kCheckpointVersion);
  put_u64(out, header_text.size());
  out.write(header_text.data(), static_cast<long>(header_text.size()));
  for (const auto& [name, tensor] : checkpoint.tensors) {
    for (Eigen::Index r = 0; r < tensor.rows(); ++r)
      for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
        uint64_t bits;
        const double d = tensor(r, c);
        std::memcpy(&bits, &d, sizeof(bits));
        put_u64(out, bits);
      }
  }
  if (!out) throw DataError("checkpoint '" + path.string() + "': write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint '" + path.string() + "': cannot open file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 20 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw DataError("checkpoint '" + path.string() + "': not a checkpoint file");
  const uint32_t version = get_u32(bytes.data() + 8);
  if (version != kCheckpointVersion)
    throw DataError("checkpoint '" + path.string() + "': format version " +
                    std::to_string(version) + " does not match supported version " +
                    std::to_string(kCheckpointVersion));
  const uint64_t header_len = get_u64(bytes.data() + 12);
  if (20 + header_len > bytes.size())
    throw DataError("checkpoint '" + path.string() + "': truncated header");

  json header;
  try {
    header = json::parse(bytes.begin() + 20, bytes.begin() + 20 + static_cast<long>(header_len));
  } catch (const json::exception& e) {
    throw DataError("checkpoint '" + path.string() + "': bad header: " + e.what());
  }

  Checkpoint checkpoint;
  try {
    checkpoint.kind = header.at("kind").get<std::string>();
    checkpoint.words = header.at("words").get<std::vector<std::string>>();
    checkpoint.config_json = header.at("config").dump();
    const size_t payload_start = 20 + header_len;
    for (const auto& entry : header.at("tensors")) {
      const auto name = entry.at("name").get<std::string>();
      const auto rows = entry.at("rows").get<Eigen::Index>();
      const auto cols = entry.at("cols").get<Eigen::Index>();
      const auto offset = entry.at("offset").get<uint64_t>();
      const size_t need = payload_start + offset + static_cast<size_t>(rows * cols) * 8;
      if (need > bytes.size())
        throw DataError("checkpoint '" + path.string() + "': truncated tensor '" + name + "'");
      Eigen::ArrayXXd tensor(rows, cols);
      const unsigned char* p = bytes.data() + payload_start + offset;
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
          const uint64_t bits = get_u64(p);
          double d;
          std::memcpy(&d, &bits, sizeof(d));
          tensor(r, c) = d;
          p += 8;
        }
      checkpoint.tensors[name] = std::move(tensor);
    }
  } catch (const json::exception& e) {
    throw DataError("checkpoint '" + path.string() + "': bad header field: " + e.what());
  }
  return checkpoint;
}

}  // namespace importantaug
