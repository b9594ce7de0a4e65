#include "seedshift/formats.hpp"

#include <unistd.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "seedshift/error.hpp"

namespace seedshift {

namespace {

constexpr std::string_view kEmbeddingMagic = "EMB1";
constexpr std::string_view kLabelMagic = "LBL1";

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + b]))
         << (8 * b);
  }
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw invalid_argument(std::string(what) + " exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string encode_embeddings(const EmbeddingSet& set) {
  std::string out;
  const auto values = set.rows();
  out.reserve(12 + 4 * values.size());
  out.append(kEmbeddingMagic);
  put_u32(out, checked_u32(set.size(), "n"));
  put_u32(out, checked_u32(set.dim(), "d"));
  for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

EmbeddingSet decode_embeddings(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != kEmbeddingMagic) {
    throw corrupt_input("not an EMB1 file (bad magic or short header)");
  }
  const std::uint64_t n = get_u32(bytes, 4);
  const std::uint64_t d = get_u32(bytes, 8);
  if (n == 0 || d == 0) throw corrupt_input("EMB1 header has n or d equal to 0");
  if (bytes.size() - 12 != 4 * n * d) {
    throw corrupt_input("EMB1 payload is " + std::to_string(bytes.size() - 12) +
                        " bytes, header implies " + std::to_string(4 * n * d));
  }
  std::vector<float> values(n * d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(get_u32(bytes, 12 + 4 * i));
  }
  try {
    return EmbeddingSet(n, d, std::move(values));
  } catch (const Error& e) {
    throw corrupt_input(std::string("EMB1 payload rejected: ") + e.what());
  }
}

std::string encode_labels(std::span<const std::uint32_t> labels) {
  std::string out;
  out.reserve(8 + 4 * labels.size());
  out.append(kLabelMagic);
  put_u32(out, checked_u32(labels.size(), "n"));
  for (std::uint32_t l : labels) put_u32(out, l);
  return out;
}

Labels decode_labels(std::string_view bytes) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != kLabelMagic) {
    throw corrupt_input("not an LBL1 file (bad magic or short header)");
  }
  const std::uint64_t n = get_u32(bytes, 4);
  if (bytes.size() - 8 != 4 * n) {
    throw corrupt_input("LBL1 payload length does not match header");
  }
  Labels labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = get_u32(bytes, 8 + 4 * i);
  return labels;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw corrupt_input("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& set) {
  write_file_atomic(path, encode_embeddings(set));
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  return decode_embeddings(read_file(path));
}

void write_labels(const std::filesystem::path& path,
                  std::span<const std::uint32_t> labels) {
  write_file_atomic(path, encode_labels(labels));
}

Labels read_labels(const std::filesystem::path& path) {
  return decode_labels(read_file(path));
}

}  // namespace seedshift
