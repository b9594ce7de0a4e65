#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "seedshift/geometry.hpp"
#include "seedshift/meanshift.hpp"

namespace seedshift {

// EMB1: "EMB1", u32 n, u32 d, then n*d f32 values row-major. LBL1: "LBL1",
// u32 n, then n u32 labels. All integers and floats little-endian.

std::string encode_embeddings(const EmbeddingSet& set);
EmbeddingSet decode_embeddings(std::string_view bytes);

std::string encode_labels(std::span<const std::uint32_t> labels);
Labels decode_labels(std::string_view bytes);

void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& set);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path,
                  std::span<const std::uint32_t> labels);
Labels read_labels(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace seedshift
