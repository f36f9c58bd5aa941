// Copyright 2026-present the vidsearch authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vidsearch/common/binary_io.hpp"

namespace vidsearch::mergevec {

/// Archive layout:
///   "VAGTNSR1" | u32 header length | header JSON | payload | u32 CRC32C
/// The header maps each tensor name to {dtype, shape, offset, length} with
/// keys sorted; offsets are relative to the payload start and tensors are
/// laid out in name order. Free-form string metadata lives under the
/// reserved "__metadata__" key. The CRC covers every preceding byte.
inline constexpr char kArchiveMagic[8] = {'V', 'A', 'G', 'T', 'N', 'S', 'R', '1'};
inline constexpr const char* kMetadataKey = "__metadata__";
inline constexpr const char* kAllowNonfinite = "allow_nonfinite";

struct TensorInfo {
    std::string dtype = "f32";
    std::vector<std::uint64_t> shape;

    std::uint64_t numel() const;
    std::uint64_t byte_length() const { return numel() * 4; }
    friend bool operator==(const TensorInfo&, const TensorInfo&) = default;
};

struct Tensor {
    TensorInfo info;
    std::vector<float> data;
};

using Metadata = std::map<std::string, std::string>;

bool allows_nonfinite(const Metadata& metadata);

struct TensorArchive {
    std::map<std::string, Tensor> tensors;
    Metadata metadata;

    /// UnsupportedDtype, InvalidArgument (reserved or empty name, data size
    /// not matching the shape), NonFiniteInput (unless allowed).
    void validate() const;

    std::vector<std::uint8_t> serialize() const;
    static TensorArchive deserialize(std::span<const std::uint8_t> bytes);
};

/// Bitwise equality of names, shapes, data and metadata.
bool identical(const TensorArchive& a, const TensorArchive& b);

void write_archive(const TensorArchive& archive, const std::filesystem::path& path);
/// CorruptArchive on bad magic, malformed header, size mismatch or CRC
/// mismatch; UnsupportedDtype for anything but f32.
TensorArchive read_archive(const std::filesystem::path& path);

/// Tensor-at-a-time access to an archive file. The whole file is checksummed
/// once on open (streamed in fixed-size chunks); tensors are then read on
/// demand.
class ArchiveReader {
public:
    explicit ArchiveReader(const std::filesystem::path& path);

    const std::map<std::string, TensorInfo>& tensors() const { return infos_; }
    const Metadata& metadata() const { return metadata_; }
    std::uint32_t checksum() const { return crc_; }

    /// NotFound for an unknown name; NonFiniteInput unless allowed.
    std::vector<float> read(const std::string& name);

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::map<std::string, TensorInfo> infos_;
    std::map<std::string, std::uint64_t> offsets_;
    Metadata metadata_;
    std::uint64_t payload_start_ = 0;
    std::uint32_t crc_ = 0;
};

/// Writes an archive one tensor at a time, in name order, to a temporary
/// sibling that replaces `path` on finish().
class ArchiveWriter {
public:
    ArchiveWriter(std::filesystem::path path, std::map<std::string, TensorInfo> layout, Metadata metadata);
    ~ArchiveWriter();
    ArchiveWriter(const ArchiveWriter&) = delete;
    ArchiveWriter& operator=(const ArchiveWriter&) = delete;

    /// Tensors must arrive in name order with the declared size.
    void write(const std::string& name, std::span<const float> data);
    void finish();

private:
    void emit(std::span<const std::uint8_t> bytes);

    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    std::map<std::string, TensorInfo> layout_;
    std::map<std::string, TensorInfo>::const_iterator next_;
    Crc32c crc_;
    bool finished_ = false;
};

}  // namespace vidsearch::mergevec
