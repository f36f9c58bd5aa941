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

#include "vidsearch/mergevec/tensor_archive.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "vidsearch/common/error.hpp"

namespace vidsearch::mergevec {

namespace {

constexpr std::size_t kPrefixBytes = sizeof(kArchiveMagic) + 4;
constexpr std::size_t kChunkBytes = 1 << 20;

struct Header {
    std::map<std::string, TensorInfo> infos;
    std::map<std::string, std::uint64_t> offsets;
    Metadata metadata;
    std::uint64_t payload_bytes = 0;
};

std::string header_json(const std::map<std::string, TensorInfo>& layout, const Metadata& metadata) {
    nlohmann::json j = nlohmann::json::object();
    std::uint64_t offset = 0;
    for (const auto& [name, info] : layout) {
        j[name] = {{"dtype", info.dtype}, {"shape", info.shape}, {"offset", offset}, {"length", info.byte_length()}};
        offset += info.byte_length();
    }
    if (!metadata.empty()) j[kMetadataKey] = metadata;
    return j.dump();
}

void check_name(const std::string& name) {
    if (name.empty() || name == kMetadataKey) raise(ErrorCode::InvalidArgument, "invalid tensor name '" + name + "'");
}

void check_dtype(const std::string& dtype, const std::string& name) {
    if (dtype != "f32") raise(ErrorCode::UnsupportedDtype, "tensor '" + name + "' has dtype '" + dtype + "'");
}

Header parse_header(std::string_view text) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) raise(ErrorCode::CorruptArchive, "archive header is not a JSON object");
    Header h;
    try {
        for (const auto& [name, entry] : j.items()) {
            if (name == kMetadataKey) {
                h.metadata = entry.get<Metadata>();
                continue;
            }
            TensorInfo info;
            info.dtype = entry.at("dtype").get<std::string>();
            check_dtype(info.dtype, name);
            info.shape = entry.at("shape").get<std::vector<std::uint64_t>>();
            const auto offset = entry.at("offset").get<std::uint64_t>();
            const auto length = entry.at("length").get<std::uint64_t>();
            if (info.numel() > std::numeric_limits<std::uint64_t>::max() / 4 || length != info.byte_length()) {
                raise(ErrorCode::CorruptArchive, "tensor '" + name + "' length does not match its shape");
            }
            if (offset != h.payload_bytes) raise(ErrorCode::CorruptArchive, "tensor '" + name + "' is not laid out in name order");
            h.payload_bytes += length;
            h.offsets.emplace(name, offset);
            h.infos.emplace(name, std::move(info));
        }
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::CorruptArchive, std::string("malformed archive header: ") + e.what());
    }
    return h;
}

void check_finite(std::span<const float> data, const std::string& name) {
    for (float v : data) {
        if (!std::isfinite(v)) raise(ErrorCode::NonFiniteInput, "tensor '" + name + "' holds a non-finite value");
    }
}

std::span<const std::uint8_t> as_bytes(std::span<const float> data) {
    return {reinterpret_cast<const std::uint8_t*>(data.data()), data.size() * sizeof(float)};
}

std::uint32_t read_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

std::uint64_t TensorInfo::numel() const {
    std::uint64_t n = 1;
    for (const auto d : shape) {
        if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d) {
            raise(ErrorCode::CorruptArchive, "tensor shape overflows");
        }
        n *= d;
    }
    return n;
}

bool allows_nonfinite(const Metadata& metadata) {
    const auto it = metadata.find(kAllowNonfinite);
    return it != metadata.end() && it->second == "true";
}

void TensorArchive::validate() const {
    const bool nonfinite_ok = allows_nonfinite(metadata);
    for (const auto& [name, t] : tensors) {
        check_name(name);
        check_dtype(t.info.dtype, name);
        if (t.data.size() != t.info.numel()) {
            raise(ErrorCode::InvalidArgument, "tensor '" + name + "' data size does not match its shape");
        }
        if (!nonfinite_ok) check_finite(t.data, name);
    }
}

std::vector<std::uint8_t> TensorArchive::serialize() const {
    validate();
    std::map<std::string, TensorInfo> layout;
    for (const auto& [name, t] : tensors) layout.emplace(name, t.info);
    const auto header = header_json(layout, metadata);
    ByteWriter w;
    w.bytes(std::string_view(kArchiveMagic, sizeof(kArchiveMagic)));
    w.u32(static_cast<std::uint32_t>(header.size()));
    w.bytes(header);
    for (const auto& [name, t] : tensors) w.bytes(as_bytes(t.data));
    w.u32(crc32c(w.data()));
    return w.take();
}

TensorArchive TensorArchive::deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kPrefixBytes + 4 || std::memcmp(bytes.data(), kArchiveMagic, sizeof(kArchiveMagic)) != 0) {
        raise(ErrorCode::CorruptArchive, "not a tensor archive (bad magic)");
    }
    const std::uint64_t header_len = read_u32(bytes.data() + sizeof(kArchiveMagic));
    if (kPrefixBytes + header_len + 4 > bytes.size()) raise(ErrorCode::CorruptArchive, "truncated archive header");
    const auto header = parse_header(
        std::string_view(reinterpret_cast<const char*>(bytes.data() + kPrefixBytes), static_cast<std::size_t>(header_len)));
    const std::uint64_t payload_start = kPrefixBytes + header_len;
    if (payload_start + header.payload_bytes + 4 != bytes.size()) raise(ErrorCode::CorruptArchive, "archive size mismatch");
    const auto body = bytes.first(bytes.size() - 4);
    if (crc32c(body) != read_u32(bytes.data() + body.size())) raise(ErrorCode::CorruptArchive, "archive checksum mismatch");

    TensorArchive archive;
    archive.metadata = header.metadata;
    for (const auto& [name, info] : header.infos) {
        Tensor t{info, std::vector<float>(info.numel())};
        std::memcpy(t.data.data(), bytes.data() + payload_start + header.offsets.at(name), info.byte_length());
        archive.tensors.emplace(name, std::move(t));
    }
    archive.validate();
    return archive;
}

bool identical(const TensorArchive& a, const TensorArchive& b) {
    if (a.metadata != b.metadata || a.tensors.size() != b.tensors.size()) return false;
    for (auto ia = a.tensors.begin(), ib = b.tensors.begin(); ia != a.tensors.end(); ++ia, ++ib) {
        if (ia->first != ib->first || !(ia->second.info == ib->second.info)) return false;
        if (ia->second.data.size() != ib->second.data.size()) return false;
        if (std::memcmp(ia->second.data.data(), ib->second.data.data(), ia->second.data.size() * sizeof(float)) != 0) {
            return false;
        }
    }
    return true;
}

void write_archive(const TensorArchive& archive, const std::filesystem::path& path) {
    write_file_atomic(path, archive.serialize());
}

TensorArchive read_archive(const std::filesystem::path& path) { return TensorArchive::deserialize(read_file(path)); }

ArchiveReader::ArchiveReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) raise(ErrorCode::Io, "cannot open " + path.string());
    const auto size = std::filesystem::file_size(path);
    std::uint8_t prefix[kPrefixBytes];
    if (size < kPrefixBytes + 4 || !in_.read(reinterpret_cast<char*>(prefix), kPrefixBytes) ||
        std::memcmp(prefix, kArchiveMagic, sizeof(kArchiveMagic)) != 0) {
        raise(ErrorCode::CorruptArchive, path.string() + " is not a tensor archive (bad magic)");
    }
    const std::uint64_t header_len = read_u32(prefix + sizeof(kArchiveMagic));
    if (kPrefixBytes + header_len + 4 > size) raise(ErrorCode::CorruptArchive, "truncated archive header in " + path.string());
    std::string header_text(static_cast<std::size_t>(header_len), '\0');
    in_.read(header_text.data(), static_cast<std::streamsize>(header_len));
    auto header = parse_header(header_text);
    payload_start_ = kPrefixBytes + header_len;
    if (payload_start_ + header.payload_bytes + 4 != size) raise(ErrorCode::CorruptArchive, "archive size mismatch in " + path.string());

    Crc32c crc;
    in_.seekg(0);
    std::vector<char> chunk(kChunkBytes);
    for (std::uint64_t left = size - 4; left > 0;) {
        const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(left, chunk.size()));
        if (!in_.read(chunk.data(), static_cast<std::streamsize>(n))) raise(ErrorCode::CorruptArchive, "short read in " + path.string());
        crc.update(std::string_view(chunk.data(), n));
        left -= n;
    }
    std::uint8_t stored[4];
    in_.read(reinterpret_cast<char*>(stored), 4);
    if (crc.value() != read_u32(stored)) raise(ErrorCode::CorruptArchive, "archive checksum mismatch in " + path.string());
    crc_ = crc.value();
    infos_ = std::move(header.infos);
    offsets_ = std::move(header.offsets);
    metadata_ = std::move(header.metadata);
}

std::vector<float> ArchiveReader::read(const std::string& name) {
    const auto it = infos_.find(name);
    if (it == infos_.end()) raise(ErrorCode::NotFound, "no tensor '" + name + "' in " + path_.string());
    std::vector<float> data(it->second.numel());
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(payload_start_ + offsets_.at(name)));
    if (!in_.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(it->second.byte_length()))) {
        raise(ErrorCode::CorruptArchive, "short read of tensor '" + name + "'");
    }
    if (!allows_nonfinite(metadata_)) check_finite(data, name);
    return data;
}

ArchiveWriter::ArchiveWriter(std::filesystem::path path, std::map<std::string, TensorInfo> layout, Metadata metadata)
    : path_(std::move(path)), layout_(std::move(layout)) {
    for (const auto& [name, info] : layout_) {
        check_name(name);
        check_dtype(info.dtype, name);
    }
    tmp_ = path_;
    tmp_ += ".partial";
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) raise(ErrorCode::Io, "cannot write " + tmp_.string());
    const auto header = header_json(layout_, metadata);
    ByteWriter w;
    w.bytes(std::string_view(kArchiveMagic, sizeof(kArchiveMagic)));
    w.u32(static_cast<std::uint32_t>(header.size()));
    w.bytes(header);
    emit(w.data());
    next_ = layout_.begin();
}

ArchiveWriter::~ArchiveWriter() {
    if (!finished_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void ArchiveWriter::emit(std::span<const std::uint8_t> bytes) {
    crc_.update(bytes);
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out_) raise(ErrorCode::Io, "write failed for " + tmp_.string());
}

void ArchiveWriter::write(const std::string& name, std::span<const float> data) {
    if (next_ == layout_.end() || next_->first != name) {
        raise(ErrorCode::InvalidArgument, "tensor '" + name + "' written out of order");
    }
    if (data.size() != next_->second.numel()) raise(ErrorCode::InvalidArgument, "tensor '" + name + "' has the wrong size");
    emit(as_bytes(data));
    ++next_;
}

void ArchiveWriter::finish() {
    if (next_ != layout_.end()) raise(ErrorCode::InvalidArgument, "tensor '" + next_->first + "' was never written");
    ByteWriter w;
    w.u32(crc_.value());
    out_.write(reinterpret_cast<const char*>(w.data().data()), 4);
    out_.close();
    if (!out_) raise(ErrorCode::Io, "write failed for " + tmp_.string());
    std::filesystem::rename(tmp_, path_);
    finished_ = true;
}

}  // namespace vidsearch::mergevec
