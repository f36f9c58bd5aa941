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

#include "vidsearch/mergevec/task_vector.hpp"

#include <cmath>

#include "vidsearch/common/error.hpp"
#include "vidsearch/common/text.hpp"

namespace vidsearch::mergevec {

namespace {

std::string crc_label(std::uint32_t crc) { return "crc32c:" + hex64(crc).substr(8); }

std::map<std::string, TensorInfo> layout_of(const TensorArchive& a) {
    std::map<std::string, TensorInfo> layout;
    for (const auto& [name, t] : a.tensors) layout.emplace(name, t.info);
    return layout;
}

void check_result(float v, bool allow_nonfinite, const std::string& name) {
    if (!allow_nonfinite && !std::isfinite(v)) {
        raise(ErrorCode::NonFiniteResult, "tensor '" + name + "' overflowed to a non-finite value");
    }
}

Metadata diff_metadata(const std::string& minuend, const std::string& subtrahend, bool allow_nonfinite) {
    Metadata m{{"task_vector.op", "diff"}, {"task_vector.minuend", minuend}, {"task_vector.subtrahend", subtrahend}};
    if (allow_nonfinite) m[kAllowNonfinite] = "true";
    return m;
}

Metadata add_metadata(const std::string& base, const std::string& task_vector, const Metadata& tau_meta,
                      bool allow_nonfinite) {
    Metadata m;
    for (const auto& [k, v] : tau_meta) {
        if (k.starts_with("task_vector.")) m.emplace(k, v);
    }
    m["merge.op"] = "add";
    m["merge.base"] = base;
    m["merge.task_vector"] = task_vector;
    if (allow_nonfinite) m[kAllowNonfinite] = "true";
    return m;
}

}  // namespace

void check_compatible(const std::map<std::string, TensorInfo>& a, const std::map<std::string, TensorInfo>& b) {
    std::vector<std::string> only_a;
    std::vector<std::string> only_b;
    for (const auto& [name, info] : a) {
        if (!b.contains(name)) only_a.push_back(name);
    }
    for (const auto& [name, info] : b) {
        if (!a.contains(name)) only_b.push_back(name);
    }
    if (!only_a.empty() || !only_b.empty()) {
        std::string msg = "tensor name sets differ;";
        for (const auto& n : only_a) msg += " +" + n;
        for (const auto& n : only_b) msg += " -" + n;
        raise(ErrorCode::NameSetMismatch, msg);
    }
    for (const auto& [name, info] : a) {
        if (!(info == b.at(name))) raise(ErrorCode::ShapeMismatch, "tensor '" + name + "' differs in dtype or shape");
    }
}

void subtract_into(std::span<const float> a, std::span<const float> b, std::span<float> out, bool allow_nonfinite,
                   const std::string& name) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a[i] - b[i];
        check_result(out[i], allow_nonfinite, name);
    }
}

void add_into(std::span<const float> m, std::span<const float> t, std::span<float> out, bool allow_nonfinite,
              const std::string& name) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = m[i] + t[i];
        check_result(out[i], allow_nonfinite, name);
    }
}

std::string fingerprint(const TensorArchive& archive) {
    const auto bytes = archive.serialize();
    const auto* tail = bytes.data() + bytes.size() - 4;
    const std::uint32_t crc = static_cast<std::uint32_t>(tail[0]) | static_cast<std::uint32_t>(tail[1]) << 8 |
                              static_cast<std::uint32_t>(tail[2]) << 16 | static_cast<std::uint32_t>(tail[3]) << 24;
    return crc_label(crc);
}

TensorArchive tensor_diff(const TensorArchive& a, const TensorArchive& b) {
    a.validate();
    b.validate();
    check_compatible(layout_of(a), layout_of(b));
    const bool nonfinite = allows_nonfinite(a.metadata) || allows_nonfinite(b.metadata);
    TensorArchive out;
    out.metadata = diff_metadata(fingerprint(a), fingerprint(b), nonfinite);
    for (const auto& [name, ta] : a.tensors) {
        Tensor t{ta.info, std::vector<float>(ta.data.size())};
        subtract_into(ta.data, b.tensors.at(name).data, t.data, nonfinite, name);
        out.tensors.emplace(name, std::move(t));
    }
    return out;
}

TensorArchive tensor_add(const TensorArchive& m, const TensorArchive& t) {
    m.validate();
    t.validate();
    check_compatible(layout_of(m), layout_of(t));
    const bool nonfinite = allows_nonfinite(m.metadata) || allows_nonfinite(t.metadata);
    TensorArchive out;
    out.metadata = add_metadata(fingerprint(m), fingerprint(t), t.metadata, nonfinite);
    for (const auto& [name, tm] : m.tensors) {
        Tensor r{tm.info, std::vector<float>(tm.data.size())};
        add_into(tm.data, t.tensors.at(name).data, r.data, nonfinite, name);
        out.tensors.emplace(name, std::move(r));
    }
    return out;
}

MergeReport merge_archives(const std::filesystem::path& base, const std::filesystem::path& plus,
                           const std::filesystem::path& minus, const std::filesystem::path& out, bool dry_run) {
    ArchiveReader f(base);
    ArchiveReader g(plus);
    ArchiveReader q(minus);
    check_compatible(g.tensors(), q.tensors());
    check_compatible(f.tensors(), g.tensors());
    const bool tau_nonfinite = allows_nonfinite(g.metadata()) || allows_nonfinite(q.metadata());
    const bool nonfinite = tau_nonfinite || allows_nonfinite(f.metadata());

    const auto tau_meta = diff_metadata(crc_label(g.checksum()), crc_label(q.checksum()), tau_nonfinite);
    std::optional<ArchiveWriter> writer;
    if (!dry_run) {
        // The task vector is never materialized, so its label is its inputs.
        writer.emplace(out, f.tensors(),
                       add_metadata(crc_label(f.checksum()),
                                    "diff(" + crc_label(g.checksum()) + "," + crc_label(q.checksum()) + ")", tau_meta,
                                    nonfinite));
    }

    MergeReport report;
    for (const auto& [name, info] : f.tensors()) {
        // In place: at most two tensors are alive at any point.
        auto tau = g.read(name);
        subtract_into(tau, q.read(name), tau, tau_nonfinite, name);
        double sq = 0.0;
        for (float v : tau) sq += static_cast<double>(v) * v;
        report.task_vector_norms.push_back({name, std::sqrt(sq)});
        if (writer) {
            auto merged = f.read(name);
            add_into(merged, tau, merged, nonfinite, name);
            writer->write(name, merged);
        }
    }
    if (writer) {
        writer->finish();
        report.written = true;
    }
    return report;
}

}  // namespace vidsearch::mergevec
