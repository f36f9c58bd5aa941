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

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vidsearch/common/binary_io.hpp"
#include "vidsearch/common/text.hpp"

namespace vidsearch {
namespace {

TEST(Fnv1a64, PublishedVectors) {
    EXPECT_EQ(fnv1a64(std::string_view("")), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64(std::string_view("a")), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64(std::string_view("foobar")), 0x85944171f73967e8ULL);
}

TEST(Crc32c, CheckValue) {
    const std::string text = "123456789";
    EXPECT_EQ(crc32c(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size())), 0xE3069283U);
}

TEST(ByteIo, VarintAndScalarsRoundTrip) {
    std::mt19937_64 rng(7);
    std::vector<std::uint64_t> values = {0, 1, 127, 128, 16383, 16384, ~0ULL};
    for (int i = 0; i < 200; ++i) values.push_back(rng() >> (rng() % 64));
    ByteWriter w;
    for (auto v : values) w.varint(v);
    w.u32(0xDEADBEEF);
    w.f32(-1.5f);
    ByteReader r(w.data());
    for (auto v : values) EXPECT_EQ(r.varint(), v);
    EXPECT_EQ(r.u32(), 0xDEADBEEFU);
    EXPECT_EQ(r.f32(), -1.5f);
    EXPECT_EQ(r.remaining(), 0U);
    EXPECT_THROW(r.u8(), std::out_of_range);
}

TEST(Text, SplitsOnUnicodeWhitespace) {
    const auto tokens = split_whitespace("  a\tb c　d e\n");
    EXPECT_EQ(tokens, (std::vector<std::string>{"a", "b", "c", "d", "e"}));
    EXPECT_TRUE(split_whitespace(" \t\r\n").empty());
    EXPECT_TRUE(is_blank("  "));
}

TEST(Text, LowercasesCommonScripts) {
    EXPECT_EQ(utf8_lower("HeLLo"), "hello");
    EXPECT_EQ(utf8_lower("ÉCOLE Ñandú"), "école ñandú");
    EXPECT_EQ(utf8_lower("ΑΘΗΝΑ МОСКВА"), "αθηνα москва");
    EXPECT_EQ(utf8_lower("日本"), "日本");
}

TEST(Text, Base64RoundTrip) {
    std::mt19937 rng(3);
    for (std::size_t n = 0; n < 40; ++n) {
        std::vector<std::uint8_t> bytes(n);
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
        EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
    }
    EXPECT_EQ(base64_encode(std::vector<std::uint8_t>{'h', 'i'}), "aGk=");
    EXPECT_ERROR_CODE(base64_decode("a$b="), ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace vidsearch
