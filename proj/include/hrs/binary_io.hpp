// SPDX-License-Identifier: Apache-2.0
//
// hrs-cluster: user clustering for hierarchical rate splitting
// Copyright (C) 2026 The hrs-cluster authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Shared on-disk envelope for dataset and model files:
//
//   [8-byte magic][u64 LE header length][JSON header][payload][u32 LE CRC32]
//
// The CRC covers every byte before it. Payload doubles are little-endian IEEE-754.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hrs::io
{
    std::uint32_t crc32(std::span<const std::uint8_t> bytes);

    class ByteWriter
    {
    public:
        void put_u32(std::uint32_t v);
        void put_u64(std::uint64_t v);
        void put_f64(double v);
        void put_f64(std::span<const double> v);
        void put_complex(std::span<const std::complex<double>> v); // interleaved (re, im)
        void put_bytes(std::span<const std::uint8_t> v);

        std::size_t size() const { return bytes_.size(); }
        const std::vector<std::uint8_t> &bytes() const { return bytes_; }
        std::vector<std::uint8_t> take() { return std::move(bytes_); }

    private:
        std::vector<std::uint8_t> bytes_;
    };

    class ByteReader
    {
    public:
        explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

        std::uint32_t get_u32();
        std::uint64_t get_u64();
        double get_f64();
        void get_f64(std::span<double> out);
        void get_complex(std::span<std::complex<double>> out);

        void seek(std::size_t pos);
        std::size_t position() const { return pos_; }
        std::size_t remaining() const { return bytes_.size() - pos_; }

    private:
        void need(std::size_t n) const;
        std::span<const std::uint8_t> bytes_;
        std::size_t pos_ = 0;
    };

    struct Envelope
    {
        nlohmann::json header;
        std::vector<std::uint8_t> payload;
    };

    std::vector<std::uint8_t> encode_envelope(std::string_view magic, const nlohmann::json &header,
                                              std::span<const std::uint8_t> payload);

    // Throws FormatError on bad magic, truncation or CRC mismatch.
    Envelope decode_envelope(std::string_view magic, std::span<const std::uint8_t> file_bytes);

    void write_file(const std::filesystem::path &path, std::span<const std::uint8_t> bytes);
    std::vector<std::uint8_t> read_file(const std::filesystem::path &path);
}
