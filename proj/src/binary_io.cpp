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

#include "hrs/binary_io.hpp"
#include "hrs/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <zlib.h>

static_assert(std::endian::native == std::endian::little, "on-disk format assumes a little-endian host");

namespace hrs::io
{
    std::uint32_t crc32(std::span<const std::uint8_t> bytes)
    {
        uLong crc = ::crc32(0L, Z_NULL, 0);
        std::size_t off = 0;
        while (off < bytes.size())
        {
            const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
            crc = ::crc32(crc, bytes.data() + off, chunk);
            off += chunk;
        }
        return static_cast<std::uint32_t>(crc);
    }

    namespace
    {
        template <typename T>
        void append_raw(std::vector<std::uint8_t> &out, const T &v)
        {
            const auto *p = reinterpret_cast<const std::uint8_t *>(&v);
            out.insert(out.end(), p, p + sizeof(T));
        }
    }

    void ByteWriter::put_u32(std::uint32_t v) { append_raw(bytes_, v); }
    void ByteWriter::put_u64(std::uint64_t v) { append_raw(bytes_, v); }
    void ByteWriter::put_f64(double v) { append_raw(bytes_, v); }

    void ByteWriter::put_f64(std::span<const double> v)
    {
        const auto *p = reinterpret_cast<const std::uint8_t *>(v.data());
        bytes_.insert(bytes_.end(), p, p + v.size_bytes());
    }

    void ByteWriter::put_complex(std::span<const std::complex<double>> v)
    {
        // std::complex<double> is layout-compatible with double[2]
        const auto *p = reinterpret_cast<const std::uint8_t *>(v.data());
        bytes_.insert(bytes_.end(), p, p + v.size_bytes());
    }

    void ByteWriter::put_bytes(std::span<const std::uint8_t> v) { bytes_.insert(bytes_.end(), v.begin(), v.end()); }

    void ByteReader::need(std::size_t n) const
    {
        if (n > bytes_.size() - pos_)
            throw FormatError("Truncated record: need " + std::to_string(n) + " bytes at offset " +
                              std::to_string(pos_) + ", only " + std::to_string(bytes_.size() - pos_) + " left.");
    }

    std::uint32_t ByteReader::get_u32()
    {
        need(4);
        std::uint32_t v;
        std::memcpy(&v, bytes_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }

    std::uint64_t ByteReader::get_u64()
    {
        need(8);
        std::uint64_t v;
        std::memcpy(&v, bytes_.data() + pos_, 8);
        pos_ += 8;
        return v;
    }

    double ByteReader::get_f64()
    {
        need(8);
        double v;
        std::memcpy(&v, bytes_.data() + pos_, 8);
        pos_ += 8;
        return v;
    }

    void ByteReader::get_f64(std::span<double> out)
    {
        need(out.size_bytes());
        std::memcpy(out.data(), bytes_.data() + pos_, out.size_bytes());
        pos_ += out.size_bytes();
    }

    void ByteReader::get_complex(std::span<std::complex<double>> out)
    {
        need(out.size_bytes());
        std::memcpy(reinterpret_cast<void *>(out.data()), bytes_.data() + pos_, out.size_bytes());
        pos_ += out.size_bytes();
    }

    void ByteReader::seek(std::size_t pos)
    {
        if (pos > bytes_.size())
            throw FormatError("Record offset " + std::to_string(pos) + " beyond payload end.");
        pos_ = pos;
    }

    std::vector<std::uint8_t> encode_envelope(std::string_view magic, const nlohmann::json &header,
                                              std::span<const std::uint8_t> payload)
    {
        if (magic.size() != 8)
            throw std::invalid_argument("Magic must be exactly 8 bytes.");
        const std::string text = header.dump();
        std::vector<std::uint8_t> out;
        out.reserve(8 + 8 + text.size() + payload.size() + 4);
        out.insert(out.end(), magic.begin(), magic.end());
        append_raw(out, static_cast<std::uint64_t>(text.size()));
        out.insert(out.end(), text.begin(), text.end());
        out.insert(out.end(), payload.begin(), payload.end());
        append_raw(out, crc32(out));
        return out;
    }

    Envelope decode_envelope(std::string_view magic, std::span<const std::uint8_t> file_bytes)
    {
        if (file_bytes.size() < 8 + 8 + 4)
            throw FormatError("File too short to hold a header.");
        if (std::memcmp(file_bytes.data(), magic.data(), 8) != 0)
            throw FormatError("Bad magic bytes, expected \"" + std::string(magic) + "\".");

        const std::size_t body = file_bytes.size() - 4;
        std::uint32_t stored;
        std::memcpy(&stored, file_bytes.data() + body, 4);
        if (crc32(file_bytes.first(body)) != stored)
            throw FormatError("CRC32 mismatch, file is corrupted.");

        std::uint64_t header_len;
        std::memcpy(&header_len, file_bytes.data() + 8, 8);
        if (header_len > body - 16)
            throw FormatError("Header length exceeds file size.");

        Envelope env;
        const auto *text = reinterpret_cast<const char *>(file_bytes.data() + 16);
        try
        {
            env.header = nlohmann::json::parse(text, text + header_len);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw FormatError(std::string("Malformed JSON header: ") + e.what());
        }
        env.payload.assign(file_bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len),
                           file_bytes.begin() + static_cast<std::ptrdiff_t>(body));
        return env;
    }

    void write_file(const std::filesystem::path &path, std::span<const std::uint8_t> bytes)
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("Cannot open '" + path.string() + "' for writing.");
        f.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f)
            throw std::runtime_error("Write to '" + path.string() + "' failed.");
    }

    std::vector<std::uint8_t> read_file(const std::filesystem::path &path)
    {
        std::ifstream f(path, std::ios::binary | std::ios::ate);
        if (!f)
            throw FormatError("Cannot open '" + path.string() + "'.");
        const auto size = f.tellg();
        f.seekg(0);
        std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
        f.read(reinterpret_cast<char *>(bytes.data()), size);
        if (!f)
            throw FormatError("Read of '" + path.string() + "' failed.");
        return bytes;
    }
}
