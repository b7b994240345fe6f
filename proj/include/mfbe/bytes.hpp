/*
 * Copyright (C) 2026 The MobileFBE Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mfbe {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

std::string to_hex(ByteSpan data);
std::optional<Bytes> from_hex(const std::string& hex);

// Constant-time comparison (CRYPTO_memcmp underneath).
bool ct_equal(ByteSpan a, ByteSpan b);

// Overwrites the buffer with zeros in a way the optimizer cannot elide.
void secure_wipe(uint8_t* data, size_t len);

// Byte vector that wipes its contents on destruction. Used for any buffer
// holding plaintext key material.
class SecureBytes {
  public:
    SecureBytes() = default;
    explicit SecureBytes(Bytes data) : data_(std::move(data)) {}
    SecureBytes(const SecureBytes&) = default;
    SecureBytes(SecureBytes&&) noexcept = default;
    SecureBytes& operator=(const SecureBytes& other);
    SecureBytes& operator=(SecureBytes&& other) noexcept;
    ~SecureBytes() { wipe(); }

    const uint8_t* data() const { return data_.data(); }
    uint8_t* data() { return data_.data(); }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    ByteSpan span() const { return {data_.data(), data_.size()}; }

    // In-place zeroization; the buffer keeps its size so instrumentation
    // hooks can observe the wiped contents before release.
    void wipe();

    bool operator==(const SecureBytes& other) const {
        return size() == other.size() && ct_equal(span(), other.span());
    }

  private:
    Bytes data_;
};

// Little-endian wire helpers. All external formats are pinned LE.
void put_u16le(Bytes& out, uint16_t v);
void put_u32le(Bytes& out, uint32_t v);
void put_u64le(Bytes& out, uint64_t v);

// Cursor-style reader used by the strict format decoders. All reads fail
// (return false / nullopt) instead of throwing: decode input is untrusted.
class ByteReader {
  public:
    explicit ByteReader(ByteSpan data) : data_(data) {}

    bool read_u8(uint8_t& v);
    bool read_u16le(uint16_t& v);
    bool read_u32le(uint32_t& v);
    bool read_u64le(uint64_t& v);
    bool read_bytes(size_t n, Bytes& out);
    template <size_t N>
    bool read_array(std::array<uint8_t, N>& out) {
        if (remaining() < N) return false;
        std::copy_n(data_.begin() + pos_, N, out.begin());
        pos_ += N;
        return true;
    }
    bool expect(ByteSpan literal);
    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

  private:
    ByteSpan data_;
    size_t pos_ = 0;
};

}  // namespace mfbe
