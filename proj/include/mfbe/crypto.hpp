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
#include <memory>
#include <optional>

#include "mfbe/bytes.hpp"
#include "mfbe/rng.hpp"

namespace mfbe::crypto {

inline constexpr size_t kGcmNonceLen = 12;
inline constexpr size_t kGcmTagLen = 16;
// nonce || body || tag framing adds this many bytes over the plaintext.
inline constexpr size_t kGcmOverhead = kGcmNonceLen + kGcmTagLen;
inline constexpr size_t kAesBlockLen = 16;

// AES-256-GCM, output framed as nonce || body || tag with a fresh random
// nonce drawn from `rng`. `aad` is authenticated but not encrypted.
Bytes gcm_encrypt(ByteSpan key32, ByteSpan plaintext, ByteSpan aad, Rng& rng);

// Returns the plaintext iff the tag verifies over (aad, body); nullopt on
// any tamper or malformed (< nonce+tag) input.
std::optional<Bytes> gcm_decrypt(ByteSpan key32, ByteSpan ciphertext, ByteSpan aad);

// Raw AES-ECB over whole blocks (data length must be a multiple of 16).
// Key length selects AES-128 or AES-256.
Bytes aes_ecb_encrypt(ByteSpan key, ByteSpan data);
Bytes aes_ecb_decrypt(ByteSpan key, ByteSpan data);

// AES-256-XTS over one data unit (length >= 16, ciphertext stealing for
// ragged tails). Requires key halves to differ, per the XTS standard.
Bytes xts_encrypt(ByteSpan key64, ByteSpan iv16, ByteSpan data);
Bytes xts_decrypt(ByteSpan key64, ByteSpan iv16, ByteSpan data);

// CBC with ciphertext stealing, data length >= 16. CS1 leaves aligned
// input identical to plain CBC; CS3 (the kernel cts(cbc) convention)
// unconditionally swaps the last two blocks.
enum class CtsVariant { CS1, CS3 };
Bytes cbc_cts_encrypt(ByteSpan key, ByteSpan iv16, ByteSpan data, CtsVariant variant);
Bytes cbc_cts_decrypt(ByteSpan key, ByteSpan iv16, ByteSpan data, CtsVariant variant);

std::array<uint8_t, 32> sha256(ByteSpan data);
std::array<uint8_t, 32> hmac_sha256(ByteSpan key, ByteSpan msg);
std::array<uint8_t, 64> hmac_sha512(ByteSpan key, ByteSpan msg);

// RFC 5869 HKDF-SHA512 with an empty salt (the fscrypt convention).
Bytes hkdf_sha512(ByteSpan ikm, ByteSpan info, size_t out_len);

// Iterated salted SHA-256, used for passcode digests and file-passphrase
// key derivation in the simulation.
std::array<uint8_t, 32> iterated_sha256(ByteSpan secret, ByteSpan salt, unsigned iterations);

// Pluggable wide-block (tweakable, length-preserving, long-IV) cipher slot.
// The ADIANTUM CipherId dispatches here; no implementation is registered by
// default and selecting ADIANTUM without one fails at configuration time.
class WideBlockCipher {
  public:
    virtual ~WideBlockCipher() = default;
    virtual size_t key_len() const = 0;
    // `iv` may be 16 or 24 bytes; `data` length >= 16; output length == input.
    virtual Bytes encrypt(ByteSpan key, ByteSpan iv, ByteSpan data) const = 0;
    virtual Bytes decrypt(ByteSpan key, ByteSpan iv, ByteSpan data) const = 0;
};

void register_wide_block_cipher(std::shared_ptr<const WideBlockCipher> cipher);
void clear_wide_block_cipher();
std::shared_ptr<const WideBlockCipher> wide_block_cipher();

}  // namespace mfbe::crypto
