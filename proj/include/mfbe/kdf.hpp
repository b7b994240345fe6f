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

#include "mfbe/types.hpp"

namespace mfbe {

// Per-file key derivation family and per-block IV construction.
// All operations here are pure and deterministic.

// Distinguishes content keys from filename keys; selects the v2 context
// byte and lets Adiantum-mode callers state intent explicitly.
enum class KeyPurpose : uint8_t {
    Content = 0,
    Name = 1,
};

struct KdfConfig {
    std::array<uint8_t, 16> uuid{};  // partition identifier, immutable per store
    uint8_t content_context_byte = 0x01;
    uint8_t name_context_byte = 0x02;

    uint8_t context_byte(KeyPurpose purpose) const {
        return purpose == KeyPurpose::Content ? content_context_byte : name_context_byte;
    }
};

// Derived key length demanded by the target cipher: 64 bytes for XTS,
// 32 for everything else (AES-128 modes consume the leading 16 bytes).
size_t derived_key_len(CipherId target_cipher);

// The KDF family:
//   V1                 AES-128-ECB with the node nonce as the AES key, over
//                      the master key (expanded with xor-counter copies of k
//                      when the target needs more than |k| bytes)
//   V2_DEFAULT         HKDF-SHA512(k, "fscrypt" || cb || n), empty salt
//   IV_INO_LBLK_64     HKDF-SHA512(k, mode-code || uuid)
//   ADIANTUM_DIRECT_KEY the master key itself
// Throws std::invalid_argument for ADIANTUM_DIRECT_KEY with a non-Adiantum
// target cipher.
DerivedKey kdf(const MasterKey& master, const Nonce& nonce, KdfMode mode, const KdfConfig& cfg,
               CipherId target_cipher, KeyPurpose purpose);

struct IvContext {
    NodeType node_type = NodeType::File;
    uint64_t lbn = 0;           // logical block number; forced to 0 for directories
    uint32_t inode_number = 0;  // IV_INO_LBLK_64 only
    Nonce nonce{};              // ADIANTUM_DIRECT_KEY only
    KdfMode mode = KdfMode::V2Default;
    CipherId cipher = CipherId::Aes256Xts;  // the cipher consuming the IV
};

// IV construction. 16 bytes, except 24 under ADIANTUM_DIRECT_KEY
// (lbn || node nonce). Throws std::invalid_argument when lbn needs more
// than 32 bits under IV_INO_LBLK_64 (truncation would alias).
Bytes get_iv(const IvContext& ctx, const DerivedKey& derived_key);

}  // namespace mfbe
