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

#include "mfbe/kdf.hpp"

#include <cstring>

#include "mfbe/crypto.hpp"

namespace mfbe {

size_t derived_key_len(CipherId target_cipher) {
    return target_cipher == CipherId::Aes256Xts ? 64 : 32;
}

namespace {

// v1 expansion: ECB over k || (k ^ 0x01…) || (k ^ 0x02…) …, truncated to
// the target length. The plain |k|-byte prefix is exactly ECB(n, k), which
// keeps the mode's documented master-key-recovery weakness intact.
Bytes v1_derive(const MasterKey& master, const Nonce& nonce, size_t out_len) {
    Bytes input;
    input.reserve((out_len / master.size() + 1) * master.size());
    uint8_t counter = 0;
    while (input.size() < out_len) {
        for (size_t i = 0; i < master.size(); ++i) {
            input.push_back(static_cast<uint8_t>(master.val()[i] ^ counter));
        }
        ++counter;
    }
    input.resize(out_len);
    Bytes out = crypto::aes_ecb_encrypt(ByteSpan{nonce.data(), nonce.size()},
                                        ByteSpan{input.data(), input.size()});
    secure_wipe(input.data(), input.size());
    return out;
}

}  // namespace

DerivedKey kdf(const MasterKey& master, const Nonce& nonce, KdfMode mode, const KdfConfig& cfg,
               CipherId target_cipher, KeyPurpose purpose) {
    if (mode == KdfMode::AdiantumDirectKey && target_cipher != CipherId::Adiantum) {
        throw std::invalid_argument("ADIANTUM_DIRECT_KEY requires the Adiantum cipher");
    }
    const size_t out_len = derived_key_len(target_cipher);

    DerivedKey key;
    key.mode = mode;
    switch (mode) {
        case KdfMode::V1:
            key.val = SecureBytes(v1_derive(master, nonce, out_len));
            break;
        case KdfMode::AdiantumDirectKey:
            key.val = SecureBytes(Bytes(master.val().begin(), master.val().end()));
            break;
        case KdfMode::IvInoLblk64: {
            Bytes info;
            info.push_back(static_cast<uint8_t>(mode));
            info.insert(info.end(), cfg.uuid.begin(), cfg.uuid.end());
            key.val = SecureBytes(
                crypto::hkdf_sha512(master.val(), ByteSpan{info.data(), info.size()}, out_len));
            break;
        }
        case KdfMode::V2Default: {
            static constexpr char kPrefix[] = "fscrypt";
            Bytes info(kPrefix, kPrefix + sizeof(kPrefix) - 1);
            info.push_back(cfg.context_byte(purpose));
            info.insert(info.end(), nonce.begin(), nonce.end());
            key.val = SecureBytes(
                crypto::hkdf_sha512(master.val(), ByteSpan{info.data(), info.size()}, out_len));
            break;
        }
    }
    return key;
}

Bytes get_iv(const IvContext& ctx, const DerivedKey& derived_key) {
    // Directories have no block position; their IVs use lbn = 0.
    const uint64_t lbn = ctx.node_type == NodeType::Directory ? 0 : ctx.lbn;

    if (ctx.cipher == CipherId::Aes128CbcEssiv) {
        // ESSIV: encrypt the block number under a hash of the data key.
        auto iv_key = crypto::sha256(derived_key.val.span());
        Bytes block;
        put_u64le(block, lbn);
        block.resize(16, 0);
        return crypto::aes_ecb_encrypt(ByteSpan{iv_key.data(), iv_key.size()},
                                       ByteSpan{block.data(), block.size()});
    }

    switch (ctx.mode) {
        case KdfMode::IvInoLblk64: {
            if (lbn > UINT32_MAX) {
                throw std::invalid_argument("IV_INO_LBLK_64: lbn does not fit in 32 bits");
            }
            Bytes iv;
            put_u32le(iv, static_cast<uint32_t>(lbn));
            put_u32le(iv, ctx.inode_number);
            iv.resize(16, 0);
            return iv;
        }
        case KdfMode::AdiantumDirectKey: {
            Bytes iv;
            put_u64le(iv, lbn);
            iv.insert(iv.end(), ctx.nonce.begin(), ctx.nonce.end());
            return iv;  // 24 bytes
        }
        default: {
            Bytes iv;
            put_u64le(iv, lbn);
            iv.resize(16, 0);
            return iv;
        }
    }
}

}  // namespace mfbe
