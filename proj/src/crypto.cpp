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

#include "mfbe/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace mfbe::crypto {

namespace {

struct CtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CtxPtr new_ctx() {
    CtxPtr ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw std::runtime_error("crypto: EVP_CIPHER_CTX_new failed");
    return ctx;
}

[[noreturn]] void fail(const char* what) {
    throw std::runtime_error(std::string("crypto: ") + what);
}

const EVP_CIPHER* ecb_cipher(size_t key_len) {
    switch (key_len) {
        case 16: return EVP_aes_128_ecb();
        case 32: return EVP_aes_256_ecb();
        default: fail("ECB key must be 16 or 32 bytes");
    }
}

const EVP_CIPHER* cbc_cipher(size_t key_len) {
    switch (key_len) {
        case 16: return EVP_aes_128_cbc();
        case 32: return EVP_aes_256_cbc();
        default: fail("CBC key must be 16 or 32 bytes");
    }
}

Bytes aes_ecb_crypt(ByteSpan key, ByteSpan data, bool encrypt) {
    if (data.size() % kAesBlockLen != 0) fail("ECB data must be whole blocks");
    auto ctx = new_ctx();
    if (EVP_CipherInit_ex(ctx.get(), ecb_cipher(key.size()), nullptr, key.data(), nullptr,
                          encrypt ? 1 : 0) != 1) {
        fail("ECB init failed");
    }
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    Bytes out(data.size());
    int outl = 0;
    if (!data.empty() &&
        EVP_CipherUpdate(ctx.get(), out.data(), &outl, data.data(),
                         static_cast<int>(data.size())) != 1) {
        fail("ECB update failed");
    }
    int fin = 0;
    if (EVP_CipherFinal_ex(ctx.get(), out.data() + outl, &fin) != 1) fail("ECB final failed");
    return out;
}

// Plain CBC over whole blocks, no padding.
Bytes aes_cbc_crypt(ByteSpan key, ByteSpan iv, ByteSpan data, bool encrypt) {
    if (data.size() % kAesBlockLen != 0) fail("CBC data must be whole blocks");
    auto ctx = new_ctx();
    if (EVP_CipherInit_ex(ctx.get(), cbc_cipher(key.size()), nullptr, key.data(), iv.data(),
                          encrypt ? 1 : 0) != 1) {
        fail("CBC init failed");
    }
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    Bytes out(data.size());
    int outl = 0;
    if (!data.empty() &&
        EVP_CipherUpdate(ctx.get(), out.data(), &outl, data.data(),
                         static_cast<int>(data.size())) != 1) {
        fail("CBC update failed");
    }
    int fin = 0;
    if (EVP_CipherFinal_ex(ctx.get(), out.data() + outl, &fin) != 1) fail("CBC final failed");
    return out;
}

}  // namespace

Bytes gcm_encrypt(ByteSpan key32, ByteSpan plaintext, ByteSpan aad, Rng& rng) {
    if (key32.size() != 32) fail("GCM key must be 32 bytes");
    Bytes out(kGcmNonceLen + plaintext.size() + kGcmTagLen);
    rng.fill(out.data(), kGcmNonceLen);

    auto ctx = new_ctx();
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmNonceLen, nullptr) != 1 ||
        EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key32.data(), out.data()) != 1) {
        fail("GCM init failed");
    }
    int outl = 0;
    if (!aad.empty() &&
        EVP_EncryptUpdate(ctx.get(), nullptr, &outl, aad.data(), static_cast<int>(aad.size())) !=
            1) {
        fail("GCM aad failed");
    }
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx.get(), out.data() + kGcmNonceLen, &outl, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1) {
        fail("GCM update failed");
    }
    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + kGcmNonceLen + plaintext.size(), &fin) != 1) {
        fail("GCM final failed");
    }
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagLen,
                            out.data() + kGcmNonceLen + plaintext.size()) != 1) {
        fail("GCM tag fetch failed");
    }
    return out;
}

std::optional<Bytes> gcm_decrypt(ByteSpan key32, ByteSpan ciphertext, ByteSpan aad) {
    if (key32.size() != 32) fail("GCM key must be 32 bytes");
    if (ciphertext.size() < kGcmOverhead) return std::nullopt;
    const uint8_t* nonce = ciphertext.data();
    const uint8_t* body = ciphertext.data() + kGcmNonceLen;
    size_t body_len = ciphertext.size() - kGcmOverhead;
    const uint8_t* tag = ciphertext.data() + kGcmNonceLen + body_len;

    auto ctx = new_ctx();
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmNonceLen, nullptr) != 1 ||
        EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key32.data(), nonce) != 1) {
        fail("GCM init failed");
    }
    int outl = 0;
    if (!aad.empty() &&
        EVP_DecryptUpdate(ctx.get(), nullptr, &outl, aad.data(), static_cast<int>(aad.size())) !=
            1) {
        fail("GCM aad failed");
    }
    Bytes out(body_len);
    if (body_len > 0 && EVP_DecryptUpdate(ctx.get(), out.data(), &outl, body,
                                          static_cast<int>(body_len)) != 1) {
        return std::nullopt;
    }
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagLen,
                            const_cast<uint8_t*>(tag)) != 1) {
        fail("GCM tag set failed");
    }
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + body_len, &fin) != 1) {
        return std::nullopt;  // authentication failure
    }
    return out;
}

Bytes aes_ecb_encrypt(ByteSpan key, ByteSpan data) {
    return aes_ecb_crypt(key, data, true);
}

Bytes aes_ecb_decrypt(ByteSpan key, ByteSpan data) {
    return aes_ecb_crypt(key, data, false);
}

static Bytes xts_crypt(ByteSpan key64, ByteSpan iv16, ByteSpan data, bool encrypt) {
    if (key64.size() != 64) fail("XTS key must be 64 bytes");
    if (iv16.size() != 16) fail("XTS iv must be 16 bytes");
    if (data.size() < 16) fail("XTS data unit must be at least 16 bytes");
    auto ctx = new_ctx();
    if (EVP_CipherInit_ex(ctx.get(), EVP_aes_256_xts(), nullptr, key64.data(), iv16.data(),
                          encrypt ? 1 : 0) != 1) {
        fail("XTS init failed (equal key halves are rejected)");
    }
    Bytes out(data.size());
    int outl = 0;
    if (EVP_CipherUpdate(ctx.get(), out.data(), &outl, data.data(),
                         static_cast<int>(data.size())) != 1) {
        fail("XTS update failed");
    }
    int fin = 0;
    if (EVP_CipherFinal_ex(ctx.get(), out.data() + outl, &fin) != 1) fail("XTS final failed");
    return out;
}

Bytes xts_encrypt(ByteSpan key64, ByteSpan iv16, ByteSpan data) {
    return xts_crypt(key64, iv16, data, true);
}

Bytes xts_decrypt(ByteSpan key64, ByteSpan iv16, ByteSpan data) {
    return xts_crypt(key64, iv16, data, false);
}

Bytes cbc_cts_encrypt(ByteSpan key, ByteSpan iv16, ByteSpan data, CtsVariant variant) {
    const size_t b = kAesBlockLen;
    if (iv16.size() != b) fail("CTS iv must be 16 bytes");
    if (data.size() < b) fail("CTS data must be at least 16 bytes");

    size_t n = (data.size() + b - 1) / b;
    size_t d = data.size() - (n - 1) * b;  // final block size, 1..16

    if (n == 1) return aes_cbc_crypt(key, iv16, data, true);

    if (d == b && variant == CtsVariant::CS1) {
        return aes_cbc_crypt(key, iv16, data, true);  // aligned CS1 is plain CBC
    }

    // CBC over the n-1 full leading blocks, then the stolen final block:
    //   C_n = E(C_{n-1} XOR (P_n || 0…)),  output tail = C_n || head_d(C_{n-1})
    // with the last two blocks in wire order depending on the variant.
    Bytes head = aes_cbc_crypt(key, iv16, data.subspan(0, (n - 1) * b), true);
    const uint8_t* c_prev = head.data() + (n - 2) * b;

    Bytes last(b, 0);
    std::memcpy(last.data(), data.data() + (n - 1) * b, d);
    for (size_t i = 0; i < b; ++i) last[i] ^= c_prev[i];
    Bytes c_n = aes_ecb_encrypt(key, last);

    Bytes out;
    out.reserve(data.size());
    out.insert(out.end(), head.begin(), head.begin() + static_cast<long>((n - 2) * b));
    if (variant == CtsVariant::CS3) {
        out.insert(out.end(), c_n.begin(), c_n.end());
        out.insert(out.end(), c_prev, c_prev + d);
    } else {
        out.insert(out.end(), c_prev, c_prev + d);
        out.insert(out.end(), c_n.begin(), c_n.end());
    }
    return out;
}

Bytes cbc_cts_decrypt(ByteSpan key, ByteSpan iv16, ByteSpan data, CtsVariant variant) {
    const size_t b = kAesBlockLen;
    if (iv16.size() != b) fail("CTS iv must be 16 bytes");
    if (data.size() < b) fail("CTS data must be at least 16 bytes");

    size_t n = (data.size() + b - 1) / b;
    size_t d = data.size() - (n - 1) * b;

    if (n == 1) return aes_cbc_crypt(key, iv16, data, false);

    if (d == b && variant == CtsVariant::CS1) {
        return aes_cbc_crypt(key, iv16, data, false);
    }

    // Recover wire blocks: W is the full stolen block E(C_{n-1} XOR P_n'),
    // T the truncated C_{n-1}.
    Bytes w(b), t(d);
    const uint8_t* prefix_end = data.data() + (n - 2) * b;
    if (variant == CtsVariant::CS3) {
        std::memcpy(w.data(), prefix_end, b);
        std::memcpy(t.data(), prefix_end + b, d);
    } else {
        std::memcpy(t.data(), prefix_end, d);
        std::memcpy(w.data(), prefix_end + d, b);
    }

    Bytes x = aes_ecb_decrypt(key, w);  // == C_{n-1} XOR (P_n || 0…)
    Bytes c_prev(b);
    std::memcpy(c_prev.data(), t.data(), d);
    std::memcpy(c_prev.data() + d, x.data() + d, b - d);

    Bytes p_last(d);
    for (size_t i = 0; i < d; ++i) p_last[i] = x[i] ^ c_prev[i];

    Bytes cbc_in;
    cbc_in.reserve((n - 1) * b);
    cbc_in.insert(cbc_in.end(), data.begin(), data.begin() + static_cast<long>((n - 2) * b));
    cbc_in.insert(cbc_in.end(), c_prev.begin(), c_prev.end());
    Bytes out = aes_cbc_crypt(key, iv16, cbc_in, false);
    out.insert(out.end(), p_last.begin(), p_last.end());
    return out;
}

std::array<uint8_t, 32> sha256(ByteSpan data) {
    std::array<uint8_t, 32> out;
    SHA256(data.data(), data.size(), out.data());
    return out;
}

std::array<uint8_t, 32> hmac_sha256(ByteSpan key, ByteSpan msg) {
    std::array<uint8_t, 32> out;
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(),
             out.data(), &len) == nullptr ||
        len != out.size()) {
        fail("HMAC-SHA256 failed");
    }
    return out;
}

std::array<uint8_t, 64> hmac_sha512(ByteSpan key, ByteSpan msg) {
    std::array<uint8_t, 64> out;
    unsigned int len = 0;
    if (HMAC(EVP_sha512(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(),
             out.data(), &len) == nullptr ||
        len != out.size()) {
        fail("HMAC-SHA512 failed");
    }
    return out;
}

Bytes hkdf_sha512(ByteSpan ikm, ByteSpan info, size_t out_len) {
    if (out_len == 0 || out_len > 255 * 64) fail("HKDF output length out of range");
    // Extract with an empty salt (HMAC zero-pads the key, so this equals the
    // RFC 5869 default of HashLen zero bytes).
    auto prk = hmac_sha512(ByteSpan{}, ikm);

    Bytes out;
    out.reserve(out_len);
    Bytes block;
    uint8_t counter = 1;
    while (out.size() < out_len) {
        Bytes msg(block);
        msg.insert(msg.end(), info.begin(), info.end());
        msg.push_back(counter++);
        auto t = hmac_sha512(ByteSpan{prk.data(), prk.size()}, ByteSpan{msg.data(), msg.size()});
        block.assign(t.begin(), t.end());
        out.insert(out.end(), block.begin(),
                   block.begin() + static_cast<long>(std::min(block.size(), out_len - out.size())));
    }
    secure_wipe(prk.data(), prk.size());
    return out;
}

std::array<uint8_t, 32> iterated_sha256(ByteSpan secret, ByteSpan salt, unsigned iterations) {
    if (iterations == 0) fail("iterated_sha256 needs at least one iteration");
    Bytes buf(secret.begin(), secret.end());
    buf.insert(buf.end(), salt.begin(), salt.end());
    auto digest = sha256(ByteSpan{buf.data(), buf.size()});
    secure_wipe(buf.data(), buf.size());
    for (unsigned i = 1; i < iterations; ++i) {
        Bytes round(digest.begin(), digest.end());
        round.insert(round.end(), salt.begin(), salt.end());
        digest = sha256(ByteSpan{round.data(), round.size()});
    }
    return digest;
}

namespace {
std::mutex g_wide_mutex;
std::shared_ptr<const WideBlockCipher> g_wide_cipher;
}  // namespace

void register_wide_block_cipher(std::shared_ptr<const WideBlockCipher> cipher) {
    std::lock_guard lock(g_wide_mutex);
    g_wide_cipher = std::move(cipher);
}

void clear_wide_block_cipher() {
    std::lock_guard lock(g_wide_mutex);
    g_wide_cipher.reset();
}

std::shared_ptr<const WideBlockCipher> wide_block_cipher() {
    std::lock_guard lock(g_wide_mutex);
    return g_wide_cipher;
}

}  // namespace mfbe::crypto
