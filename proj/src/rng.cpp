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

#include "mfbe/rng.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <cstring>
#include <stdexcept>

namespace mfbe {

struct Rng::Impl {
    bool seeded = false;
    std::array<uint8_t, 32> key{};  // ChaCha20 key when seeded
    EVP_CIPHER_CTX* ctx = nullptr;

    ~Impl() {
        if (ctx != nullptr) EVP_CIPHER_CTX_free(ctx);
        secure_wipe(key.data(), key.size());
    }

    void init_stream() {
        ctx = EVP_CIPHER_CTX_new();
        // 16-byte OpenSSL ChaCha20 IV = 64-bit counter || 64-bit nonce, all zero.
        std::array<uint8_t, 16> iv{};
        if (ctx == nullptr ||
            EVP_EncryptInit_ex(ctx, EVP_chacha20(), nullptr, key.data(), iv.data()) != 1) {
            throw std::runtime_error("rng: ChaCha20 stream init failed");
        }
    }

    void generate(uint8_t* out, size_t len) {
        if (!seeded) {
            if (RAND_bytes(out, static_cast<int>(len)) != 1) {
                throw std::runtime_error("rng: system randomness source failed");
            }
            return;
        }
        std::memset(out, 0, len);
        int outl = 0;
        if (EVP_EncryptUpdate(ctx, out, &outl, out, static_cast<int>(len)) != 1 ||
            outl != static_cast<int>(len)) {
            throw std::runtime_error("rng: keystream generation failed");
        }
    }
};

Rng::Rng() : impl_(std::make_unique<Impl>()) {}
Rng::Rng(Rng&&) noexcept = default;
Rng& Rng::operator=(Rng&&) noexcept = default;
Rng::~Rng() = default;

Rng Rng::system() {
    Rng r;
    r.impl_->seeded = false;
    return r;
}

Rng::Rng(ByteSpan seed) : Rng() {
    impl_->seeded = true;
    SHA256(seed.data(), seed.size(), impl_->key.data());
    impl_->init_stream();
}

Rng::Rng(uint64_t seed) : Rng() {
    Bytes s;
    put_u64le(s, seed);
    impl_->seeded = true;
    SHA256(s.data(), s.size(), impl_->key.data());
    impl_->init_stream();
}

void Rng::fill(uint8_t* data, size_t len) {
    impl_->generate(data, len);
}

Bytes Rng::bytes(size_t len) {
    Bytes out(len);
    if (len > 0) impl_->generate(out.data(), len);
    return out;
}

uint64_t Rng::next_u64() {
    uint8_t buf[8];
    impl_->generate(buf, sizeof buf);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
    return v;
}

uint64_t Rng::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("rng: bound must be positive");
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

bool Rng::coin() {
    uint8_t b;
    impl_->generate(&b, 1);
    return (b & 1) != 0;
}

Rng Rng::derive(const std::string& label) const {
    if (!impl_->seeded) return Rng::system();
    Bytes material(impl_->key.begin(), impl_->key.end());
    material.insert(material.end(), label.begin(), label.end());
    return Rng(ByteSpan{material.data(), material.size()});
}

bool Rng::is_seeded() const {
    return impl_->seeded;
}

}  // namespace mfbe
