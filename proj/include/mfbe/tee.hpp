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

#include <cstdint>
#include <map>
#include <optional>

#include "mfbe/rng.hpp"
#include "mfbe/types.hpp"

namespace mfbe {

// User secret (passcode, PIN, biometric template stand-in).
struct Passcode {
    Bytes bytes;

    explicit Passcode(Bytes b) : bytes(std::move(b)) {
        if (bytes.empty()) throw std::invalid_argument("passcode must be non-empty");
    }
    explicit Passcode(const std::string& s) : Passcode(Bytes(s.begin(), s.end())) {}
};

// Simulated secure element. Exclusive holder of the hardware key σ-key;
// provides hardware-bound AES-256-GCM, token generation/verification with a
// rate-limit schedule, and the passcode-derived iOS k_master_key.
//
// σ-key never crosses this boundary: no operation returns it or any
// function of it other than GCM ciphertexts/decryptions and the
// hardware-entangled passcode KDF output.
//
// Operations execute one at a time against a single logical owner; callers
// in threaded hosts must serialize access themselves.
class Tee {
  public:
    // Fresh σ-key from secure randomness, or deterministically from `seed`
    // for reproducible runs. User tables start empty.
    static Tee init(std::optional<ByteSpan> seed = std::nullopt);

    Tee(Tee&&) noexcept = default;
    Tee& operator=(Tee&&) noexcept = default;
    Tee(const Tee&) = delete;
    Tee& operator=(const Tee&) = delete;

    // Hardware-bound encryption: AES-256-GCM under σ-key, fresh random
    // 12-byte nonce, output nonce || body || tag.
    Bytes tee_encrypt(ByteSpan plaintext, ByteSpan aad = {});
    // Plaintext iff the tag verifies; nullopt on any tamper.
    std::optional<Bytes> tee_decrypt(ByteSpan ciphertext, ByteSpan aad = {}) const;

    // Enrolment: stores a salted passcode digest and a fresh per-user
    // AuthToken HMAC key. Throws on duplicate enrolment.
    void enroll_user(uint64_t user_id, const Passcode& passcode);
    bool is_enrolled(uint64_t user_id) const;

    // Gatekeeper: Android-style token on passcode match, nullopt on
    // mismatch (with the failure counter and delay schedule advanced) or
    // while rate-limited.
    std::optional<AuthToken> generate_token(uint64_t user_id, const Passcode& passcode,
                                            uint64_t now);

    // Keymaster: 1 iff the MAC recomputes and the token is fresh
    // (now - issued_at <= token_window).
    bool verify_token(const AuthToken& token, uint64_t now) const;

    // SEP: k_master_key derived from the passcode via an iterated KDF whose
    // salt entangles σ-key. Same gating and delay schedule as
    // generate_token; deterministic per (passcode, salt).
    std::optional<AuthToken> derive_master_key_ios(uint64_t user_id, const Passcode& passcode,
                                                   uint64_t now);

    // Simulated clock, in ticks. wrap/unwrap guards evaluate tokens at now().
    uint64_t now() const { return clock_; }
    void advance(uint64_t ticks) { clock_ += ticks; }

    uint64_t token_window() const { return token_window_; }
    void set_token_window(uint64_t window) { token_window_ = window; }
    unsigned kdf_iterations() const { return kdf_iterations_; }
    void set_kdf_iterations(unsigned iters);

    unsigned failure_count(uint64_t user_id) const;
    uint64_t next_allowed_at(uint64_t user_id) const;

    // Lockout delay (in ticks) applied after the n-th consecutive failure:
    // zero through the 5th attempt, then 30 doubling per failure, capped at
    // 3600. Monotone in n.
    static uint64_t delay_after_failures(unsigned failures);

    // Opaque state snapshot for the CLI's sealed-state file. Contains key
    // material; callers must encrypt it before it touches disk.
    Bytes serialize_state() const;
    static std::optional<Tee> deserialize_state(ByteSpan state);

  private:
    struct UserRecord {
        SecureBytes hmac_key;             // 32 bytes
        std::array<uint8_t, 16> salt{};   // passcode digest salt
        std::array<uint8_t, 32> digest{}; // salted passcode digest
        unsigned failures = 0;
        uint64_t next_allowed = 0;
    };

    Tee(SecureBytes sigma_key, Rng rng);

    // Shared gate for both token paths: enrolment, rate limit, digest check.
    const UserRecord* check_passcode(uint64_t user_id, const Passcode& passcode, uint64_t now);
    std::array<uint8_t, 32> token_mac(const UserRecord& user, uint64_t user_id,
                                      uint64_t challenge, uint64_t issued_at) const;

    SecureBytes sigma_key_;  // never exported
    mutable Rng rng_;
    std::map<uint64_t, UserRecord> users_;
    uint64_t token_window_ = 600;
    unsigned kdf_iterations_ = 10000;
    uint64_t clock_ = 0;
};

}  // namespace mfbe
