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

#include "mfbe/tee.hpp"

#include <algorithm>

#include "mfbe/crypto.hpp"

namespace mfbe {

Tee::Tee(SecureBytes sigma_key, Rng rng) : sigma_key_(std::move(sigma_key)), rng_(std::move(rng)) {}

Tee Tee::init(std::optional<ByteSpan> seed) {
    Rng rng = seed.has_value() ? Rng(*seed) : Rng::system();
    SecureBytes sigma(rng.bytes(32));
    return Tee(std::move(sigma), std::move(rng));
}

Bytes Tee::tee_encrypt(ByteSpan plaintext, ByteSpan aad) {
    return crypto::gcm_encrypt(sigma_key_.span(), plaintext, aad, rng_);
}

std::optional<Bytes> Tee::tee_decrypt(ByteSpan ciphertext, ByteSpan aad) const {
    return crypto::gcm_decrypt(sigma_key_.span(), ciphertext, aad);
}

void Tee::enroll_user(uint64_t user_id, const Passcode& passcode) {
    if (users_.count(user_id) != 0) {
        throw std::invalid_argument("user already enrolled");
    }
    UserRecord rec;
    rec.hmac_key = SecureBytes(rng_.bytes(32));
    rng_.fill(rec.salt.data(), rec.salt.size());
    rec.digest = crypto::iterated_sha256(ByteSpan{passcode.bytes.data(), passcode.bytes.size()},
                                         ByteSpan{rec.salt.data(), rec.salt.size()}, 1);
    users_.emplace(user_id, std::move(rec));
}

bool Tee::is_enrolled(uint64_t user_id) const {
    return users_.count(user_id) != 0;
}

uint64_t Tee::delay_after_failures(unsigned failures) {
    if (failures < 5) return 0;
    unsigned doublings = std::min(failures - 5, 31u);
    uint64_t delay = 30ull << doublings;
    return std::min<uint64_t>(delay, 3600);
}

const Tee::UserRecord* Tee::check_passcode(uint64_t user_id, const Passcode& passcode,
                                           uint64_t now) {
    auto it = users_.find(user_id);
    if (it == users_.end()) return nullptr;
    UserRecord& rec = it->second;
    if (now < rec.next_allowed) return nullptr;  // rate-limited

    auto digest = crypto::iterated_sha256(ByteSpan{passcode.bytes.data(), passcode.bytes.size()},
                                          ByteSpan{rec.salt.data(), rec.salt.size()}, 1);
    if (!ct_equal(ByteSpan{digest.data(), digest.size()},
                  ByteSpan{rec.digest.data(), rec.digest.size()})) {
        rec.failures += 1;
        rec.next_allowed = now + delay_after_failures(rec.failures);
        return nullptr;
    }
    rec.failures = 0;
    rec.next_allowed = now;
    return &rec;
}

std::array<uint8_t, 32> Tee::token_mac(const UserRecord& user, uint64_t user_id,
                                       uint64_t challenge, uint64_t issued_at) const {
    Bytes msg;
    put_u64le(msg, user_id);
    put_u64le(msg, challenge);
    put_u64le(msg, issued_at);
    return crypto::hmac_sha256(user.hmac_key.span(), ByteSpan{msg.data(), msg.size()});
}

std::optional<AuthToken> Tee::generate_token(uint64_t user_id, const Passcode& passcode,
                                             uint64_t now) {
    const UserRecord* rec = check_passcode(user_id, passcode, now);
    if (rec == nullptr) return std::nullopt;

    AuthToken token;
    token.platform = Platform::Android;
    token.user_id = user_id;
    token.challenge = rng_.next_u64();
    token.issued_at = now;
    token.mac = token_mac(*rec, user_id, token.challenge, token.issued_at);
    return token;
}

bool Tee::verify_token(const AuthToken& token, uint64_t now) const {
    if (token.platform != Platform::Android || !token.mac.has_value()) return false;
    auto it = users_.find(token.user_id);
    if (it == users_.end()) return false;
    if (now < token.issued_at || now - token.issued_at > token_window_) return false;
    auto expected = token_mac(it->second, token.user_id, token.challenge, token.issued_at);
    return ct_equal(ByteSpan{expected.data(), expected.size()},
                    ByteSpan{token.mac->data(), token.mac->size()});
}

std::optional<AuthToken> Tee::derive_master_key_ios(uint64_t user_id, const Passcode& passcode,
                                                    uint64_t now) {
    const UserRecord* rec = check_passcode(user_id, passcode, now);
    if (rec == nullptr) return std::nullopt;

    // Salt entangles the per-user salt with σ-key, so the derived key is
    // useless off-device. The iteration count models the SEP's time delay.
    Bytes salt(rec->salt.begin(), rec->salt.end());
    salt.insert(salt.end(), sigma_key_.span().begin(), sigma_key_.span().end());
    auto derived = crypto::iterated_sha256(ByteSpan{passcode.bytes.data(), passcode.bytes.size()},
                                           ByteSpan{salt.data(), salt.size()}, kdf_iterations_);
    secure_wipe(salt.data(), salt.size());

    AuthToken token;
    token.platform = Platform::Ios;
    token.user_id = user_id;
    token.challenge = rng_.next_u64();
    token.issued_at = now;
    token.derived_key = SecureBytes(Bytes(derived.begin(), derived.end()));
    secure_wipe(derived.data(), derived.size());
    return token;
}

void Tee::set_kdf_iterations(unsigned iters) {
    if (iters == 0) throw std::invalid_argument("kdf iterations must be positive");
    kdf_iterations_ = iters;
}

unsigned Tee::failure_count(uint64_t user_id) const {
    auto it = users_.find(user_id);
    return it == users_.end() ? 0 : it->second.failures;
}

uint64_t Tee::next_allowed_at(uint64_t user_id) const {
    auto it = users_.find(user_id);
    return it == users_.end() ? 0 : it->second.next_allowed;
}

Bytes Tee::serialize_state() const {
    Bytes out;
    out.insert(out.end(), sigma_key_.span().begin(), sigma_key_.span().end());
    put_u64le(out, token_window_);
    put_u32le(out, kdf_iterations_);
    put_u64le(out, clock_);
    put_u32le(out, static_cast<uint32_t>(users_.size()));
    for (const auto& [id, rec] : users_) {
        put_u64le(out, id);
        out.insert(out.end(), rec.hmac_key.span().begin(), rec.hmac_key.span().end());
        out.insert(out.end(), rec.salt.begin(), rec.salt.end());
        out.insert(out.end(), rec.digest.begin(), rec.digest.end());
        put_u32le(out, rec.failures);
        put_u64le(out, rec.next_allowed);
    }
    return out;
}

std::optional<Tee> Tee::deserialize_state(ByteSpan state) {
    ByteReader reader(state);
    Bytes sigma;
    if (!reader.read_bytes(32, sigma)) return std::nullopt;
    Tee tee(SecureBytes(std::move(sigma)), Rng::system());

    uint32_t iters = 0, count = 0;
    if (!reader.read_u64le(tee.token_window_) || !reader.read_u32le(iters) ||
        !reader.read_u64le(tee.clock_) || !reader.read_u32le(count) || iters == 0) {
        return std::nullopt;
    }
    tee.kdf_iterations_ = iters;
    for (uint32_t i = 0; i < count; ++i) {
        uint64_t id = 0;
        UserRecord rec;
        Bytes hmac_key;
        if (!reader.read_u64le(id) || !reader.read_bytes(32, hmac_key) ||
            !reader.read_array(rec.salt) || !reader.read_array(rec.digest) ||
            !reader.read_u32le(rec.failures) || !reader.read_u64le(rec.next_allowed)) {
            return std::nullopt;
        }
        rec.hmac_key = SecureBytes(std::move(hmac_key));
        tee.users_.emplace(id, std::move(rec));
    }
    if (!reader.done()) return std::nullopt;
    return tee;
}

}  // namespace mfbe
