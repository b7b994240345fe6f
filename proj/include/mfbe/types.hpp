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
#include <stdexcept>
#include <string>
#include <vector>

#include "mfbe/bytes.hpp"
#include "mfbe/rng.hpp"

namespace mfbe {

// Shared domain vocabulary: keys, policies, nodes and tokens. Everything
// here is an immutable value once constructed and safe to share across
// threads.

enum class Platform : uint8_t {
    Android = 0,
    Ios = 1,
};

// Wire codes for all enums are their underlying values; external formats
// depend on this ordering.
enum class CipherId : uint8_t {
    Aes256Gcm = 0,       // the only authenticated member; expands by 28 bytes
    Aes256Xts = 1,       // length-preserving content cipher
    Aes128CbcEssiv = 2,  // CBC with ESSIV block tweak
    Aes256CtsCbc = 3,    // filename cipher
    Aes128CtsCbc = 4,    // filename cipher
    Adiantum = 5,        // pluggable wide-block slot
};

enum class Usage : uint8_t {
    // Android
    DeviceDataAfterBoot = 0,
    UserDataAfterBoot = 1,
    UserDataAfterAuth = 2,
    // iOS
    FileProtectionNone = 3,
    FileProtectionCompleteUntilFirstUserAuthentication = 4,
    FileProtectionCompleteUnlessOpen = 5,
    FileProtectionComplete = 6,
};

enum class KdfMode : uint8_t {
    V1 = 0,
    V2Default = 1,
    IvInoLblk64 = 2,
    AdiantumDirectKey = 3,  // legal only with the Adiantum content cipher
};

enum class NodeType : uint8_t {
    File = 0,
    Directory = 1,
};

bool is_android_usage(Usage usage);
bool is_ios_usage(Usage usage);
bool usage_matches_platform(Usage usage, Platform platform);

const char* usage_name(Usage usage);
const char* cipher_name(CipherId cipher);
const char* kdf_mode_name(KdfMode mode);

// λ. Only 128- and 256-bit parameters are accepted.
class SecurityParameter {
  public:
    explicit SecurityParameter(int bits);
    int bits() const { return bits_; }
    size_t key_len() const { return static_cast<size_t>(bits_) / 8; }

  private:
    int bits_;
};

// Raw class/wrap key material. Never serialized in plaintext by any
// external interface; wiped on destruction.
class MasterKey {
  public:
    MasterKey() = default;
    explicit MasterKey(Bytes val);
    static MasterKey random(SecurityParameter lambda, Rng& rng);

    ByteSpan val() const { return val_.span(); }
    size_t size() const { return val_.size(); }
    bool empty() const { return val_.empty(); }
    void wipe() { val_.wipe(); }

    bool operator==(const MasterKey& other) const { return val_ == other.val_; }

  private:
    SecureBytes val_;
};

// KGen: λ bits from the given randomness source.
MasterKey kgen(SecurityParameter lambda, Rng& rng);
MasterKey kgen(SecurityParameter lambda);

constexpr size_t kNonceLen = 16;   // per-node meta nonce (128 bits)
using Nonce = std::array<uint8_t, kNonceLen>;

// User-authentication artifact. Android tokens carry an HMAC tag; iOS
// tokens carry the passcode-derived k_master_key. Exactly one of the two is
// present, selected by the platform.
struct AuthToken {
    Platform platform = Platform::Android;
    uint64_t user_id = 0;
    uint64_t challenge = 0;
    uint64_t issued_at = 0;
    std::optional<std::array<uint8_t, 32>> mac;  // Android
    std::optional<SecureBytes> derived_key;      // iOS k_master_key

    bool well_formed() const {
        return platform == Platform::Android ? (mac.has_value() && !derived_key.has_value())
                                             : (derived_key.has_value() && !mac.has_value());
    }
};

// Unbound policy [cipher, wrappingKey, authToken, usage]. The unbound form
// never carries platform cryptographic material, so the wrapping-key slot
// does not exist here; binding produces a BoundPolicy.
struct Policy {
    CipherId cipher = CipherId::Aes256Gcm;
    std::optional<AuthToken> auth_token;
    Usage usage = Usage::DeviceDataAfterBoot;
};

// Policy bound to a platform: carries the TEE ciphertext of the wrap key
// (absent for iOS ClassD). `auth_token` is transient unlock material
// presented at unwrap time; only `auth_token_required` persists in the
// external blob format.
struct BoundPolicy {
    CipherId cipher = CipherId::Aes256Gcm;
    Bytes wrapkey_ct;
    bool auth_token_required = false;
    Usage usage = Usage::DeviceDataAfterBoot;
    Platform platform = Platform::Android;
    std::optional<AuthToken> auth_token;  // not serialized

    // Validates the platform/usage compatibility invariant.
    static BoundPolicy make(CipherId cipher, Bytes wrapkey_ct, bool auth_token_required,
                            Usage usage, Platform platform);
};

// φ plus the layer count of its onion: 1 for Android and iOS ClassD, 2 for
// iOS ClassB-pub, 3 for iOS ClassA/Bpriv/C.
struct WrappedKey {
    Bytes ct;
    int layer_count = 1;
};

// Per-file key produced by the KDF family.
struct DerivedKey {
    KdfMode mode = KdfMode::V2Default;
    SecureBytes val;
};

// Filesystem node, the unit of encryption. `meta` is the write-once
// 128-bit nonce: it is drawn at first encryption and any later overwrite
// attempt is rejected.
class Node {
  public:
    std::string name;
    NodeType type = NodeType::File;
    Bytes content;                      // File only
    std::vector<std::string> children;  // Directory only, ordered names
    uint32_t inode_number = 0;
    uint64_t base_lbn = 0;

    static Node file(std::string name, Bytes content);
    static Node directory(std::string name, std::vector<std::string> children = {});

    const std::optional<Nonce>& meta() const { return meta_; }
    // Throws std::logic_error on a second assignment.
    void set_meta(const Nonce& nonce);

    bool operator==(const Node& other) const;

  private:
    std::optional<Nonce> meta_;
};

}  // namespace mfbe
