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

#include <utility>

#include "mfbe/tee.hpp"
#include "mfbe/types.hpp"

namespace mfbe {

// Platform key-wrapping strategies. Wrapping always uses AES-256-GCM (the
// deployment-fixed wrap cipher); the outermost encryption layer
// authenticates usage || platform || layer_count as associated data, which
// binds the blob to its policy.

// Deployment-fixed wrap cipher. Policies naming any other cipher are
// rejected at wrap time and unwrap to ⊥.
inline constexpr CipherId kWrapCipher = CipherId::Aes256Gcm;

struct WrapResult {
    WrappedKey key;
    BoundPolicy policy;
};

// Layers of the φ onion implied by a policy: Android 1; iOS ClassD 1,
// ClassB-pub 2, ClassA/Bpriv/C 3.
int expected_layer_count(Platform platform, Usage usage, bool auth_token_required);

// WrapKey, Android: φ = GCM(k under w); the wrap key itself is sealed by
// the TEE into the policy. UserDataAfterAuth requires a token that verifies
// at the TEE's current clock. Returns nullopt when the usage guard fails.
// Throws std::invalid_argument if pol.cipher is not the deployment cipher.
std::optional<WrapResult> wrap_key_android(const MasterKey& k, const MasterKey& w,
                                           const Policy& pol, Tee& tee, Rng& rng);

// UnwrapKey, Android: recovers k iff the usage guard passes (a verified
// token presented in bpol.auth_token for UserDataAfterAuth) and both GCM
// layers authenticate.
std::optional<MasterKey> unwrap_key_android(const WrappedKey& phi, const BoundPolicy& bpol,
                                            const Tee& tee);

// WrapKey, iOS: layered construction selected by class —
//   FileProtectionNone                      φ = TEE(k)                  1 layer
//   CompleteUnlessOpen, token null (B-pub)  φ = TEE(GCM(k, w))          2 layers
//   token-carrying classes (A, B-priv, C)   φ = TEE(GCM(GCM(k, kmk), w)) 3 layers
// Throws std::invalid_argument on inconsistent usage/token combinations
// rather than producing undecryptable blobs.
WrapResult wrap_key_ios(const MasterKey& k, const MasterKey& w, const Policy& pol, Tee& tee,
                        Rng& rng);

// UnwrapKey, iOS: peels layers in reverse. Three-layer keys require the
// passcode-derived key in bpol.auth_token; every layer must authenticate.
std::optional<MasterKey> unwrap_key_ios(const WrappedKey& phi, const BoundPolicy& bpol,
                                        const Tee& tee);

// Platform dispatch helpers.
std::optional<MasterKey> unwrap_key(const WrappedKey& phi, const BoundPolicy& bpol,
                                    const Tee& tee);

// Wrapped-key blob, bit-exact:
//   "MFBE" || 0x01 || platform || usage || cipher || layer_count ||
//   u32le |wrapkey_ct| || wrapkey_ct || u32le |φ| || φ
Bytes encode_blob(const WrappedKey& phi, const BoundPolicy& bpol);

// Strict decode: magic, version, enum ranges, platform/usage compatibility,
// layer-count consistency and exact total length. The transient auth_token
// field of the returned policy is empty.
std::optional<std::pair<WrappedKey, BoundPolicy>> decode_blob(ByteSpan blob);

}  // namespace mfbe
