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

#include "mfbe/keywrap.hpp"

#include "mfbe/crypto.hpp"

namespace mfbe {

namespace {

constexpr uint8_t kBlobMagic[4] = {'M', 'F', 'B', 'E'};
constexpr uint8_t kBlobVersion = 0x01;

// Associated data authenticated by the outermost encryption layer.
Bytes outer_ad(Usage usage, Platform platform, int layer_count) {
    return Bytes{static_cast<uint8_t>(usage), static_cast<uint8_t>(platform),
                 static_cast<uint8_t>(layer_count)};
}

std::optional<MasterKey> try_master_key(Bytes bytes) {
    if (bytes.size() != 16 && bytes.size() != 32) {
        secure_wipe(bytes.data(), bytes.size());
        return std::nullopt;
    }
    return MasterKey(std::move(bytes));
}

bool android_guard(Usage usage, const std::optional<AuthToken>& token, const Tee& tee) {
    switch (usage) {
        case Usage::DeviceDataAfterBoot:
        case Usage::UserDataAfterBoot:
            return true;
        case Usage::UserDataAfterAuth:
            // The token is not a decryption input, but the TEE refuses to
            // touch the CE key until one verifies.
            return token.has_value() && tee.verify_token(*token, tee.now());
        default:
            return false;
    }
}

void require_wrap_cipher(CipherId cipher) {
    if (cipher != kWrapCipher) {
        throw std::invalid_argument(std::string("wrap cipher is fixed to ") +
                                    cipher_name(kWrapCipher) + " for this deployment");
    }
}

}  // namespace

int expected_layer_count(Platform platform, Usage usage, bool auth_token_required) {
    if (platform == Platform::Android) return 1;
    switch (usage) {
        case Usage::FileProtectionNone:
            return 1;
        case Usage::FileProtectionCompleteUnlessOpen:
            return auth_token_required ? 3 : 2;
        default:
            return 3;
    }
}

std::optional<WrapResult> wrap_key_android(const MasterKey& k, const MasterKey& w,
                                           const Policy& pol, Tee& tee, Rng& rng) {
    require_wrap_cipher(pol.cipher);
    if (!android_guard(pol.usage, pol.auth_token, tee)) return std::nullopt;

    WrapResult res;
    res.key.layer_count = 1;
    res.key.ct = crypto::gcm_encrypt(w.val(), k.val(),
                                     ByteSpan(outer_ad(pol.usage, Platform::Android, 1)), rng);
    res.policy = BoundPolicy::make(pol.cipher, tee.tee_encrypt(w.val()),
                                   pol.usage == Usage::UserDataAfterAuth, pol.usage,
                                   Platform::Android);
    return res;
}

std::optional<MasterKey> unwrap_key_android(const WrappedKey& phi, const BoundPolicy& bpol,
                                            const Tee& tee) {
    if (bpol.platform != Platform::Android || bpol.cipher != kWrapCipher) return std::nullopt;
    if (phi.layer_count != 1) return std::nullopt;
    if (!android_guard(bpol.usage, bpol.auth_token, tee)) return std::nullopt;

    auto w = tee.tee_decrypt(bpol.wrapkey_ct);
    if (!w) return std::nullopt;
    auto k = crypto::gcm_decrypt(ByteSpan(*w), phi.ct,
                                 ByteSpan(outer_ad(bpol.usage, Platform::Android, 1)));
    secure_wipe(w->data(), w->size());
    if (!k) return std::nullopt;
    return try_master_key(std::move(*k));
}

WrapResult wrap_key_ios(const MasterKey& k, const MasterKey& w, const Policy& pol, Tee& tee,
                        Rng& rng) {
    require_wrap_cipher(pol.cipher);
    if (!is_ios_usage(pol.usage)) {
        throw std::invalid_argument("wrap_key_ios requires an iOS usage");
    }
    const bool has_token = pol.auth_token.has_value();
    if (has_token && (!pol.auth_token->well_formed() || pol.auth_token->platform != Platform::Ios)) {
        throw std::invalid_argument("iOS wrapping requires a k_master_key token");
    }
    if (pol.usage == Usage::FileProtectionNone && has_token) {
        throw std::invalid_argument("FileProtectionNone takes no auth token");
    }
    if ((pol.usage == Usage::FileProtectionComplete ||
         pol.usage == Usage::FileProtectionCompleteUntilFirstUserAuthentication) &&
        !has_token) {
        throw std::invalid_argument(std::string(usage_name(pol.usage)) +
                                    " requires an auth token");
    }

    const int layers = expected_layer_count(Platform::Ios, pol.usage, has_token);
    if (layers >= 2 && w.empty()) {
        throw std::invalid_argument("this iOS class requires a wrap key");
    }

    Bytes inner;
    switch (layers) {
        case 1:
            inner.assign(k.val().begin(), k.val().end());
            break;
        case 2:
            inner = crypto::gcm_encrypt(w.val(), k.val(), {}, rng);
            break;
        default: {
            Bytes under_user =
                crypto::gcm_encrypt(pol.auth_token->derived_key->span(), k.val(), {}, rng);
            inner = crypto::gcm_encrypt(w.val(), ByteSpan(under_user), {}, rng);
            secure_wipe(under_user.data(), under_user.size());
            break;
        }
    }

    WrapResult res;
    res.key.layer_count = layers;
    res.key.ct = tee.tee_encrypt(ByteSpan(inner), ByteSpan(outer_ad(pol.usage, Platform::Ios, layers)));
    secure_wipe(inner.data(), inner.size());
    res.policy = BoundPolicy::make(pol.cipher,
                                   layers == 1 ? Bytes{} : tee.tee_encrypt(w.val()),
                                   layers == 3, pol.usage, Platform::Ios);
    return res;
}

std::optional<MasterKey> unwrap_key_ios(const WrappedKey& phi, const BoundPolicy& bpol,
                                        const Tee& tee) {
    if (bpol.platform != Platform::Ios || bpol.cipher != kWrapCipher) return std::nullopt;
    if (!is_ios_usage(bpol.usage)) return std::nullopt;
    if (phi.layer_count !=
        expected_layer_count(Platform::Ios, bpol.usage, bpol.auth_token_required)) {
        return std::nullopt;
    }

    // Remove the hardware layer.
    auto peeled = tee.tee_decrypt(phi.ct,
                                  ByteSpan(outer_ad(bpol.usage, Platform::Ios, phi.layer_count)));
    if (!peeled) return std::nullopt;
    if (bpol.usage == Usage::FileProtectionNone) {
        return try_master_key(std::move(*peeled));
    }

    auto w = tee.tee_decrypt(bpol.wrapkey_ct);
    if (!w) return std::nullopt;
    auto under_wrap = crypto::gcm_decrypt(ByteSpan(*w), ByteSpan(*peeled), {});
    secure_wipe(w->data(), w->size());
    secure_wipe(peeled->data(), peeled->size());
    if (!under_wrap) return std::nullopt;

    if (!bpol.auth_token_required) {
        return try_master_key(std::move(*under_wrap));
    }
    if (!bpol.auth_token.has_value() || !bpol.auth_token->derived_key.has_value()) {
        return std::nullopt;
    }
    auto k = crypto::gcm_decrypt(bpol.auth_token->derived_key->span(), ByteSpan(*under_wrap), {});
    secure_wipe(under_wrap->data(), under_wrap->size());
    if (!k) return std::nullopt;
    return try_master_key(std::move(*k));
}

std::optional<MasterKey> unwrap_key(const WrappedKey& phi, const BoundPolicy& bpol,
                                    const Tee& tee) {
    return bpol.platform == Platform::Android ? unwrap_key_android(phi, bpol, tee)
                                              : unwrap_key_ios(phi, bpol, tee);
}

Bytes encode_blob(const WrappedKey& phi, const BoundPolicy& bpol) {
    Bytes out(kBlobMagic, kBlobMagic + sizeof(kBlobMagic));
    out.push_back(kBlobVersion);
    out.push_back(static_cast<uint8_t>(bpol.platform));
    out.push_back(static_cast<uint8_t>(bpol.usage));
    out.push_back(static_cast<uint8_t>(bpol.cipher));
    out.push_back(static_cast<uint8_t>(phi.layer_count));
    put_u32le(out, static_cast<uint32_t>(bpol.wrapkey_ct.size()));
    out.insert(out.end(), bpol.wrapkey_ct.begin(), bpol.wrapkey_ct.end());
    put_u32le(out, static_cast<uint32_t>(phi.ct.size()));
    out.insert(out.end(), phi.ct.begin(), phi.ct.end());
    return out;
}

std::optional<std::pair<WrappedKey, BoundPolicy>> decode_blob(ByteSpan blob) {
    ByteReader reader(blob);
    if (!reader.expect(ByteSpan{kBlobMagic, sizeof(kBlobMagic)})) return std::nullopt;

    uint8_t version = 0, platform_code = 0, usage_code = 0, cipher_code = 0, layers = 0;
    if (!reader.read_u8(version) || version != kBlobVersion) return std::nullopt;
    if (!reader.read_u8(platform_code) || platform_code > 1) return std::nullopt;
    if (!reader.read_u8(usage_code) ||
        usage_code > static_cast<uint8_t>(Usage::FileProtectionComplete)) {
        return std::nullopt;
    }
    if (!reader.read_u8(cipher_code) || cipher_code > static_cast<uint8_t>(CipherId::Adiantum)) {
        return std::nullopt;
    }
    if (!reader.read_u8(layers) || layers < 1 || layers > 3) return std::nullopt;

    const auto platform = static_cast<Platform>(platform_code);
    const auto usage = static_cast<Usage>(usage_code);
    if (!usage_matches_platform(usage, platform)) return std::nullopt;

    // Layer-count consistency with the class table.
    bool auth_required;
    if (platform == Platform::Android) {
        if (layers != 1) return std::nullopt;
        auth_required = usage == Usage::UserDataAfterAuth;
    } else {
        switch (usage) {
            case Usage::FileProtectionNone:
                if (layers != 1) return std::nullopt;
                break;
            case Usage::FileProtectionCompleteUnlessOpen:
                if (layers != 2 && layers != 3) return std::nullopt;
                break;
            default:
                if (layers != 3) return std::nullopt;
        }
        auth_required = layers == 3;
    }

    uint32_t wrapkey_len = 0;
    Bytes wrapkey_ct;
    if (!reader.read_u32le(wrapkey_len) || !reader.read_bytes(wrapkey_len, wrapkey_ct)) {
        return std::nullopt;
    }
    if (platform == Platform::Ios && usage == Usage::FileProtectionNone && wrapkey_len != 0) {
        return std::nullopt;
    }
    uint32_t phi_len = 0;
    Bytes phi_ct;
    if (!reader.read_u32le(phi_len) || !reader.read_bytes(phi_len, phi_ct)) return std::nullopt;
    if (!reader.done()) return std::nullopt;

    WrappedKey phi;
    phi.ct = std::move(phi_ct);
    phi.layer_count = layers;
    BoundPolicy pol;
    try {
        pol = BoundPolicy::make(static_cast<CipherId>(cipher_code), std::move(wrapkey_ct),
                                auth_required, usage, platform);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
    return std::make_pair(std::move(phi), std::move(pol));
}

}  // namespace mfbe
