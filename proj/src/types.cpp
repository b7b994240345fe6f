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

#include "mfbe/types.hpp"

namespace mfbe {

bool is_android_usage(Usage usage) {
    switch (usage) {
        case Usage::DeviceDataAfterBoot:
        case Usage::UserDataAfterBoot:
        case Usage::UserDataAfterAuth:
            return true;
        default:
            return false;
    }
}

bool is_ios_usage(Usage usage) {
    return !is_android_usage(usage);
}

bool usage_matches_platform(Usage usage, Platform platform) {
    return platform == Platform::Android ? is_android_usage(usage) : is_ios_usage(usage);
}

const char* usage_name(Usage usage) {
    switch (usage) {
        case Usage::DeviceDataAfterBoot: return "DeviceDataAfterBoot";
        case Usage::UserDataAfterBoot: return "UserDataAfterBoot";
        case Usage::UserDataAfterAuth: return "UserDataAfterAuth";
        case Usage::FileProtectionNone: return "FileProtectionNone";
        case Usage::FileProtectionCompleteUntilFirstUserAuthentication:
            return "FileProtectionCompleteUntilFirstUserAuthentication";
        case Usage::FileProtectionCompleteUnlessOpen: return "FileProtectionCompleteUnlessOpen";
        case Usage::FileProtectionComplete: return "FileProtectionComplete";
    }
    return "?";
}

const char* cipher_name(CipherId cipher) {
    switch (cipher) {
        case CipherId::Aes256Gcm: return "AES-256-GCM";
        case CipherId::Aes256Xts: return "AES-256-XTS";
        case CipherId::Aes128CbcEssiv: return "AES-128-CBC-ESSIV";
        case CipherId::Aes256CtsCbc: return "AES-256-CTS-CBC";
        case CipherId::Aes128CtsCbc: return "AES-128-CTS-CBC";
        case CipherId::Adiantum: return "ADIANTUM";
    }
    return "?";
}

const char* kdf_mode_name(KdfMode mode) {
    switch (mode) {
        case KdfMode::V1: return "v1";
        case KdfMode::V2Default: return "v2";
        case KdfMode::IvInoLblk64: return "iv-ino-lblk-64";
        case KdfMode::AdiantumDirectKey: return "direct-key";
    }
    return "?";
}

SecurityParameter::SecurityParameter(int bits) : bits_(bits) {
    if (bits != 128 && bits != 256) {
        throw std::invalid_argument("security parameter must be 128 or 256 bits");
    }
}

MasterKey::MasterKey(Bytes val) : val_(std::move(val)) {
    if (val_.size() != 16 && val_.size() != 32) {
        throw std::invalid_argument("master key must be 16 or 32 bytes");
    }
}

MasterKey MasterKey::random(SecurityParameter lambda, Rng& rng) {
    return MasterKey(rng.bytes(lambda.key_len()));
}

MasterKey kgen(SecurityParameter lambda, Rng& rng) {
    return MasterKey::random(lambda, rng);
}

MasterKey kgen(SecurityParameter lambda) {
    Rng rng = Rng::system();
    return MasterKey::random(lambda, rng);
}

BoundPolicy BoundPolicy::make(CipherId cipher, Bytes wrapkey_ct, bool auth_token_required,
                              Usage usage, Platform platform) {
    if (!usage_matches_platform(usage, platform)) {
        throw std::invalid_argument(std::string("usage ") + usage_name(usage) +
                                    " is not valid for this platform");
    }
    if (platform == Platform::Ios && usage == Usage::FileProtectionNone && !wrapkey_ct.empty()) {
        throw std::invalid_argument("iOS ClassD policies carry no wrap-key ciphertext");
    }
    BoundPolicy pol;
    pol.cipher = cipher;
    pol.wrapkey_ct = std::move(wrapkey_ct);
    pol.auth_token_required = auth_token_required;
    pol.usage = usage;
    pol.platform = platform;
    return pol;
}

Node Node::file(std::string name, Bytes content) {
    Node n;
    n.name = std::move(name);
    n.type = NodeType::File;
    n.content = std::move(content);
    return n;
}

Node Node::directory(std::string name, std::vector<std::string> children) {
    Node n;
    n.name = std::move(name);
    n.type = NodeType::Directory;
    n.children = std::move(children);
    return n;
}

void Node::set_meta(const Nonce& nonce) {
    if (meta_.has_value()) {
        throw std::logic_error("node meta nonce is write-once");
    }
    meta_ = nonce;
}

bool Node::operator==(const Node& other) const {
    return name == other.name && type == other.type && content == other.content &&
           children == other.children && inode_number == other.inode_number &&
           base_lbn == other.base_lbn && meta_ == other.meta_;
}

}  // namespace mfbe
