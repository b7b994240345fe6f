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

#include "mfbe/keyring.hpp"

namespace mfbe {

bool policy_is_encrypt_only(const BoundPolicy& policy) {
    return policy.platform == Platform::Ios &&
           policy.usage == Usage::FileProtectionCompleteUnlessOpen && !policy.auth_token_required;
}

KeyId Keyring::provision_key(MasterKey key, BoundPolicy policy) {
    std::lock_guard lock(mutex_);
    KeyId kid{next_id_++};
    Entry entry;
    entry.encrypt_only = policy_is_encrypt_only(policy);
    entry.key = std::move(key);
    entry.policy = std::move(policy);
    entry.policy.auth_token.reset();  // unlock material is not retained
    table_.emplace(kid.id, std::move(entry));
    return kid;
}

bool Keyring::evict_key(KeyId kid) {
    std::lock_guard lock(mutex_);
    auto it = table_.find(kid.id);
    if (it == table_.end()) return false;
    it->second.key.wipe();
    if (evict_hook_) evict_hook_(it->second.key.val());
    table_.erase(it);
    return true;
}

std::optional<Keyring::Entry> Keyring::lookup(KeyId kid) const {
    std::lock_guard lock(mutex_);
    auto it = table_.find(kid.id);
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

bool Keyring::is_live(KeyId kid) const {
    std::lock_guard lock(mutex_);
    return table_.count(kid.id) != 0;
}

size_t Keyring::size() const {
    std::lock_guard lock(mutex_);
    return table_.size();
}

void Keyring::evict_all() {
    std::lock_guard lock(mutex_);
    for (auto& [id, entry] : table_) {
        entry.key.wipe();
        if (evict_hook_) evict_hook_(entry.key.val());
    }
    table_.clear();
}

void Keyring::set_evict_hook(std::function<void(ByteSpan)> hook) {
    std::lock_guard lock(mutex_);
    evict_hook_ = std::move(hook);
}

std::vector<std::pair<KeyId, Keyring::Entry>> Keyring::snapshot() const {
    std::lock_guard lock(mutex_);
    std::vector<std::pair<KeyId, Entry>> out;
    out.reserve(table_.size());
    for (const auto& [id, entry] : table_) out.emplace_back(KeyId{id}, entry);
    return out;
}

void Keyring::restore_entry(KeyId kid, Entry entry) {
    std::lock_guard lock(mutex_);
    table_[kid.id] = std::move(entry);
    if (kid.id >= next_id_) next_id_ = kid.id + 1;
}

}  // namespace mfbe
