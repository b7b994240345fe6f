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

#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "mfbe/types.hpp"

namespace mfbe {

// Opaque handle to an installed key. Handles are process-local counters:
// unique among live entries and never reused within a ring's lifetime.
struct KeyId {
    uint64_t id = 0;
    auto operator<=>(const KeyId&) const = default;
};

// Handle-based installed-key table (ProvisionKey / EvictKey / lookup).
// Internally synchronized; all operations are atomic and linearizable.
class Keyring {
  public:
    struct Entry {
        MasterKey key;
        BoundPolicy policy;
        // iOS ClassB-pub kids may encrypt but not decrypt while installed.
        bool encrypt_only = false;
    };

    Keyring() = default;
    Keyring(const Keyring&) = delete;
    Keyring& operator=(const Keyring&) = delete;

    // Installs (k, policy) under a fresh handle. Identical keys provisioned
    // twice get distinct kids.
    KeyId provision_key(MasterKey key, BoundPolicy policy);

    // Removes the entry, zeroizing the stored key bytes before release.
    // Returns false on unknown or already-evicted handles.
    bool evict_key(KeyId kid);

    // Copy of the live entry, or nullopt for dead handles.
    std::optional<Entry> lookup(KeyId kid) const;

    bool is_live(KeyId kid) const;
    size_t size() const;
    void evict_all();

    // Test instrumentation: called with the key buffer after zeroization
    // and before the entry is released.
    void set_evict_hook(std::function<void(ByteSpan)> hook);

    // CLI session persistence support. Entries contain plaintext keys; the
    // caller owns sealing them before they leave the process.
    std::vector<std::pair<KeyId, Entry>> snapshot() const;
    void restore_entry(KeyId kid, Entry entry);

  private:
    mutable std::mutex mutex_;
    std::map<uint64_t, Entry> table_;
    uint64_t next_id_ = 1;
    std::function<void(ByteSpan)> evict_hook_;
};

// Whether a policy installs as encrypt-only (iOS ClassB public part).
bool policy_is_encrypt_only(const BoundPolicy& policy);

}  // namespace mfbe
