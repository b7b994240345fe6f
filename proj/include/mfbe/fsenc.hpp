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

#include <map>
#include <variant>

#include "mfbe/kdf.hpp"
#include "mfbe/keyring.hpp"
#include "mfbe/types.hpp"

namespace mfbe {

// Node-tree encryption: per-node nonce management, per-block content
// cipher, and deterministic child-name encryption.

inline constexpr size_t kContentBlockLen = 4096;
// Length-preserving ciphers need at least one AES block per unit; shorter
// tails steal from the previous block, and files shorter than this are
// padded with the true length recorded alongside.
inline constexpr size_t kMinCipherUnit = 16;
inline constexpr size_t kMaxNameLen = 255;

// Validated (mode, content cipher) selection for one node store.
struct FsConfig {
    KdfMode mode = KdfMode::V2Default;
    CipherId content_cipher = CipherId::Aes256Xts;
    KdfConfig kdf;

    // Checks the §6 pairing rules: content cipher must be XTS, CBC-ESSIV or
    // Adiantum; ADIANTUM_DIRECT_KEY requires the Adiantum cipher; selecting
    // Adiantum without a registered wide-block implementation fails here,
    // at configuration time, not at encrypt time.
    static FsConfig make(KdfMode mode, CipherId content_cipher,
                         const std::array<uint8_t, 16>& uuid);

    // XTS/CBC content pairs with the matching CTS-CBC filename cipher;
    // Adiantum pairs with itself.
    CipherId name_cipher() const;
};

struct EncryptedNode {
    Nonce meta{};
    NodeType type = NodeType::File;
    Bytes enc_content;                // File only
    std::vector<Bytes> enc_children;  // Directory only
    uint32_t inode_number = 0;
    uint64_t base_lbn = 0;
    uint64_t content_len = 0;  // true plaintext length (sub-block padding)

    bool operator==(const EncryptedNode&) const = default;
};

// Encrypt one node under the installed key `kid`. Draws and persists the
// node's meta nonce on first encryption (write-once thereafter). Returns
// nullopt on a dead kid.
std::optional<EncryptedNode> encrypt_node(Node& fnode, KeyId kid, const Keyring& ring,
                                          const FsConfig& cfg, Rng& rng);

// Inverse of encrypt_node: re-derives the per-node key from enode.meta.
// Returns nullopt on dead or encrypt-only kids and on malformed child
// names. Content ciphers are unauthenticated: a wrong key yields garbage
// content, not nullopt. The returned node's name is empty — names live in
// the parent's children list.
std::optional<Node> decrypt_node(const EncryptedNode& enode, KeyId kid, const Keyring& ring,
                                 const FsConfig& cfg);

// Per-block content encryption: content is split into 4096-byte blocks
// with consecutive lbns from ctx_template.lbn; each unit is encrypted with
// its positional IV. Length-preserving for inputs >= 16 bytes; shorter
// inputs are zero-padded to 16 (the caller records the true length).
Bytes enc_fs_ciph(ByteSpan content, const DerivedKey& key, const IvContext& ctx_template);

// Exact inverse; `true_len` disambiguates the padded sub-16-byte case.
Bytes dec_fs_ciph(ByteSpan econtent, const DerivedKey& key, const IvContext& ctx_template,
                  uint64_t true_len);

// Deterministic (per key and IV) filename encryption. The name is wrapped
// as len-byte || name || zero padding to a 16-byte multiple, then encrypted
// with CTS-CBC (or the Adiantum slot) under the directory-mode IV.
// Throws std::invalid_argument on empty or oversize names.
Bytes encrypt_name(const std::string& name, const DerivedKey& key, const IvContext& ctx);

// Inverse; nullopt when the decryption does not parse as a padded name.
std::optional<std::string> decrypt_name(ByteSpan enc_name, const DerivedKey& key,
                                        const IvContext& ctx);

// Tree-shaped container of nodes keyed by inode. Inodes are assigned
// sequentially from 1; base lbns contiguously, in creation order. Holds
// plaintext or encrypted nodes (mixed only transiently during whole-tree
// walks).
class NodeStore {
  public:
    using StoredNode = std::variant<Node, EncryptedNode>;

    NodeStore(const std::array<uint8_t, 16>& uuid, KdfMode mode, CipherId content_cipher);

    // Tree construction. The first node created must be the root directory.
    uint32_t add_root_directory();
    uint32_t add_directory(uint32_t parent, const std::string& name);
    uint32_t add_file(uint32_t parent, const std::string& name, Bytes content);

    uint32_t root() const { return root_; }
    const std::array<uint8_t, 16>& uuid() const { return uuid_; }
    KdfMode mode() const { return mode_; }
    CipherId content_cipher() const { return content_cipher_; }
    FsConfig fs_config() const;

    size_t node_count() const { return nodes_.size(); }
    const StoredNode& node(uint32_t inode) const;
    const std::vector<uint32_t>& children_of(uint32_t inode) const;

    // Encrypts / decrypts every node in place. Returns false (store
    // unchanged on the failing node, already-processed nodes converted) if
    // the kid dies mid-walk; callers treat any false as ⊥.
    bool encrypt_all(KeyId kid, const Keyring& ring, Rng& rng);
    bool decrypt_all(KeyId kid, const Keyring& ring);

    bool fully_encrypted() const;
    bool fully_plain() const;

    // Structural + content equality of two plaintext stores.
    bool same_tree(const NodeStore& other) const;

    // Used by the container reader, which reconstructs trees record by
    // record in depth-first preorder.
    uint32_t insert_encrypted(EncryptedNode enode, const std::vector<uint32_t>& child_inodes);
    void set_root(uint32_t inode);

  private:
    uint32_t add_node(uint32_t parent, Node node);

    std::array<uint8_t, 16> uuid_{};
    KdfMode mode_;
    CipherId content_cipher_;
    std::map<uint32_t, StoredNode> nodes_;
    std::map<uint32_t, std::vector<uint32_t>> edges_;
    uint32_t root_ = 0;
    uint32_t next_inode_ = 1;
    uint64_t next_lbn_ = 0;
};

}  // namespace mfbe
