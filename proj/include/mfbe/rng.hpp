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
#include <memory>
#include <string>

#include "mfbe/bytes.hpp"

namespace mfbe {

// Randomness source. Unseeded instances pull from the OS CSPRNG; seeded
// instances generate a deterministic ChaCha20 keystream so that whole runs
// (wrap nonces, key generation, experiment transcripts) replay bit-for-bit.
class Rng {
  public:
    // OS-backed source. Throws std::runtime_error if the system CSPRNG fails.
    static Rng system();

    explicit Rng(ByteSpan seed);
    explicit Rng(uint64_t seed);

    Rng(Rng&&) noexcept;
    Rng& operator=(Rng&&) noexcept;
    Rng(const Rng&) = delete;
    Rng& operator=(const Rng&) = delete;
    ~Rng();

    void fill(uint8_t* data, size_t len);
    Bytes bytes(size_t len);
    uint64_t next_u64();
    // Uniform in [0, bound), bound > 0. Rejection-sampled, no modulo bias.
    uint64_t below(uint64_t bound);
    bool coin();

    // Child generator with an independent stream, derived from this
    // generator's seed and the label. Children of a system rng are system.
    Rng derive(const std::string& label) const;

    bool is_seeded() const;

  private:
    struct Impl;
    Rng();
    std::unique_ptr<Impl> impl_;
};

}  // namespace mfbe
