// SPDX-License-Identifier: Apache-2.0
//
// hrs-cluster: user clustering for hierarchical rate splitting
// Copyright (C) 2026 The hrs-cluster authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hrs
{
    // A grouping of users {0..N-1} into disjoint nonempty blocks, kept in canonical form:
    // members ascending within a block, blocks ordered by their smallest member.
    // The text key is 1-based, blocks joined by '|', members by ',' (e.g. "1,3|2,4").
    class Partition
    {
    public:
        Partition() = default;

        // Canonicalizes; throws ConfigError unless the blocks cover 0..N-1 exactly once.
        explicit Partition(std::vector<std::vector<int>> blocks);

        static Partition universal(int num_users);
        static Partition singletons(int num_users);
        static Partition from_key(std::string_view key);

        // labels[u] = block id; block ids need not be contiguous
        static Partition from_labels(const std::vector<int> &labels);

        const std::vector<std::vector<int>> &blocks() const { return blocks_; }
        const std::vector<int> &block(std::size_t g) const { return blocks_[g]; }
        int num_groups() const { return static_cast<int>(blocks_.size()); }
        int num_users() const { return num_users_; }

        // block index of every user
        std::vector<int> group_of() const;

        // Canonical partition obtained by merging blocks i and j.
        Partition merged(std::size_t i, std::size_t j) const;

        // true if every block of *this lies inside a block of coarser
        bool refines(const Partition &coarser) const;

        std::string key() const;

        friend bool operator==(const Partition &, const Partition &) = default;

    private:
        std::vector<std::vector<int>> blocks_;
        int num_users_ = 0;
    };

    std::uint64_t bell_number(int n);

    // Every set partition of {0..N-1} in canonical form (restricted growth strings in
    // lexicographic order). Guarded at N <= 10.
    std::vector<Partition> enumerate_partitions(int num_users);

    constexpr int max_enumeration_users = 10;
}
