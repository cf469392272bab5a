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

#include "hrs/partition.hpp"
#include "hrs/errors.hpp"

#include <algorithm>
#include <charconv>
#include <map>

namespace hrs
{
    Partition::Partition(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks))
    {
        std::size_t total = 0;
        for (auto &b : blocks_)
        {
            if (b.empty())
                throw ConfigError("Partition blocks must be nonempty.");
            std::sort(b.begin(), b.end());
            total += b.size();
        }
        std::sort(blocks_.begin(), blocks_.end(), [](const auto &a, const auto &b) { return a.front() < b.front(); });

        num_users_ = static_cast<int>(total);
        std::vector<char> seen(total, 0);
        for (const auto &b : blocks_)
            for (int u : b)
            {
                if (u < 0 || u >= num_users_ || seen[static_cast<std::size_t>(u)])
                    throw ConfigError("Partition blocks must cover each user exactly once.");
                seen[static_cast<std::size_t>(u)] = 1;
            }
    }

    Partition Partition::universal(int num_users)
    {
        std::vector<int> all(static_cast<std::size_t>(num_users));
        for (int u = 0; u < num_users; ++u)
            all[static_cast<std::size_t>(u)] = u;
        return Partition({all});
    }

    Partition Partition::singletons(int num_users)
    {
        std::vector<std::vector<int>> blocks;
        for (int u = 0; u < num_users; ++u)
            blocks.push_back({u});
        return Partition(std::move(blocks));
    }

    Partition Partition::from_labels(const std::vector<int> &labels)
    {
        std::map<int, std::vector<int>> groups;
        for (std::size_t u = 0; u < labels.size(); ++u)
            groups[labels[u]].push_back(static_cast<int>(u));
        std::vector<std::vector<int>> blocks;
        for (auto &[id, members] : groups)
            blocks.push_back(std::move(members));
        return Partition(std::move(blocks));
    }

    Partition Partition::from_key(std::string_view key)
    {
        std::vector<std::vector<int>> blocks(1);
        std::size_t pos = 0;
        while (pos <= key.size())
        {
            std::size_t end = pos;
            while (end < key.size() && key[end] != ',' && key[end] != '|')
                ++end;
            int value = 0;
            auto [ptr, ec] = std::from_chars(key.data() + pos, key.data() + end, value);
            if (ec != std::errc() || ptr != key.data() + end || value < 1)
                throw FormatError("Malformed partition key \"" + std::string(key) + "\".");
            blocks.back().push_back(value - 1);
            if (end < key.size() && key[end] == '|')
                blocks.emplace_back();
            pos = end + 1;
        }
        Partition p(std::move(blocks));
        if (p.key() != key)
            throw FormatError("Partition key \"" + std::string(key) + "\" is not canonical.");
        return p;
    }

    std::vector<int> Partition::group_of() const
    {
        std::vector<int> out(static_cast<std::size_t>(num_users_), -1);
        for (std::size_t g = 0; g < blocks_.size(); ++g)
            for (int u : blocks_[g])
                out[static_cast<std::size_t>(u)] = static_cast<int>(g);
        return out;
    }

    Partition Partition::merged(std::size_t i, std::size_t j) const
    {
        if (i == j || i >= blocks_.size() || j >= blocks_.size())
            throw std::invalid_argument("Invalid block pair for merge.");
        std::vector<std::vector<int>> blocks;
        std::vector<int> joined = blocks_[i];
        joined.insert(joined.end(), blocks_[j].begin(), blocks_[j].end());
        blocks.push_back(std::move(joined));
        for (std::size_t g = 0; g < blocks_.size(); ++g)
            if (g != i && g != j)
                blocks.push_back(blocks_[g]);
        return Partition(std::move(blocks));
    }

    bool Partition::refines(const Partition &coarser) const
    {
        if (coarser.num_users_ != num_users_)
            return false;
        const auto owner = coarser.group_of();
        for (const auto &b : blocks_)
            for (int u : b)
                if (owner[static_cast<std::size_t>(u)] != owner[static_cast<std::size_t>(b.front())])
                    return false;
        return true;
    }

    std::string Partition::key() const
    {
        std::string out;
        for (std::size_t g = 0; g < blocks_.size(); ++g)
        {
            if (g)
                out += '|';
            for (std::size_t i = 0; i < blocks_[g].size(); ++i)
            {
                if (i)
                    out += ',';
                out += std::to_string(blocks_[g][i] + 1);
            }
        }
        return out;
    }

    std::uint64_t bell_number(int n)
    {
        if (n < 0)
            throw std::invalid_argument("Bell number of a negative size.");
        // Bell triangle
        std::vector<std::uint64_t> row{1};
        for (int i = 0; i < n; ++i)
        {
            std::vector<std::uint64_t> next{row.back()};
            for (std::uint64_t v : row)
                next.push_back(next.back() + v);
            row = std::move(next);
        }
        return row.front();
    }

    std::vector<Partition> enumerate_partitions(int num_users)
    {
        if (num_users < 1)
            throw ConfigError("Need at least one user to enumerate partitions.");
        if (num_users > max_enumeration_users)
            throw ConfigError("Refusing to enumerate Bell(" + std::to_string(num_users) +
                              ") partitions; limit is N <= " + std::to_string(max_enumeration_users) + ".");

        const auto n = static_cast<std::size_t>(num_users);
        std::vector<Partition> out;
        out.reserve(bell_number(num_users));

        // restricted growth string: rgs[0] = 0, rgs[i] <= 1 + max(rgs[0..i-1])
        std::vector<int> rgs(n, 0), prefix_max(n, 0);
        while (true)
        {
            out.push_back(Partition::from_labels(rgs));
            std::size_t i = n - 1;
            while (i > 0 && rgs[i] > prefix_max[i - 1])
                --i;
            if (i == 0)
                break;
            ++rgs[i];
            prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
            for (std::size_t j = i + 1; j < n; ++j)
            {
                rgs[j] = 0;
                prefix_max[j] = prefix_max[i];
            }
        }
        return out;
    }
}
