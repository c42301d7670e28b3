/*
 * Copyright 2026 The hrli Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace hrli {

/// Fixed-size bitset over dense vertex (or state) indices.
class Region {
public:
    Region() = default;
    explicit Region(std::size_t size, bool full = false)
        : size_(size), words_((size + 63) / 64, full ? ~std::uint64_t{0} : 0)
    {
        if (full) trim();
    }

    std::size_t size() const noexcept { return size_; }

    bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
    bool operator[](std::size_t i) const noexcept { return test(i); }
    void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void assign(std::size_t i, bool value) noexcept { value ? set(i) : reset(i); }

    std::size_t count() const noexcept
    {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }
    bool empty() const noexcept
    {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    Region& operator|=(const Region& o) noexcept
    {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }
    Region& operator&=(const Region& o) noexcept
    {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }
    /// Set difference.
    Region& operator-=(const Region& o) noexcept
    {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
        return *this;
    }
    Region complement() const
    {
        Region r(*this);
        for (auto& w : r.words_) w = ~w;
        r.trim();
        return r;
    }
    bool subset_of(const Region& o) const noexcept
    {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & ~o.words_[k]) return false;
        return true;
    }

    friend Region operator|(Region a, const Region& b) { return a |= b; }
    friend Region operator&(Region a, const Region& b) { return a &= b; }
    friend Region operator-(Region a, const Region& b) { return a -= b; }
    friend bool operator==(const Region&, const Region&) = default;

    /// Ascending list of members.
    std::vector<std::uint32_t> members() const
    {
        std::vector<std::uint32_t> out;
        for (std::size_t k = 0; k < words_.size(); ++k) {
            auto w = words_[k];
            while (w) {
                out.push_back(static_cast<std::uint32_t>(k * 64 + std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

private:
    void trim() noexcept
    {
        if (size_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace hrli
