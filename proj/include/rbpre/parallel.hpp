/*
   Copyright 2026 The reduced_bpre Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rbpre {

/// Evaluates fn(i) for every i in [0, count) on up to `threads` workers and
/// returns the results indexed by i. Work items must derive their random
/// state from i alone; the output is then independent of the thread count.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, unsigned threads, F&& fn)
{
    std::vector<T> out(count);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    try {
                        out[i] = fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(count);
                        return;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

/// Splits `total` items into blocks of `block` items: block i covers
/// [i*block, min(total, (i+1)*block)).
struct BlockRange {
    std::size_t begin;
    std::size_t end;
};

inline BlockRange block_range(std::size_t i, std::size_t block, std::size_t total)
{
    const std::size_t b = i * block;
    return {b, std::min(total, b + block)};
}

inline std::size_t block_count(std::size_t total, std::size_t block) { return (total + block - 1) / block; }

} // namespace rbpre
