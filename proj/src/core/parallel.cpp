/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/core/parallel.cpp
 *
 * Copyright 2026 The facepuppet authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "facepuppet/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace facepuppet {

namespace {
std::atomic<int> configured_threads{1};
thread_local bool inside_parallel_region = false;
} // namespace

void set_thread_count(int threads)
{
    configured_threads = std::max(1, threads);
}

int thread_count() noexcept
{
    return configured_threads;
}

void parallel_for(int begin, int end, const std::function<void(int)>& body)
{
    const int count = end - begin;
    if (count <= 0)
    {
        return;
    }
    const int workers = std::min(configured_threads.load(), count);
    // Nested regions run inline.
    if (workers <= 1 || inside_parallel_region)
    {
        for (int i = begin; i < end; ++i)
        {
            body(i);
        }
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w)
    {
        const int chunk_begin = begin + static_cast<int>(static_cast<long long>(count) * w / workers);
        const int chunk_end = begin + static_cast<int>(static_cast<long long>(count) * (w + 1) / workers);
        threads.emplace_back([&, chunk_begin, chunk_end] {
            inside_parallel_region = true;
            try
            {
                for (int i = chunk_begin; i < chunk_end; ++i)
                {
                    body(i);
                }
            } catch (...)
            {
                const std::lock_guard lock(failure_mutex);
                if (!failure)
                {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads)
    {
        t.join();
    }
    if (failure)
    {
        std::rethrow_exception(failure);
    }
}

} /* namespace facepuppet */
