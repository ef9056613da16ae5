/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: include/facepuppet/core/parallel.hpp
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
#pragma once

#ifndef FACEPUPPET_CORE_PARALLEL_HPP
#define FACEPUPPET_CORE_PARALLEL_HPP

#include <functional>

namespace facepuppet {

/// Number of worker threads used by parallel_for (default 1).
void set_thread_count(int threads);
int thread_count() noexcept;

/**
 * Runs body(i) for every i in [begin, end), split into contiguous chunks
 * over the configured worker threads. Every index must write disjoint
 * outputs; results are then independent of the thread count. The first
 * exception thrown by any chunk is rethrown on the caller.
 */
void parallel_for(int begin, int end, const std::function<void(int)>& body);

} /* namespace facepuppet */

#endif /* FACEPUPPET_CORE_PARALLEL_HPP */
