// Copyright 2026 The qsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace qsl {

/// Runs body(i) for i in [0, count) on up to `jobs` threads (jobs <= 1 runs inline).
/// Work items are claimed in index order. The first exception thrown by any item is
/// rethrown on the calling thread after all workers join.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

/// Independent RNG stream for (seed, stream index); identical across thread counts.
std::mt19937_64 make_stream_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace qsl
