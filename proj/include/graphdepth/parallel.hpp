/* Copyright (c) 2026 The graphdepth Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <cstddef>
#include <functional>

namespace graphdepth {

/// 0 means one worker per hardware thread.
int resolve_threads(int requested);

/// Calls fn(b) for every b in [0, blocks), spreading blocks over up to
/// `threads` workers. Blocks are claimed in order; callers that write one
/// slot per block get results independent of the worker count.
void parallel_blocks(std::size_t blocks, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace graphdepth
