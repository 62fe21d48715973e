// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_PARALLEL_HPP
#define FFEM_PARALLEL_HPP

#include <functional>

namespace ffem
{

// Worker count for element-parallel sections (default 1).
void SetThreadCount(int threads);
int ThreadCount();

// Calls body(begin, end) on contiguous chunks of [0, count). Each chunk writes only its
// own outputs, so results do not depend on the thread count.
void ParallelFor(int count, const std::function<void(int, int)> &body);

}  // namespace ffem

#endif  // FFEM_PARALLEL_HPP
