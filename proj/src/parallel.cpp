// SPDX-License-Identifier: Apache-2.0

#include "ffem/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>
#include <vector>

namespace ffem
{

namespace
{
std::atomic<int> g_threads{1};
}

void SetThreadCount(int threads)
{
  if (threads < 1)
  {
    throw std::invalid_argument("thread count must be at least 1");
  }
  g_threads = threads;
}

int ThreadCount() { return g_threads; }

void ParallelFor(int count, const std::function<void(int, int)> &body)
{
  const int workers = std::min(ThreadCount(), std::max(count, 1));
  if (workers <= 1)
  {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; w++)
  {
    const int begin = static_cast<int>(static_cast<long>(count) * w / workers);
    const int end = static_cast<int>(static_cast<long>(count) * (w + 1) / workers);
    pool.emplace_back(
        [&, begin, end]
        {
          try
          {
            body(begin, end);
          }
          catch (...)
          {
            if (!failed.exchange(true))
            {
              error = std::current_exception();
            }
          }
        });
  }
  for (auto &t : pool)
  {
    t.join();
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
}

}  // namespace ffem
