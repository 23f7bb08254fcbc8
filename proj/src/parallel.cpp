#include "attnparse/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace attnparse {
namespace {
thread_local bool in_worker = false;
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ATTNPARSE_THREADS")) {
    try {
      long cap = std::stol(env);
      if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      // unparsable value: keep the hardware default
    }
  }
  return n;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = in_worker ? 1 : std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      in_worker = true;
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  threads.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace attnparse
