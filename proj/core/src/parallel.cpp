#include "lcq/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace lcq {
namespace {

std::atomic<std::size_t> g_override{0};

}  // namespace

std::size_t thread_count() {
  if (const std::size_t forced = g_override.load(); forced > 0) return forced;
  if (const char* env = std::getenv("LCQ_THREADS"); env != nullptr) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

ScopedThreadCount::ScopedThreadCount(std::size_t threads)
    : previous_(g_override.exchange(threads)) {}

ScopedThreadCount::~ScopedThreadCount() { g_override.store(previous_); }

namespace detail {
bool& inside_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

}  // namespace lcq
