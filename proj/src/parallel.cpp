#include "sithss/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace sithss {

namespace {
// Below this many items per chunk the thread start-up dominates.
constexpr std::size_t kMinChunk = 128;
}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int threads_from_env() {
  const char* value = std::getenv("SIT_HSS_THREADS");
  if (value == nullptr || *value == '\0') return 0;
  try {
    return std::max(0, std::stoi(value));
  } catch (const std::exception&) {
    return 0;
  }
}

std::size_t chunk_count(std::size_t n, int threads) {
  if (n == 0) return 0;
  const auto t = static_cast<std::size_t>(resolve_threads(threads));
  return std::clamp<std::size_t>(n / kMinChunk, 1, t);
}

void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t chunks = chunk_count(n, threads);
  if (chunks == 0) return;
  if (chunks == 1) {
    body(0, 0, n);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(chunks);
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    workers.emplace_back([&, c, begin, end] {
      try {
        body(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sithss
