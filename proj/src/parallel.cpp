#include "helab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace helab {
namespace {

int default_cap() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("HELICITY_LAB_THREADS")) {
    try {
      const int requested = std::stoi(env);
      if (requested >= 1) cap = std::min(cap, requested);
    } catch (const std::exception&) {
    }
  }
  return cap;
}

std::atomic<int>& cap_slot() {
  static std::atomic<int> cap{default_cap()};
  return cap;
}

}  // namespace

int thread_cap() { return cap_slot().load(); }

void set_thread_cap(int threads) { cap_slot().store(std::max(1, threads)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), count);
  if (workers <= 1) {
    if (count > 0) body(0, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&body, &failures, w, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    try {
      body(0, std::min(count, chunk));
    } catch (...) {
      failures[0] = std::current_exception();
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

}  // namespace helab
