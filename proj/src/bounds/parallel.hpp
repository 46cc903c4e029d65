#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oscdecay::detail {

// Runs fn(0..n-1) on up to `jobs` threads; the first exception is rethrown after the join.
template <class Fn>
void run_indexed(std::size_t n, int jobs, const Fn& fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> th;
  for (std::size_t t = 0; t < nt; ++t)
    th.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nt) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& x : th) x.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace oscdecay::detail
