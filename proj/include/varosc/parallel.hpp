#ifndef VAROSC_PARALLEL_HPP
#define VAROSC_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace varosc::detail {

// Runs fn(i) for i in [0, count) on up to `threads` workers with a static
// interleaved partition. fn must only write to slot i of its outputs, which
// keeps results independent of scheduling. The first exception by index is
// rethrown.
template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  std::vector<std::exception_ptr> errors(count);
  auto body = [&](unsigned w) {
    for (std::size_t i = w; i < count; i += workers) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back(body, w);
    for (auto& t : pool)
      t.join();
  }
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace varosc::detail

#endif // VAROSC_PARALLEL_HPP
