#pragma once

#include <exception>
#include <thread>
#include <vector>

namespace zamr {

template <class Fn>
void for_each_rank(int ranks, Fn&& fn) {
  if (ranks <= 1) {
    fn(0);
    return;
  }
  std::vector<std::exception_ptr> errors(ranks);
  {
    std::vector<std::jthread> workers;
    workers.reserve(ranks);
    for (int r = 0; r < ranks; ++r) {
      workers.emplace_back([&fn, &errors, r] {
        try {
          fn(r);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      });
    }
  }  // join: barrier
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace zamr
