#pragma once

#include <algorithm>
#include <future>
#include <vector>

namespace litmap::detail {

// Runs fn over items with at most `parallelism` calls in flight. Results come
// back in input order regardless of completion order.
template <typename Item, typename Fn>
auto bounded_map(const std::vector<Item>& items, std::size_t parallelism, Fn fn)
    -> std::vector<decltype(fn(items.front()))> {
  using Out = decltype(fn(items.front()));
  std::vector<Out> out;
  out.reserve(items.size());
  if (parallelism <= 1) {
    for (const auto& it : items) out.push_back(fn(it));
    return out;
  }
  for (std::size_t begin = 0; begin < items.size(); begin += parallelism) {
    const std::size_t end = std::min(items.size(), begin + parallelism);
    std::vector<std::future<Out>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&fn, &items, i] { return fn(items[i]); }));
    }
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

}  // namespace litmap::detail
