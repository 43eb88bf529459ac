// Copyright 2026 The Hyperdisc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HYPERDISC_PARALLEL_HPP_
#define HYPERDISC_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace hyperdisc {

// Applies `fn` to every item using up to `workers` threads. Results come back
// in input order, so output is independent of the worker count.
template <typename T, typename Fn>
auto parallel_map(std::span<const T> items, std::size_t workers, Fn&& fn) {
  using R = decltype(fn(items[0]));
  std::vector<R> results(items.size());
  workers = std::max<std::size_t>(1, std::min(workers, items.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  const std::size_t per = (items.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        const std::size_t begin = w * per;
        const std::size_t end = std::min(items.size(), begin + per);
        for (std::size_t i = begin; i < end; ++i) results[i] = fn(items[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

// Splits [0, n) into `shards` contiguous ranges and runs fn(shard, begin, end)
// on each in its own thread.
template <typename Fn>
void parallel_shards(std::size_t n, std::size_t shards, Fn&& fn) {
  shards = std::max<std::size_t>(1, std::min(shards, std::max<std::size_t>(n, 1)));
  if (shards == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  std::vector<std::thread> threads;
  const std::size_t per = (n + shards - 1) / shards;
  for (std::size_t s = 0; s < shards; ++s) {
    threads.emplace_back([&, s] {
      try {
        const std::size_t begin = std::min(n, s * per);
        fn(s, begin, std::min(n, begin + per));
      } catch (...) {
        errors[s] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace hyperdisc

#endif  // HYPERDISC_PARALLEL_HPP_
