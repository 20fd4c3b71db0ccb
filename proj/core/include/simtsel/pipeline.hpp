#ifndef SIMTSEL_PIPELINE_HPP
#define SIMTSEL_PIPELINE_HPP

#include <cstdint>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

#include "simtsel/corpus.hpp"

namespace simtsel {

// 0 means "ask the hardware"; the answer is always at least 1.
unsigned resolve_workers(unsigned requested);

inline constexpr size_t kDefaultBlockSize = 8192;

// Applies map to every record and feeds the results to sink in input order,
// whatever the worker count. Records are read into blocks; workers take
// contiguous slices of a block, then the block is drained in order before
// the next is read. Memory stays bounded by the block size. map must be
// safe to call concurrently on distinct records.
template <typename Result, typename MapFn, typename SinkFn>
void map_ordered(ParallelReader& reader, unsigned workers, size_t block_size,
                 MapFn&& map, SinkFn&& sink) {
  workers = resolve_workers(workers);
  if (block_size < 1) block_size = 1;

  std::vector<ParallelRecord> block;
  std::vector<Result> results;
  block.reserve(block_size);
  while (true) {
    block.clear();
    while (block.size() < block_size) {
      auto record = reader.next();
      if (!record) break;
      block.push_back(std::move(*record));
    }
    if (block.empty()) break;

    results.clear();
    results.resize(block.size());
    if (workers == 1 || block.size() == 1) {
      for (size_t i = 0; i < block.size(); ++i) results[i] = map(block[i]);
    } else {
      size_t slices = std::min<size_t>(workers, block.size());
      std::vector<std::exception_ptr> errors(slices);
      std::vector<std::thread> threads;
      threads.reserve(slices);
      for (size_t s = 0; s < slices; ++s) {
        size_t begin = block.size() * s / slices;
        size_t end = block.size() * (s + 1) / slices;
        threads.emplace_back([&, s, begin, end] {
          try {
            for (size_t i = begin; i < end; ++i) results[i] = map(block[i]);
          } catch (...) {
            errors[s] = std::current_exception();
          }
        });
      }
      for (auto& thread : threads) thread.join();
      for (auto& error : errors) {
        if (error) std::rethrow_exception(error);
      }
    }

    for (size_t i = 0; i < block.size(); ++i) {
      sink(block[i].index, std::move(results[i]));
    }
  }
}

}  // namespace simtsel

#endif
