#include <doctest.h>

#include <string>
#include <vector>

#include "simtsel/error.hpp"
#include "simtsel/pipeline.hpp"
#include "test_util.hpp"

using namespace simtsel;

namespace {

std::string make_corpus(int lines) {
  std::string text;
  for (int i = 0; i < lines; ++i) {
    for (int t = 0; t < i % 4; ++t) {
      if (t > 0) text += " ";
      text += "w" + std::to_string(i);
    }
    text += "\n";
  }
  return text;
}

std::vector<uint64_t> run_map(const std::string& path, unsigned workers,
                              size_t block_size) {
  ParallelReader reader(path);
  std::vector<uint64_t> out;
  std::vector<uint64_t> order;
  map_ordered<uint64_t>(
      reader, workers, block_size,
      [](const ParallelRecord& record) {
        return record.index * 10 + record.source.size();
      },
      [&](uint64_t index, uint64_t value) {
        order.push_back(index);
        out.push_back(value);
      });
  for (size_t i = 0; i < order.size(); ++i) REQUIRE(order[i] == i);
  return out;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(0) >= 1);
  CHECK(resolve_workers(1) == 1);
  CHECK(resolve_workers(3) == 3);
}

TEST_CASE("results arrive in input order for any worker count") {
  testutil::TempDir dir;
  auto path = dir.file("corpus.txt");
  testutil::write_file(path, make_corpus(1000));

  auto baseline = run_map(path, 1, kDefaultBlockSize);
  REQUIRE(baseline.size() == 1000);
  for (size_t i = 0; i < baseline.size(); ++i) {
    CHECK(baseline[i] == i * 10 + i % 4);
  }

  CHECK(run_map(path, 2, kDefaultBlockSize) == baseline);
  CHECK(run_map(path, 8, kDefaultBlockSize) == baseline);
}

TEST_CASE("block size never changes the output") {
  testutil::TempDir dir;
  auto path = dir.file("corpus.txt");
  testutil::write_file(path, make_corpus(100));

  auto baseline = run_map(path, 4, kDefaultBlockSize);
  CHECK(run_map(path, 4, 1) == baseline);
  CHECK(run_map(path, 4, 7) == baseline);
  CHECK(run_map(path, 4, 100) == baseline);
}

TEST_CASE("worker exceptions reach the caller") {
  testutil::TempDir dir;
  auto path = dir.file("corpus.txt");
  testutil::write_file(path, make_corpus(100));

  ParallelReader reader(path);
  auto category = testutil::category_of([&] {
    map_ordered<int>(
        reader, 4, kDefaultBlockSize,
        [](const ParallelRecord& record) -> int {
          if (record.index == 50) {
            throw Error(ErrorCategory::internal, "boom");
          }
          return 0;
        },
        [](uint64_t, int) {});
  });
  CHECK(category == ErrorCategory::internal);
}

}  // TEST_SUITE
