#include <doctest.h>

#include <cmath>
#include <sstream>

#include "simtsel/error.hpp"
#include "simtsel/ngram_lm.hpp"
#include "test_util.hpp"

using namespace simtsel;
using testutil::category_of;

namespace {

NgramModel train(const std::vector<Sentence>& corpus, unsigned order = 3) {
  NgramModel model(order);
  for (const auto& sentence : corpus) model.add(sentence);
  return model;
}

}  // namespace

TEST_SUITE("ngram_lm") {

TEST_CASE("add-one smoothing on tiny corpora") {
  // "a a a": (3+1)/(3+1+1); unseen: 1/5.
  auto one = UnigramTable::train({{"a", "a", "a"}});
  CHECK(one.prob("a") == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(one.prob("z") == doctest::Approx(0.2).epsilon(1e-12));

  // "a b": (1+1)/(2+2+1) for both, unseen 1/5.
  auto two = UnigramTable::train({{"a", "b"}});
  CHECK(two.prob("a") == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(two.prob("b") == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(two.prob("z") == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(two.log_prob("a") == doctest::Approx(std::log(0.4)).epsilon(1e-12));
}

TEST_CASE("smoothed distribution sums to one over vocab plus one unseen") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    UnigramTable table;
    uint64_t sentences = 1 + rng.below(20);
    for (uint64_t s = 0; s < sentences; ++s) {
      Sentence sentence;
      uint64_t len = rng.below(15);
      for (uint64_t i = 0; i < len; ++i) {
        sentence.push_back("t" + std::to_string(rng.below(30)));
      }
      table.add(sentence);
    }
    double sum = table.prob("never-seen-token");
    for (auto token : table.tokens()) sum += table.prob(token);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("empty corpus cannot train") {
  CHECK(category_of([] { UnigramTable::train({}); }) == ErrorCategory::config);
}

TEST_CASE("counts and totals") {
  auto table = UnigramTable::train({{"a", "b", "a"}, {"b"}});
  CHECK(table.count("a") == 2);
  CHECK(table.count("b") == 2);
  CHECK(table.count("c") == 0);
  CHECK(table.total() == 4);
  CHECK(table.vocab_size() == 2);
  CHECK(table.sentences() == 2);
}

TEST_CASE("unigram save/load round-trips byte for byte") {
  auto table = UnigramTable::train({{"b", "a", "b"}, {"c"}});
  std::ostringstream first;
  table.save(first);
  std::istringstream in(first.str());
  auto loaded = UnigramTable::load(in);
  std::ostringstream second;
  loaded.save(second);
  CHECK(first.str() == second.str());
  CHECK(loaded.prob("b") == table.prob("b"));
  CHECK(loaded.total() == table.total());
}

TEST_CASE("unigram load rejects corrupt tables") {
  auto load_text = [](const std::string& text) {
    std::istringstream in(text);
    UnigramTable::load(in);
  };
  CHECK(category_of([&] { load_text("junk\n"); }) == ErrorCategory::parse);
  CHECK(category_of([&] {
          load_text(
              "simtsel-unigram v=1\nsentences=1\ntotal=2\ntypes=2\n"
              "a\t1\na\t1\n");
        }) == ErrorCategory::parse);  // duplicate token
  CHECK(category_of([&] {
          load_text(
              "simtsel-unigram v=1\nsentences=1\ntotal=2\ntypes=1\n"
              "a\t0\n");
        }) == ErrorCategory::parse);  // zero count
  CHECK(category_of([&] {
          load_text(
              "simtsel-unigram v=1\nsentences=1\ntotal=5\ntypes=1\n"
              "a\t1\n");
        }) == ErrorCategory::parse);  // counts do not sum to total
}

TEST_CASE("model construction validates order and backoff") {
  CHECK(category_of([] { NgramModel model(0); }) == ErrorCategory::config);
  CHECK(category_of([] { NgramModel model(2, 0.0); }) ==
        ErrorCategory::config);
  CHECK(category_of([] { NgramModel model(2, 1.5); }) ==
        ErrorCategory::config);
  NgramModel ok(2, 1.0);
  CHECK(ok.order() == 2);
}

TEST_CASE("n-gram type counts include the sentence marker") {
  auto model = train({{"a", "b"}});
  // Padded stream [BOS, a, b]: unigrams {BOS, a, b}, bigrams {BOS a, a b},
  // trigrams {BOS a b}.
  CHECK(model.ngram_types(1) == 3);
  CHECK(model.ngram_types(2) == 2);
  CHECK(model.ngram_types(3) == 1);
  CHECK(model.ngram_types(4) == 0);
  CHECK(model.sentences() == 1);
}

TEST_CASE("seen n-grams score as count ratios") {
  auto model = train({{"a", "b"}});
  auto ids = model.intern(std::vector<std::string>{"a", "b"});
  // P(a | BOS) = count(BOS a)/count(BOS) = 1.
  std::vector<uint32_t> bos{NgramModel::kBosId};
  CHECK(model.cond_log_prob_ids(bos, ids[0]) == 0.0);
  // P(b | BOS a) = count(BOS a b)/count(BOS a) = 1.
  std::vector<uint32_t> ctx{NgramModel::kBosId, ids[0]};
  CHECK(model.cond_log_prob_ids(ctx, ids[1]) == 0.0);
}

TEST_CASE("unseen n-grams back off with one lambda per shortening") {
  auto model = train({{"a", "b"}});
  auto ids = model.intern(std::vector<std::string>{"b", "z"});
  std::vector<uint32_t> bos{NgramModel::kBosId};
  // b was never seen after BOS: P = lambda * smoothed unigram = 0.4 * 0.4.
  CHECK(model.cond_log_prob_ids(bos, ids[0]) ==
        doctest::Approx(std::log(0.16)).epsilon(1e-12));
  // Unknown token: lambda * unseen unigram = 0.4 * 0.2.
  CHECK(model.cond_log_prob_ids(bos, ids[1]) ==
        doctest::Approx(std::log(0.08)).epsilon(1e-12));
}

TEST_CASE("prefix averages combine the conditional scores") {
  auto model = train({{"a", "b"}});
  Sentence ab{"a", "b"};
  // Both conditionals are exact count ratios equal to 1.
  CHECK(model.prefix_avg_log_prob(std::span(ab).first(1)) == 0.0);
  CHECK(model.prefix_avg_log_prob(ab) == 0.0);
  Sentence b{"b"};
  CHECK(model.prefix_avg_log_prob(b) ==
        doctest::Approx(std::log(0.16)).epsilon(1e-12));
  CHECK(model.prefix_avg_log_prob({}) == 0.0);
}

TEST_CASE("order-1 models score every token by the smoothed unigram") {
  auto model = train({{"a"}}, 1);
  double expected = std::log(2.0 / 3.0);  // (1+1)/(1+1+1)
  for (size_t len : {1, 2, 5}) {
    Sentence prefix(len, "a");
    CHECK(model.prefix_avg_log_prob(prefix) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("a uniform order-1 model scores all in-vocab prefixes alike") {
  auto model = train({{"a", "b", "c", "d"}}, 1);
  double value = model.prefix_avg_log_prob(std::vector<std::string>{"a"});
  for (const Sentence& prefix :
       {Sentence{"d"}, Sentence{"b", "c"}, Sentence{"c", "a", "d", "b"}}) {
    CHECK(model.prefix_avg_log_prob(prefix) ==
          doctest::Approx(value).epsilon(1e-12));
  }
}

TEST_CASE("duplicating the corpus leaves count-ratio scores unchanged") {
  std::vector<Sentence> corpus{{"a", "b", "c"}, {"a", "b", "d"}};
  auto once = train(corpus);
  std::vector<Sentence> doubled = corpus;
  doubled.insert(doubled.end(), corpus.begin(), corpus.end());
  auto twice = train(doubled);

  auto ids1 = once.intern(std::vector<std::string>{"a", "b", "c"});
  auto ids2 = twice.intern(std::vector<std::string>{"a", "b", "c"});
  // P(b | a) and P(c | a b) are pure count ratios; doubling scales both
  // numerator and denominator.
  std::vector<uint32_t> ctx1{ids1[0]};
  std::vector<uint32_t> ctx2{ids2[0]};
  CHECK(once.cond_log_prob_ids(ctx1, ids1[1]) ==
        twice.cond_log_prob_ids(ctx2, ids2[1]));
  std::vector<uint32_t> long1{ids1[0], ids1[1]};
  std::vector<uint32_t> long2{ids2[0], ids2[1]};
  CHECK(once.cond_log_prob_ids(long1, ids1[2]) ==
        twice.cond_log_prob_ids(long2, ids2[2]));
}

TEST_CASE("model save/load round-trips byte for byte") {
  auto model = train({{"c", "a"}, {"a", "b", "a"}});
  std::ostringstream first;
  model.save(first);
  std::istringstream in(first.str());
  auto loaded = NgramModel::load(in);
  std::ostringstream second;
  loaded.save(second);
  CHECK(first.str() == second.str());

  // Scores survive the round trip bit for bit.
  for (const Sentence& prefix :
       {Sentence{"a", "b"}, Sentence{"c", "a", "b", "a"}, Sentence{"zz"}}) {
    CHECK(model.prefix_avg_log_prob(prefix) ==
          loaded.prefix_avg_log_prob(prefix));
  }
  CHECK(loaded.order() == model.order());
  CHECK(loaded.backoff() == model.backoff());
  CHECK(loaded.ngram_types(2) == model.ngram_types(2));
}

TEST_CASE("model load rejects corrupt files") {
  auto model = train({{"a", "b"}});
  std::ostringstream saved;
  model.save(saved);
  std::string good = saved.str();

  auto load_text = [](const std::string& text) {
    std::istringstream in(text);
    NgramModel::load(in);
  };
  CHECK(category_of([&] { load_text("nonsense\n"); }) == ErrorCategory::parse);

  // A gram over a token the unigram table does not list.
  std::string bad = good;
  auto pos = bad.rfind("g\t");
  bad.replace(pos, bad.size() - pos, "g\t1\tghost\n");
  CHECK(category_of([&] { load_text(bad); }) == ErrorCategory::parse);
}

}  // TEST_SUITE
