#include "simtsel/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>

#include "simtsel/error.hpp"
#include "text_io.hpp"

namespace simtsel {

namespace {

void append_id(std::string& key, uint32_t id) {
  char bytes[4];
  std::memcpy(bytes, &id, sizeof(id));
  key.append(bytes, sizeof(id));
}

std::string pack_key(std::span<const uint32_t> ids) {
  std::string key;
  key.reserve(ids.size() * sizeof(uint32_t));
  for (uint32_t id : ids) append_id(key, id);
  return key;
}

uint32_t unpack_id(std::string_view key, size_t slot) {
  uint32_t id = 0;
  std::memcpy(&id, key.data() + slot * sizeof(uint32_t), sizeof(id));
  return id;
}

}  // namespace

void UnigramTable::add(const Sentence& sentence) {
  ++sentences_;
  for (const auto& token : sentence) {
    ++counts_[token];
    ++total_;
  }
}

uint64_t UnigramTable::count(std::string_view token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::string_view> UnigramTable::tokens() const {
  std::vector<std::string_view> out;
  out.reserve(counts_.size());
  for (const auto& [token, count] : counts_) {
    (void)count;
    out.push_back(token);
  }
  return out;
}

double UnigramTable::prob(std::string_view token) const {
  const double denom = static_cast<double>(total_ + counts_.size() + 1);
  return static_cast<double>(count(token) + 1) / denom;
}

double UnigramTable::log_prob(std::string_view token) const {
  return std::log(prob(token));
}

void UnigramTable::save(std::ostream& out) const {
  out << "simtsel-unigram v=1\n";
  out << "sentences=" << sentences_ << "\n";
  out << "total=" << total_ << "\n";
  out << "types=" << counts_.size() << "\n";
  std::vector<const std::pair<const std::string, uint64_t>*> rows;
  rows.reserve(counts_.size());
  for (const auto& entry : counts_) rows.push_back(&entry);
  std::sort(rows.begin(), rows.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  for (const auto* row : rows) {
    out << row->first << "\t" << row->second << "\n";
  }
}

UnigramTable UnigramTable::load(std::istream& in) {
  constexpr std::string_view what = "unigram table";
  detail::expect_line(in, "simtsel-unigram v=1", what);
  UnigramTable table;
  table.sentences_ = detail::read_kv_u64(in, "sentences", what);
  table.total_ = detail::read_kv_u64(in, "total", what);
  uint64_t types = detail::read_kv_u64(in, "types", what);
  uint64_t checked_total = 0;
  for (uint64_t i = 0; i < types; ++i) {
    std::string line = detail::read_line(in, what);
    auto fields = detail::split(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": bad count line '" + line + "'");
    }
    uint64_t count = detail::parse_u64(fields[1], what);
    if (count == 0) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": zero count for '" +
                      std::string(fields[0]) + "'");
    }
    auto [it, fresh] = table.counts_.emplace(std::string(fields[0]), count);
    if (!fresh) {
      throw Error(ErrorCategory::parse, std::string(what) +
                                            ": duplicate token '" +
                                            std::string(fields[0]) + "'");
    }
    checked_total += count;
  }
  if (checked_total != table.total_) {
    throw Error(ErrorCategory::parse,
                std::string(what) + ": counts sum to " +
                    detail::format_u64(checked_total) + ", header says " +
                    detail::format_u64(table.total_));
  }
  return table;
}

UnigramTable UnigramTable::train(const std::vector<Sentence>& corpus) {
  if (corpus.empty()) {
    throw Error(ErrorCategory::config, "cannot train on an empty corpus");
  }
  UnigramTable table;
  for (const auto& sentence : corpus) table.add(sentence);
  return table;
}

NgramModel::NgramModel(unsigned order, double backoff)
    : order_(order), backoff_(backoff) {
  if (order < 1) {
    throw Error(ErrorCategory::config, "n-gram order must be at least 1");
  }
  if (!(backoff > 0.0) || backoff > 1.0) {
    throw Error(ErrorCategory::config,
                "backoff factor must be in (0, 1], got " +
                    detail::format_double(backoff));
  }
  log_backoff_ = std::log(backoff);
  id_to_token_.assign(2, nullptr);  // begin-of-sentence, OOV
  types_per_order_.assign(order_, 0);
}

uint32_t NgramModel::intern_or_add(const std::string& token) {
  auto it = vocab_.find(token);
  if (it != vocab_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(id_to_token_.size());
  auto [slot, fresh] = vocab_.emplace(token, id);
  (void)fresh;
  id_to_token_.push_back(&slot->first);
  return id;
}

void NgramModel::add(const Sentence& sentence) {
  ++sentences_;
  unigram_.add(sentence);
  std::vector<uint32_t> padded;
  padded.reserve(sentence.size() + 1);
  padded.push_back(kBosId);
  for (const auto& token : sentence) padded.push_back(intern_or_add(token));
  count_ngrams(padded);
}

void NgramModel::count_ngrams(const std::vector<uint32_t>& padded) {
  std::string key;
  for (unsigned k = 1; k <= order_; ++k) {
    if (padded.size() < k) break;
    for (size_t start = 0; start + k <= padded.size(); ++start) {
      key.clear();
      for (size_t i = 0; i < k; ++i) append_id(key, padded[start + i]);
      auto [it, fresh] = counts_.try_emplace(key, 0);
      if (fresh) ++types_per_order_[k - 1];
      ++it->second;
    }
  }
}

uint64_t NgramModel::ngram_types(unsigned k) const {
  if (k < 1 || k > order_) return 0;
  return types_per_order_[k - 1];
}

uint64_t NgramModel::lookup(std::string_view key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<uint32_t> NgramModel::intern(
    std::span<const std::string> tokens) const {
  std::vector<uint32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& token : tokens) {
    auto it = vocab_.find(std::string_view(token));
    ids.push_back(it == vocab_.end() ? kUnkId : it->second);
  }
  return ids;
}

double NgramModel::oov_log_prob() const {
  const double denom =
      static_cast<double>(unigram_.total() + unigram_.vocab_size() + 1);
  return std::log(1.0 / denom);
}

double NgramModel::cond_log_prob_ids(std::span<const uint32_t> context,
                                     uint32_t token) const {
  size_t max_ctx = order_ > 0 ? order_ - 1 : 0;
  size_t use = std::min(context.size(), max_ctx);
  std::span<const uint32_t> ctx = context.subspan(context.size() - use, use);

  unsigned shortenings = 0;
  std::string key;
  for (size_t len = ctx.size(); len >= 1; --len) {
    std::span<const uint32_t> tail = ctx.subspan(ctx.size() - len, len);
    key.clear();
    for (uint32_t id : tail) append_id(key, id);
    append_id(key, token);
    uint64_t joint = lookup(key);
    if (joint > 0) {
      key.resize(key.size() - sizeof(uint32_t));
      uint64_t ctx_count = lookup(key);
      return shortenings * log_backoff_ +
             std::log(static_cast<double>(joint) /
                      static_cast<double>(ctx_count));
    }
    ++shortenings;
  }

  double floor;
  if (token == kBosId || token == kUnkId) {
    floor = oov_log_prob();
  } else {
    floor = unigram_.log_prob(*id_to_token_[token]);
  }
  return shortenings * log_backoff_ + floor;
}

double NgramModel::prefix_avg_log_prob(
    std::span<const std::string> prefix) const {
  if (prefix.empty()) return 0.0;
  std::vector<uint32_t> padded;
  padded.reserve(prefix.size() + 1);
  padded.push_back(kBosId);
  for (uint32_t id : intern(prefix)) padded.push_back(id);
  double sum = 0.0;
  for (size_t t = 1; t < padded.size(); ++t) {
    sum += cond_log_prob_ids(std::span(padded).first(t), padded[t]);
  }
  return sum / static_cast<double>(prefix.size());
}

void NgramModel::save(std::ostream& out) const {
  out << "simtsel-ngram v=1\n";
  out << "order=" << order_ << "\n";
  out << "lambda=" << detail::format_double(backoff_) << "\n";
  out << "sentences=" << sentences_ << "\n";
  unigram_.save(out);
  struct Row {
    unsigned k;
    std::string body;
    uint64_t count;
  };
  std::vector<Row> rows;
  rows.reserve(counts_.size());
  for (const auto& [key, count] : counts_) {
    unsigned k = static_cast<unsigned>(key.size() / sizeof(uint32_t));
    std::string body;
    for (size_t slot = 0; slot < k; ++slot) {
      if (slot > 0) body.push_back('\t');
      uint32_t id = unpack_id(key, slot);
      if (id != kBosId) body += *id_to_token_[id];
    }
    rows.push_back(Row{k, std::move(body), count});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.k != b.k) return a.k < b.k;
    return a.body < b.body;
  });
  out << "grams=" << rows.size() << "\n";
  for (const auto& row : rows) {
    out << "g\t" << row.count << "\t" << row.body << "\n";
  }
}

NgramModel NgramModel::load(std::istream& in) {
  constexpr std::string_view what = "n-gram model";
  detail::expect_line(in, "simtsel-ngram v=1", what);
  uint64_t order = detail::read_kv_u64(in, "order", what);
  if (order < 1 || order > 16) {
    throw Error(ErrorCategory::parse,
                std::string(what) + ": unreasonable order " +
                    detail::format_u64(order));
  }
  double lambda = detail::read_kv_double(in, "lambda", what);
  uint64_t sentences = detail::read_kv_u64(in, "sentences", what);
  NgramModel model(static_cast<unsigned>(order), lambda);
  model.sentences_ = sentences;
  model.unigram_ = UnigramTable::load(in);

  // Vocabulary ids are rebuilt in sorted token order; the packed count keys
  // below use these fresh ids, so save/load round-trips byte for byte.
  {
    auto tokens = model.unigram_.tokens();
    std::sort(tokens.begin(), tokens.end());
    for (auto token : tokens) model.intern_or_add(std::string(token));
  }

  uint64_t grams = detail::read_kv_u64(in, "grams", what);
  std::vector<uint32_t> ids;
  for (uint64_t i = 0; i < grams; ++i) {
    std::string line = detail::read_line(in, what);
    auto fields = detail::split(line, '\t');
    if (fields.size() < 3 || fields[0] != "g") {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": bad gram line '" + line + "'");
    }
    uint64_t count = detail::parse_u64(fields[1], what);
    size_t k = fields.size() - 2;
    if (k > model.order_) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": gram longer than the model order: '" +
                      line + "'");
    }
    ids.clear();
    for (size_t f = 2; f < fields.size(); ++f) {
      if (fields[f].empty()) {
        ids.push_back(kBosId);
        continue;
      }
      auto it = model.vocab_.find(fields[f]);
      if (it == model.vocab_.end()) {
        throw Error(ErrorCategory::parse,
                    std::string(what) + ": gram token '" +
                        std::string(fields[f]) + "' missing from the table");
      }
      ids.push_back(it->second);
    }
    auto [slot, fresh] = model.counts_.emplace(pack_key(ids), count);
    if (!fresh) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": duplicate gram line '" + line + "'");
    }
    (void)slot;
    ++model.types_per_order_[k - 1];
  }
  return model;
}

}  // namespace simtsel
