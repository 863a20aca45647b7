#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "dkheap/harness.hpp"

namespace dkheap::harness {

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

template <typename T>
T parse_int(std::string_view word, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc{} || ptr != word.data() + word.size())
    throw TraceParseError(line, std::string("bad ") + what + " '" + std::string(word) + "'");
  return value;
}

}  // namespace

std::vector<TraceOp> parse_trace(std::string_view text) {
  std::vector<TraceOp> ops;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    const auto w = split_words(line);
    if (w.empty()) continue;
    auto expect_args = [&](std::size_t n) {
      if (w.size() != n + 1)
        throw TraceParseError(line_no, "'" + std::string(w[0]) + "' takes " + std::to_string(n) + " argument(s)");
    };
    if (w[0] == "I") {
      expect_args(1);
      ops.push_back(TraceOp::insert(parse_int<Key>(w[1], line_no, "key")));
    } else if (w[0] == "K") {
      expect_args(2);
      const auto ref = parse_int<std::uint64_t>(w[1], line_no, "ref");
      ops.push_back(TraceOp::decrease(ref, parse_int<Key>(w[2], line_no, "key")));
    } else if (w[0] == "D") {
      expect_args(0);
      ops.push_back(TraceOp::delete_min());
    } else if (w[0] == "F") {
      expect_args(0);
      ops.push_back(TraceOp::find_min());
    } else {
      throw TraceParseError(line_no, "unknown operation '" + std::string(w[0]) + "'");
    }
  }
  return ops;
}

std::string format_trace(std::span<const TraceOp> ops) {
  std::ostringstream out;
  for (const TraceOp& op : ops) {
    switch (op.kind) {
      case OpKind::Insert: out << "I " << op.key << '\n'; break;
      case OpKind::Decrease: out << "K " << op.ref << ' ' << op.key << '\n'; break;
      case OpKind::DeleteMin: out << "D\n"; break;
      case OpKind::FindMin: out << "F\n"; break;
    }
  }
  return out.str();
}

std::vector<TraceOp> generate_trace(std::uint64_t seed, std::size_t n_ops, const TraceShape& shape) {
  const OpMix& m = shape.mix;
  const double sum = m.insert + m.decrease + m.delete_min + m.find_min;
  if (n_ops == 0 || m.insert < 0 || m.decrease < 0 || m.delete_min < 0 || m.find_min < 0 || std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("generate_trace: ratios must be nonnegative and sum to 1, n_ops >= 1");

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick({m.insert, m.decrease, m.delete_min, m.find_min});
  std::uniform_int_distribution<Key> fresh_key(0, shape.key_range);
  std::uniform_int_distribution<Key> step(1, std::max<Key>(1, shape.key_range / 2));

  OracleHeap oracle;
  std::vector<std::uint64_t> live;         // live refs
  std::vector<std::size_t> slot_of;        // ref -> index in live
  std::vector<TraceOp> ops;
  ops.reserve(n_ops);

  auto add_insert = [&] {
    const Key k = fresh_key(rng);
    const std::uint64_t ref = oracle.insert(k);
    slot_of.push_back(live.size());
    live.push_back(ref);
    ops.push_back(TraceOp::insert(k));
  };

  while (ops.size() < n_ops) {
    switch (pick(rng)) {
      case 0: add_insert(); break;
      case 1: {
        if (live.empty()) {
          add_insert();
          break;
        }
        const std::uint64_t ref = live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)];
        const Key k = oracle.key_of(ref) - step(rng);
        oracle.decrease(ref, k);
        ops.push_back(TraceOp::decrease(ref, k));
        break;
      }
      case 2: {
        if (live.empty()) {
          add_insert();
          break;
        }
        const auto [key, ref] = *oracle.delete_min();
        const std::size_t at = slot_of[ref];
        live[at] = live.back();
        slot_of[live[at]] = at;
        live.pop_back();
        ops.push_back(TraceOp::delete_min());
        break;
      }
      default: ops.push_back(TraceOp::find_min()); break;
    }
  }
  return ops;
}

}  // namespace dkheap::harness
