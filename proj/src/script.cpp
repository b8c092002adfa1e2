#include "eqc/script.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace eqc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r') {
      ++j;
    }
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

int parse_int(std::string_view word, std::size_t line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
  if (ec != std::errc{} || ptr != word.data() + word.size()) {
    throw ScriptParseError(line, "expected integer, got '" + std::string(word) +
                                     "'");
  }
  return v;
}

double parse_double(std::string_view word, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
  if (ec != std::errc{} || ptr != word.data() + word.size() || !std::isfinite(v)) {
    throw ScriptParseError(line, "expected finite number, got '" +
                                     std::string(word) + "'");
  }
  return v;
}

}  // namespace

PairTransfer transfer(int from_a, int from_p, int to_a, int to_p) {
  if (from_a + from_p != to_a + to_p) {
    throw std::invalid_argument("pair transfer must conserve atom number");
  }
  PairTransfer op{from_a, from_p, to_a - from_a};
  validate(op);
  return op;
}

void validate(const PrimitiveOp& op) {
  std::visit(
      Overloaded{
          [](const PairTransfer& t) {
            if (t.m < 0 || t.n < 0 || t.m + t.x < 0 || t.n - t.x < 0) {
              throw std::invalid_argument(
                  "pair transfer endpoints must be non-negative: " +
                  to_text(PrimitiveOp{t}));
            }
          },
          [](const ABRotation& r) {
            if (!std::isfinite(r.theta)) {
              throw std::invalid_argument("rotation angle must be finite");
            }
          },
          [](const Collide& c) {
            if (!std::isfinite(c.phi)) {
              throw std::invalid_argument("collision phase must be finite");
            }
          },
          [](const DefectSplit& d) {
            if (!(d.eps >= 0.0 && d.eps <= 1.0)) {
              throw std::invalid_argument("split probability must be in [0,1]");
            }
          },
          [](const auto&) {},
      },
      op);
}

bool is_basis_preserving(const PrimitiveOp& op) {
  return !std::holds_alternative<ABRotation>(op) &&
         !std::holds_alternative<DefectSplit>(op);
}

bool is_unitary(const PrimitiveOp& op) {
  return !std::holds_alternative<EmptyB>(op) &&
         !std::holds_alternative<EmptyP>(op) &&
         !std::holds_alternative<CountP>(op);
}

std::string to_text(const PrimitiveOp& op) {
  return std::visit(
      Overloaded{
          [](const PairTransfer& t) {
            return "U " + std::to_string(t.m) + " " + std::to_string(t.n) +
                   " " + std::to_string(t.x);
          },
          [](const WSwap&) { return std::string("W"); },
          [](const ABRotation& r) { return "V " + format_double(r.theta); },
          [](const Collide& c) { return "C " + format_double(c.phi); },
          [](const Shift& s) { return "S " + std::to_string(s.x); },
          [](const EmptyB&) { return std::string("EB"); },
          [](const EmptyP&) { return std::string("EP"); },
          [](const DefectSplit& d) { return "SPLIT " + format_double(d.eps); },
          [](const CountP&) { return std::string("COUNTP"); },
      },
      op);
}

ProtocolScript& ProtocolScript::append(const ProtocolScript& other) {
  ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end());
  return *this;
}

ProtocolScript& ProtocolScript::repeat(const ProtocolScript& block, int times) {
  for (int i = 0; i < times; ++i) append(block);
  return *this;
}

bool ProtocolScript::is_basis_preserving() const {
  for (const auto& op : ops_) {
    if (!eqc::is_basis_preserving(op)) return false;
  }
  return true;
}

ScriptParseError::ScriptParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line) {}

ProtocolScript parse_script(std::string_view text) {
  ProtocolScript script;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto words = split_words(line);
    if (words.empty()) continue;

    const std::string_view mnemonic = words[0];
    auto expect_args = [&](std::size_t count) {
      if (words.size() != count + 1) {
        throw ScriptParseError(line_no, "'" + std::string(mnemonic) +
                                            "' takes " + std::to_string(count) +
                                            " argument(s)");
      }
    };

    PrimitiveOp op;
    if (mnemonic == "U") {
      expect_args(3);
      op = PairTransfer{parse_int(words[1], line_no),
                        parse_int(words[2], line_no),
                        parse_int(words[3], line_no)};
    } else if (mnemonic == "W") {
      expect_args(0);
      op = WSwap{};
    } else if (mnemonic == "V") {
      expect_args(1);
      op = ABRotation{parse_double(words[1], line_no)};
    } else if (mnemonic == "C") {
      expect_args(1);
      op = Collide{parse_double(words[1], line_no)};
    } else if (mnemonic == "S") {
      expect_args(1);
      op = Shift{parse_int(words[1], line_no)};
    } else if (mnemonic == "EB") {
      expect_args(0);
      op = EmptyB{};
    } else if (mnemonic == "EP") {
      expect_args(0);
      op = EmptyP{};
    } else if (mnemonic == "SPLIT") {
      expect_args(1);
      op = DefectSplit{parse_double(words[1], line_no)};
    } else if (mnemonic == "COUNTP") {
      expect_args(0);
      op = CountP{};
    } else {
      throw ScriptParseError(line_no,
                             "unknown operation '" + std::string(mnemonic) + "'");
    }
    try {
      validate(op);
    } catch (const std::invalid_argument& e) {
      throw ScriptParseError(line_no, e.what());
    }
    script.push(std::move(op));
  }
  return script;
}

std::string print_script(const ProtocolScript& script) {
  std::string out;
  for (const auto& op : script) {
    out += to_text(op);
    out += '\n';
  }
  return out;
}

}  // namespace eqc
