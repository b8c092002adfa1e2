#pragma once

// Primitive operations and protocol scripts, plus the line-oriented text
// format used to store scripts:
//
//   U m n x     pair transfer |m,0,n> <-> |m+x,0,n-x>
//   W           |1,0,1> <-> |0,1,1>
//   V theta     exp(-i theta (a^dag b + b^dag a))
//   C phi       collisional phase exp(i phi a p)
//   S x         shift pointer level x sites to the right (cyclic)
//   EB / EP     empty level b / level p
//   SPLIT eps   |2,0,0> -> sqrt(1-eps)|2,0,0> + sqrt(eps)|1,1,0>
//   COUNTP      count atoms in the pointer level
//
// '#' starts a comment that runs to the end of the line.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace eqc {

/// U_{m,n}^{m+x,n-x}: swaps the site factors |m,0,n> and |m+x,0,n-x>.
struct PairTransfer {
  int m = 0;
  int n = 0;
  int x = 0;
  friend bool operator==(const PairTransfer&, const PairTransfer&) = default;
};

struct WSwap {
  friend bool operator==(const WSwap&, const WSwap&) = default;
};

struct ABRotation {
  double theta = 0.0;
  friend bool operator==(const ABRotation&, const ABRotation&) = default;
};

struct Collide {
  double phi = 0.0;
  friend bool operator==(const Collide&, const Collide&) = default;
};

struct Shift {
  int x = 0;
  friend bool operator==(const Shift&, const Shift&) = default;
};

struct EmptyB {
  friend bool operator==(const EmptyB&, const EmptyB&) = default;
};

struct EmptyP {
  friend bool operator==(const EmptyP&, const EmptyP&) = default;
};

struct DefectSplit {
  double eps = 0.0;
  friend bool operator==(const DefectSplit&, const DefectSplit&) = default;
};

struct CountP {
  friend bool operator==(const CountP&, const CountP&) = default;
};

using PrimitiveOp = std::variant<PairTransfer, WSwap, ABRotation, Collide,
                                 Shift, EmptyB, EmptyP, DefectSplit, CountP>;

/// U_{from_a,from_p}^{to_a,to_p} in the |a,0,p> notation. Atom number must
/// balance.
PairTransfer transfer(int from_a, int from_p, int to_a, int to_p);

/// Throws std::invalid_argument if the op's parameters are out of domain.
void validate(const PrimitiveOp& op);

/// Ops that map Fock basis states to single Fock basis states (up to phase).
bool is_basis_preserving(const PrimitiveOp& op);

/// Ops that are unitary on the lattice Hilbert space.
bool is_unitary(const PrimitiveOp& op);

std::string to_text(const PrimitiveOp& op);

class ProtocolScript {
 public:
  ProtocolScript() = default;
  ProtocolScript(std::initializer_list<PrimitiveOp> ops) : ops_(ops) {}
  explicit ProtocolScript(std::vector<PrimitiveOp> ops) : ops_(std::move(ops)) {}

  ProtocolScript& push(PrimitiveOp op) {
    ops_.push_back(std::move(op));
    return *this;
  }
  ProtocolScript& append(const ProtocolScript& other);
  /// Appends `block` `times` times.
  ProtocolScript& repeat(const ProtocolScript& block, int times);

  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }
  const PrimitiveOp& operator[](std::size_t i) const { return ops_[i]; }
  auto begin() const { return ops_.begin(); }
  auto end() const { return ops_.end(); }
  const std::vector<PrimitiveOp>& ops() const { return ops_; }

  bool is_basis_preserving() const;

  friend bool operator==(const ProtocolScript&, const ProtocolScript&) = default;

 private:
  std::vector<PrimitiveOp> ops_;
};

class ScriptParseError : public std::runtime_error {
 public:
  ScriptParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

ProtocolScript parse_script(std::string_view text);

/// One op per line. Floating-point arguments are printed in shortest
/// round-trip form, so parse_script(print_script(s)) == s exactly.
std::string print_script(const ProtocolScript& script);

}  // namespace eqc
