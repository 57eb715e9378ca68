// Runtime values and the finite type system: bool, bounded int, enum literal.
#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>
#include <algorithm>
#include <stdexcept>

namespace ebsm {

struct EnumLit {
  std::string name;
  friend bool operator==(const EnumLit&, const EnumLit&) = default;
  friend auto operator<=>(const EnumLit&, const EnumLit&) = default;
};

using Value = std::variant<bool, std::int64_t, EnumLit>;

inline bool is_bool(const Value& v) { return std::holds_alternative<bool>(v); }
inline bool is_int(const Value& v) { return std::holds_alternative<std::int64_t>(v); }
inline bool is_enum(const Value& v) { return std::holds_alternative<EnumLit>(v); }

/// Render a value the way the simulation console does: TRUE/FALSE, decimal,
/// or the bare enum literal.
inline std::string render_value(const Value& v) {
  if (is_bool(v)) return std::get<bool>(v) ? "TRUE" : "FALSE";
  if (is_int(v)) return std::to_string(std::get<std::int64_t>(v));
  return std::get<EnumLit>(v).name;
}

struct SemType {
  enum class Kind { Bool, Int, Enum };
  Kind kind = Kind::Bool;
  std::int64_t lo = 0, hi = 0;        // Int: inclusive bounds
  std::vector<std::string> literals;  // Enum

  static SemType boolean() { return {Kind::Bool, 0, 0, {}}; }
  static SemType bounded_int(std::int64_t lo, std::int64_t hi) {
    return {Kind::Int, lo, hi, {}};
  }
  static SemType enumeration(std::vector<std::string> lits) {
    return {Kind::Enum, 0, 0, std::move(lits)};
  }

  bool contains(const Value& v) const {
    switch (kind) {
      case Kind::Bool: return is_bool(v);
      case Kind::Int:
        return is_int(v) && std::get<std::int64_t>(v) >= lo &&
               std::get<std::int64_t>(v) <= hi;
      case Kind::Enum:
        return is_enum(v) &&
               std::find(literals.begin(), literals.end(),
                         std::get<EnumLit>(v).name) != literals.end();
    }
    return false;
  }

  // Cardinality of the domain; used by the finite-domain analyzer.
  std::uint64_t cardinality() const {
    switch (kind) {
      case Kind::Bool: return 2;
      case Kind::Int: return static_cast<std::uint64_t>(hi - lo + 1);
      case Kind::Enum: return literals.size();
    }
    return 0;
  }

  // i-th element of the domain, 0 <= i < cardinality().
  Value nth(std::uint64_t i) const {
    switch (kind) {
      case Kind::Bool: return Value{i != 0};
      case Kind::Int: return Value{lo + static_cast<std::int64_t>(i)};
      case Kind::Enum: return Value{EnumLit{literals[i]}};
    }
    throw std::logic_error("bad SemType");
  }

  friend bool operator==(const SemType&, const SemType&) = default;
};

}  // namespace ebsm
