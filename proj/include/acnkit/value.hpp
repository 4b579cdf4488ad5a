#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "acnkit/result.hpp"

namespace acnkit {

// Deep-copying owning pointer, for recursive value types.
template <typename T>
class Box {
 public:
  Box() : p_(std::make_unique<T>()) {}
  Box(T v) : p_(std::make_unique<T>(std::move(v))) {}
  Box(const Box& o) : p_(std::make_unique<T>(*o.p_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& o) {
    if (this != &o) p_ = std::make_unique<T>(*o.p_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *p_; }
  const T& operator*() const { return *p_; }
  T* operator->() { return p_.get(); }
  const T* operator->() const { return p_.get(); }

 private:
  std::unique_ptr<T> p_;
};

class Value;
struct RecordField;

struct NullV {};
struct BoolV {
  bool v = false;
};
struct IntV {
  std::int64_t v = 0;
};
struct EnumV {
  std::string name;
};
struct StrV {
  std::vector<std::uint8_t> bytes;
};
// IEEE-754 values are kept as raw bit patterns so NaN payloads survive.
struct RealV {
  std::uint64_t pattern = 0;
  unsigned width = 64;
};
struct RecordV {
  std::vector<RecordField> fields;
};
struct VariantV {
  std::string name;
  Box<Value> inner;
};
struct ListV {
  std::vector<Value> items;
};

class Value {
 public:
  using Data = std::variant<NullV, BoolV, IntV, EnumV, StrV, RealV, RecordV, VariantV, ListV>;

  Value() = default;
  Value(Data d) : data_(std::move(d)) {}

  static Value null() { return Value(NullV{}); }
  static Value boolean(bool b) { return Value(BoolV{b}); }
  static Value integer(std::int64_t v) { return Value(IntV{v}); }
  static Value enumerated(std::string name) { return Value(EnumV{std::move(name)}); }
  static Value string(std::vector<std::uint8_t> bytes) { return Value(StrV{std::move(bytes)}); }
  static Value string(std::string_view s) { return Value(StrV{{s.begin(), s.end()}}); }
  static Value real(std::uint64_t pattern, unsigned width) { return Value(RealV{pattern, width}); }
  static Value record(std::vector<RecordField> fields);
  static Value variant(std::string name, Value inner);
  static Value list(std::vector<Value> items);

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(data_);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(data_);
  }
  template <typename T>
  T& as() {
    return std::get<T>(data_);
  }
  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&data_);
  }

  const Data& data() const { return data_; }
  Data& data() { return data_; }
  std::string_view kind_name() const;

  // Field lookup on records; nullptr when absent or not a record.
  const Value* field(std::string_view name) const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  Data data_;
};

struct RecordField {
  std::string name;
  Value value;
};

bool operator==(const RecordField& a, const RecordField& b);

// JSON value notation. Records are objects, CHOICE values single-key
// objects, SEQUENCE OF arrays, NULL is null, enumerated values and strings
// are JSON strings (one character per byte, Latin-1), and reals are
// {"pattern": "<hex>", "width": 32|64}.
Result<Value> parse_value_json(std::string_view text);
// indent < 0 prints on one line.
std::string print_value_json(const Value& v, int indent = 2);

}  // namespace acnkit
