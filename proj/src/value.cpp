#include "acnkit/value.hpp"

#include <cstdio>
#include <nlohmann/json.hpp>

namespace acnkit {

using Json = nlohmann::ordered_json;

Value Value::record(std::vector<RecordField> fields) { return Value(RecordV{std::move(fields)}); }

Value Value::variant(std::string name, Value inner) {
  return Value(VariantV{std::move(name), Box<Value>(std::move(inner))});
}

Value Value::list(std::vector<Value> items) { return Value(ListV{std::move(items)}); }

std::string_view Value::kind_name() const {
  static constexpr std::string_view names[] = {"null", "boolean", "integer", "enumerated", "string",
                                               "real", "record",  "variant", "list"};
  return names[data_.index()];
}

const Value* Value::field(std::string_view name) const {
  const auto* r = get_if<RecordV>();
  if (!r) return nullptr;
  for (const auto& f : r->fields) {
    if (f.name == name) return &f.value;
  }
  return nullptr;
}

bool operator==(const RecordField& a, const RecordField& b) {
  return a.name == b.name && a.value == b.value;
}

bool operator==(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.data_);
        if constexpr (std::is_same_v<T, NullV>) {
          return true;
        } else if constexpr (std::is_same_v<T, BoolV> || std::is_same_v<T, IntV>) {
          return x.v == y.v;
        } else if constexpr (std::is_same_v<T, EnumV>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, StrV>) {
          return x.bytes == y.bytes;
        } else if constexpr (std::is_same_v<T, RealV>) {
          return x.pattern == y.pattern && x.width == y.width;
        } else if constexpr (std::is_same_v<T, RecordV>) {
          return x.fields == y.fields;
        } else if constexpr (std::is_same_v<T, VariantV>) {
          return x.name == y.name && *x.inner == *y.inner;
        } else {
          return x.items == y.items;
        }
      },
      a.data_);
}

namespace {

// Latin-1 bytes <-> UTF-8 text, so JSON escapes map one-to-one onto bytes.
std::string latin1_to_utf8(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  for (auto b : bytes) {
    if (b < 0x80) {
      out.push_back(static_cast<char>(b));
    } else {
      out.push_back(static_cast<char>(0xC0 | (b >> 6)));
      out.push_back(static_cast<char>(0x80 | (b & 0x3F)));
    }
  }
  return out;
}

Result<std::vector<std::uint8_t>> utf8_to_latin1(const std::string& s) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      out.push_back(c);
      ++i;
    } else if ((c & 0xE0) == 0xC0 && i + 1 < s.size()) {
      const unsigned cp = ((c & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
      if (cp > 0xFF) {
        return make_error(ErrorCode::kSyntax, "string character U+", std::hex, cp,
                          " is outside the byte range");
      }
      out.push_back(static_cast<std::uint8_t>(cp));
      i += 2;
    } else {
      return make_error(ErrorCode::kSyntax, "string contains a character outside the byte range");
    }
  }
  return out;
}

Result<std::uint64_t> parse_hex_pattern(const std::string& s, unsigned width) {
  if (s.empty() || s.size() > width / 4) {
    return make_error(ErrorCode::kSyntax, "real pattern '", s, "' must have 1 to ", width / 4,
                      " hex digits");
  }
  std::uint64_t v = 0;
  for (char c : s) {
    int d = -1;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    if (d < 0) return make_error(ErrorCode::kSyntax, "real pattern '", s, "' is not hex");
    v = (v << 4) | static_cast<unsigned>(d);
  }
  return v;
}

bool is_real_object(const Json& j) {
  return j.is_object() && j.size() == 2 && j.contains("pattern") && j.contains("width") &&
         j["pattern"].is_string() && j["width"].is_number_integer();
}

Result<Value> from_json(const Json& j, const std::string& path) {
  auto where = [&] { return path.empty() ? std::string("top level") : path; };
  switch (j.type()) {
    case Json::value_t::null:
      return Value::null();
    case Json::value_t::boolean:
      return Value::boolean(j.get<bool>());
    case Json::value_t::number_integer:
      return Value::integer(j.get<std::int64_t>());
    case Json::value_t::number_unsigned: {
      const auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        return make_error(ErrorCode::kSyntax, "integer at ", where(), " exceeds 64-bit range");
      }
      return Value::integer(static_cast<std::int64_t>(u));
    }
    case Json::value_t::number_float:
      return make_error(ErrorCode::kSyntax, "number at ", where(),
                        " is not an integer; write reals as {\"pattern\", \"width\"}");
    case Json::value_t::string: {
      auto bytes = utf8_to_latin1(j.get<std::string>());
      if (!bytes.ok()) {
        return make_error(ErrorCode::kSyntax, bytes.error().message, " at ", where());
      }
      return Value::string(std::move(bytes).value());
    }
    case Json::value_t::array: {
      std::vector<Value> items;
      for (std::size_t i = 0; i < j.size(); ++i) {
        ACNKIT_ASSIGN_OR_RETURN(Value item, from_json(j[i], cat(path, "[", i, "]")));
        items.push_back(std::move(item));
      }
      return Value::list(std::move(items));
    }
    case Json::value_t::object: {
      if (is_real_object(j)) {
        const auto width = j["width"].get<std::int64_t>();
        if (width != 32 && width != 64) {
          return make_error(ErrorCode::kSyntax, "real width at ", where(), " must be 32 or 64");
        }
        ACNKIT_ASSIGN_OR_RETURN(std::uint64_t pattern,
                                parse_hex_pattern(j["pattern"].get<std::string>(),
                                                  static_cast<unsigned>(width)));
        return Value::real(pattern, static_cast<unsigned>(width));
      }
      if (j.size() == 1) {
        const auto it = j.begin();
        ACNKIT_ASSIGN_OR_RETURN(Value inner,
                                from_json(it.value(), path.empty() ? it.key() : path + "." + it.key()));
        return Value::variant(it.key(), std::move(inner));
      }
      std::vector<RecordField> fields;
      for (auto it = j.begin(); it != j.end(); ++it) {
        ACNKIT_ASSIGN_OR_RETURN(Value v,
                                from_json(it.value(), path.empty() ? it.key() : path + "." + it.key()));
        fields.push_back({it.key(), std::move(v)});
      }
      return Value::record(std::move(fields));
    }
    default:
      return make_error(ErrorCode::kSyntax, "unsupported JSON value at ", where());
  }
}

Json to_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NullV>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, BoolV>) {
          return x.v;
        } else if constexpr (std::is_same_v<T, IntV>) {
          return x.v;
        } else if constexpr (std::is_same_v<T, EnumV>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, StrV>) {
          return latin1_to_utf8(x.bytes);
        } else if constexpr (std::is_same_v<T, RealV>) {
          char buf[24];
          std::snprintf(buf, sizeof buf, "%0*llx", static_cast<int>(x.width / 4),
                        static_cast<unsigned long long>(x.pattern));
          Json j = Json::object();
          j["pattern"] = std::string(buf);
          j["width"] = x.width;
          return j;
        } else if constexpr (std::is_same_v<T, RecordV>) {
          Json j = Json::object();
          for (const auto& f : x.fields) j[f.name] = to_json(f.value);
          return j;
        } else if constexpr (std::is_same_v<T, VariantV>) {
          Json j = Json::object();
          j[x.name] = to_json(*x.inner);
          return j;
        } else {
          Json j = Json::array();
          for (const auto& item : x.items) j.push_back(to_json(item));
          return j;
        }
      },
      v.data());
}

}  // namespace

Result<Value> parse_value_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    Error err{ErrorCode::kSyntax, e.what(), {}};
    // Map the byte offset onto line and column.
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    SourceSpan span{1, 1, static_cast<std::uint32_t>(pos), 1};
    for (std::size_t i = 0; i + 1 < pos; ++i) {
      if (text[i] == '\n') {
        ++span.line;
        span.column = 1;
      } else {
        ++span.column;
      }
    }
    err.diagnostics.push_back({span, "malformed JSON value", SourceKind::kValue});
    return err;
  }
  return from_json(j, "");
}

std::string print_value_json(const Value& v, int indent) {
  return to_json(v).dump(indent, ' ', true);
}

}  // namespace acnkit
