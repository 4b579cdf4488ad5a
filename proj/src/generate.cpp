#include "acnkit/generate.hpp"

#include <limits>
#include <vector>

#include "acnkit/acn_codec.hpp"

namespace acnkit {

namespace {

using Rng = std::mt19937_64;

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(xs.size()) - 1))];
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// One generated component: its ASN.1 type text, its ACN entry (without the
// name) and the ACN-inserted fields that must precede it in the enclosing
// SEQUENCE.
struct Piece {
  Piece() = default;
  explicit Piece(std::string type) : asn(std::move(type)) {}

  std::string asn;
  std::string args;
  std::vector<std::string> props;
  std::string children;
  std::vector<std::string> inserted;
  bool optional = false;

  std::string acn_entry(const std::string& name) const {
    std::string out = name + args + " [" + join(props, ", ") + "]";
    if (!children.empty()) out += " " + children;
    return out;
  }
};

class SchemaGen {
 public:
  SchemaGen(Rng& rng, const SchemaLimits& limits) : rng_(rng), lim_(limits) {}

  GeneratedSchema run() {
    Piece root = sequence(0);
    asn_.insert(asn_.begin(), "Root ::= " + root.asn);
    acn_.insert(acn_.begin(), root.acn_entry("Root"));
    GeneratedSchema out;
    out.asn1 = "Gen DEFINITIONS AUTOMATIC TAGS ::= BEGIN\n\n" + join(asn_, "\n") + "\n\nEND\n";
    out.acn = "Gen DEFINITIONS ::= BEGIN\n\n" + join(acn_, "\n") + "\n\nEND\n";
    out.type = "Root";
    return out;
  }

 private:
  // `host` is true when the piece is a SEQUENCE component and may use
  // inserted fields placed before it.
  Piece any(unsigned depth, const std::string& name, bool host) {
    const bool leaf = depth >= lim_.max_depth || chance(rng_, 0.45);
    Piece p;
    if (leaf) {
      switch (uniform(rng_, 0, 6)) {
        case 0: case 1: p = integer(); break;
        case 2: p = Piece{"BOOLEAN"}; break;
        case 3: p = Piece{"NULL"}; break;
        case 4: p = real(); break;
        case 5: p = enumerated(); break;
        default: p = string(name, host); break;
      }
    } else {
      switch (uniform(rng_, 0, 2)) {
        case 0: p = sequence(depth + 1); break;
        case 1: p = choice(depth + 1, name, host); break;
        default: p = list(depth + 1, name, host); break;
      }
    }
    if (p.asn != "NULL" && chance(rng_, 0.15)) {
      p.props.push_back(cat("align-to-next ", pick(rng_, std::vector<std::string>{"byte", "word", "dword"})));
    }
    return p;
  }

  Piece integer() {
    Piece p;
    const int scheme = static_cast<int>(uniform(rng_, 0, 4));
    if (scheme == 4) {
      // Unconstrained INTEGER with a fixed ACN width.
      const int n = static_cast<int>(uniform(rng_, 1, 64));
      p.asn = "INTEGER";
      p.props = {cat("size ", n), chance(rng_, 0.5) ? "encoding twos-complement" : "encoding pos-int"};
      return p;
    }
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    if (scheme == 0) {
      lo = uniform(rng_, -100, 100);
      hi = lo + uniform(rng_, 0, 300);
    } else if (scheme == 1) {
      lo = uniform(rng_, 0, 50);
      hi = lo + uniform(rng_, 0, 70000);
    } else if (scheme == 2) {
      lo = -uniform(rng_, 0, std::int64_t{1} << 40);
      hi = uniform(rng_, 0, std::int64_t{1} << 40);
    } else {
      lo = std::numeric_limits<std::int64_t>::min();
      hi = std::numeric_limits<std::int64_t>::max();
    }
    p.asn = cat("INTEGER (", lo, " .. ", hi, ")");
    const int enc = static_cast<int>(uniform(rng_, 0, 2));
    if (enc == 1 && lo >= 0) {
      const unsigned need = std::max(1u, bits_needed(static_cast<std::uint64_t>(hi)));
      const unsigned n = chance(rng_, 0.5) ? next_byte_width(need)
                                           : static_cast<unsigned>(uniform(rng_, need, 64));
      p.props = {cat("size ", n), "encoding pos-int"};
    } else if (enc == 2 || scheme == 3) {
      unsigned need = 1;
      while (need < 64) {
        const std::int64_t limit = std::int64_t{1} << (need - 1);
        if (lo >= -limit && hi < limit) break;
        ++need;
      }
      const unsigned n = chance(rng_, 0.5) ? next_byte_width(need)
                                           : static_cast<unsigned>(uniform(rng_, need, 64));
      p.props = {cat("size ", n), "encoding twos-complement"};
    }
    return p;
  }

  static unsigned next_byte_width(unsigned need) {
    for (unsigned w : {8u, 16u, 32u, 64u}) {
      if (w >= need) return w;
    }
    return 64;
  }

  Piece real() {
    Piece p{"REAL"};
    if (chance(rng_, 0.5)) p.props.push_back(chance(rng_, 0.5) ? "encoding IEEE754-1985-32" : "encoding IEEE754-1985-64");
    if (chance(rng_, 0.5)) p.props.push_back(chance(rng_, 0.5) ? "endianness little" : "endianness big");
    return p;
  }

  std::vector<std::string> enum_items(const std::vector<std::string>& names) {
    std::vector<std::string> items;
    std::vector<std::int64_t> used;
    const bool explicit_values = chance(rng_, 0.5);
    for (const auto& n : names) {
      if (explicit_values) {
        std::int64_t v = 0;
        do {
          v = uniform(rng_, 0, 200);
        } while (std::find(used.begin(), used.end(), v) != used.end());
        used.push_back(v);
        items.push_back(cat(n, "(", v, ")"));
      } else {
        items.push_back(n);
      }
    }
    return items;
  }

  Piece enumerated() {
    std::vector<std::string> names;
    const auto n = uniform(rng_, 1, 5);
    for (std::int64_t i = 1; i <= n; ++i) names.push_back(cat("item", i));
    Piece p{cat("ENUMERATED { ", join(enum_items(names), ", "), " }")};
    if (chance(rng_, 0.5)) p.props = {"size 8", "encoding pos-int"};
    return p;
  }

  std::string alphabet_constraint() {
    // Printable ranges and sets; '"' is left out so the text needs no escaping.
    std::vector<std::string> parts;
    const auto n = uniform(rng_, 1, 3);
    for (std::int64_t i = 0; i < n; ++i) {
      if (chance(rng_, 0.5)) {
        const char a = static_cast<char>(uniform(rng_, 'A', 'Z'));
        const char b = static_cast<char>(uniform(rng_, a, 'Z'));
        parts.push_back(cat("\"", a, "\" .. \"", b, "\""));
      } else {
        std::string set;
        const auto k = uniform(rng_, 1, 6);
        for (std::int64_t j = 0; j < k; ++j) {
          char c = 0;
          do {
            c = static_cast<char>(uniform(rng_, 0x20, 0x7E));
          } while (c == '"');
          set += c;
        }
        parts.push_back("\"" + set + "\"");
      }
    }
    return " (FROM(" + join(parts, " | ") + "))";
  }

  Piece string(const std::string& name, bool host) {
    const auto lo = uniform(rng_, 0, static_cast<std::int64_t>(lim_.max_string));
    const auto hi = uniform(rng_, std::max<std::int64_t>(lo, 1), static_cast<std::int64_t>(lim_.max_string));
    Piece p{cat("IA5String (SIZE(", lo, " .. ", hi, "))")};
    if (chance(rng_, 0.5)) p.asn += alphabet_constraint();
    const int enc = static_cast<int>(uniform(rng_, 0, host ? 2 : 1));
    if (enc == 1) {
      p.props.push_back("size null-terminated");
      if (chance(rng_, 0.5)) {
        p.props.push_back(cat("termination-pattern '",
                              pick(rng_, std::vector<std::string>{"00", "0D0A", "FF", "0A", "8000"}), "'H"));
      }
    } else if (enc == 2) {
      const std::string len = name + "-len";
      p.inserted.push_back(cat(len, " INTEGER [size ", uniform(rng_, 4, 16), ", encoding pos-int]"));
      p.props.push_back("size " + len);
    }
    return p;
  }

  Piece sequence(unsigned depth) {
    const auto n = uniform(rng_, 1, static_cast<std::int64_t>(lim_.max_fanout));
    std::vector<std::string> asn;
    std::vector<std::string> acn;
    for (std::int64_t i = 1; i <= n; ++i) {
      const std::string name = chance(rng_, 0.3) ? cat("f-", i) : cat("f", i);
      Piece f = any(depth, name, true);
      if (chance(rng_, 0.25)) {
        const std::string flag = name + "-present";
        f.inserted.push_back(flag + " BOOLEAN []");
        f.props.push_back("present-when " + flag);
        f.optional = true;
      }
      asn.push_back(name + " " + f.asn + (f.optional ? " OPTIONAL" : ""));
      for (const auto& ins : f.inserted) acn.push_back(ins);
      acn.push_back(f.acn_entry(name));
    }
    Piece p{"SEQUENCE { " + join(asn, ", ") + " }"};
    p.children = "{ " + join(acn, ", ") + " }";
    return p;
  }

  Piece choice(unsigned depth, const std::string& name, bool host) {
    const auto n = uniform(rng_, 1, static_cast<std::int64_t>(lim_.max_fanout));
    std::vector<std::string> names;
    std::vector<std::string> asn;
    std::vector<std::string> acn;
    for (std::int64_t i = 1; i <= n; ++i) {
      names.push_back(cat("alt", i));
      Piece a = any(depth, names.back(), false);
      asn.push_back(names.back() + " " + a.asn);
      acn.push_back(a.acn_entry(names.back()));
    }
    const std::string body = "CHOICE { " + join(asn, ", ") + " }";
    const std::string children = "{ " + join(acn, ", ") + " }";
    if (!host || !chance(rng_, 0.4)) {
      Piece p{body};
      p.children = children;
      return p;
    }
    // Determinant CHOICE: a parameterized assignment selected by an
    // enumeration that may carry extra, unmapped items.
    const int id = ++next_id_;
    const std::string ctype = cat("Choice", id);
    const std::string etype = cat("Selector", id);
    std::vector<std::string> items = names;
    if (chance(rng_, 0.3)) items.push_back("spare");
    asn_.push_back(cat(etype, " ::= ENUMERATED { ", join(enum_items(items), ", "), " }"));
    asn_.push_back(ctype + " ::= " + body);
    acn_.push_back(etype + (chance(rng_, 0.5) ? " [size 8, encoding pos-int]" : " []"));
    acn_.push_back(cat(ctype, "<", etype, ": sel> [determinant sel] ", children));
    const std::string det = name + "-sel";
    Piece p{ctype};
    p.args = "<" + det + ">";
    p.inserted.push_back(det + " " + etype + " []");
    return p;
  }

  Piece list(unsigned depth, const std::string& name, bool host) {
    const auto lo = uniform(rng_, 0, static_cast<std::int64_t>(lim_.max_list));
    const auto hi = uniform(rng_, std::max<std::int64_t>(lo, 1), static_cast<std::int64_t>(lim_.max_list));
    Piece e = any(depth, "", false);
    Piece p{cat("SEQUENCE (SIZE(", lo, " .. ", hi, ")) OF ", e.asn)};
    p.children = "{ " + e.acn_entry("") + " }";
    if (host && chance(rng_, 0.4)) {
      const std::string len = name + "-count";
      p.inserted.push_back(cat(len, " INTEGER [size ", uniform(rng_, 3, 16), ", encoding pos-int]"));
      p.props.push_back("size " + len);
    }
    return p;
  }

  Rng& rng_;
  SchemaLimits lim_;
  std::vector<std::string> asn_;
  std::vector<std::string> acn_;
  int next_id_ = 0;
};

// ---------------------------------------------------------------------------

class ValueGen {
 public:
  explicit ValueGen(Rng& rng) : rng_(rng) {}

  Value node(const PlanNode& n) {
    switch (n.kind) {
      case PlanKind::kConstraintCheck:
        return Value::integer(edgy(n.min, n.max));
      case PlanKind::kConstrainedNumber:
        return Value::integer(edgy(n.min, n.max));
      case PlanKind::kConstUInt:
      case PlanKind::kUIntBits: {
        const std::int64_t hi = n.width >= 63 ? std::numeric_limits<std::int64_t>::max()
                                              : (std::int64_t{1} << n.width) - 1;
        return Value::integer(edgy(0, hi));
      }
      case PlanKind::kTwosComplement: {
        if (n.width >= 64) {
          return Value::integer(edgy(std::numeric_limits<std::int64_t>::min(),
                                     std::numeric_limits<std::int64_t>::max()));
        }
        const std::int64_t limit = std::int64_t{1} << (n.width - 1);
        return Value::integer(edgy(-limit, limit - 1));
      }
      case PlanKind::kReal: {
        std::uint64_t p = rng_();
        if (n.width == 32) p &= 0xFFFFFFFFu;
        if (chance(rng_, 0.2)) p = n.width == 32 ? 0x7FC00001u : 0x7FF8000000000001u;
        return Value::real(p, n.width);
      }
      case PlanKind::kBool:
        return Value::boolean(chance(rng_, 0.5));
      case PlanKind::kNull:
        return Value::null();
      case PlanKind::kEnumerated:
        return Value::enumerated(pick(rng_, n.items).name);
      case PlanKind::kStringAsciiNull:
      case PlanKind::kStringCharIndex:
        return string(n);
      case PlanKind::kAlign:
      case PlanKind::kOutlined:
        return node(*n.child);
      case PlanKind::kRecord: {
        std::vector<RecordField> fields;
        for (const auto& f : n.fields) {
          if (f.inserted) continue;
          if (f.optional && chance(rng_, 0.5)) continue;
          fields.push_back({f.name, node(*f.node)});
        }
        return Value::record(std::move(fields));
      }
      case PlanKind::kVariant: {
        const auto& a = pick(rng_, n.alternatives);
        return Value::variant(a.name, node(*a.node));
      }
      case PlanKind::kList: {
        const auto len = edgy(n.min, n.max);
        std::vector<Value> items;
        for (std::int64_t i = 0; i < len; ++i) items.push_back(node(*n.child));
        return Value::list(std::move(items));
      }
    }
    return Value::null();
  }

 private:
  std::int64_t edgy(std::int64_t lo, std::int64_t hi) {
    switch (uniform(rng_, 0, 5)) {
      case 0: return lo;
      case 1: return hi;
      default: return uniform(rng_, lo, hi);
    }
  }

  Value string(const PlanNode& n) {
    for (int attempt = 0;; ++attempt) {
      const auto len = attempt < 32 ? edgy(n.min, n.max) : n.min;
      std::vector<std::uint8_t> s;
      for (std::int64_t i = 0; i < len; ++i) {
        s.push_back(static_cast<std::uint8_t>(
            n.alphabet->at(static_cast<std::size_t>(uniform(rng_, 0, static_cast<std::int64_t>(n.alphabet->size()) - 1)))));
      }
      if (n.kind != PlanKind::kStringAsciiNull || terminator_is_unambiguous(s, n.terminator) ||
          attempt >= 64) {
        return Value::string(std::move(s));
      }
    }
  }

  Rng& rng_;
};

}  // namespace

GeneratedSchema random_schema(std::mt19937_64& rng, const SchemaLimits& limits) {
  return SchemaGen(rng, limits).run();
}

Value random_value(const CodecPlan& plan, std::mt19937_64& rng) { return ValueGen(rng).node(*plan.root); }

}  // namespace acnkit
