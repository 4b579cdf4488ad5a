#include "acnkit/plan.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

namespace acnkit {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kKindNames[] = {
    "ConstUInt", "UIntBits", "TwosComplement",  "ConstrainedNumber", "Real", "Bool",
    "Null",      "Enumerated", "StringAsciiNull", "StringCharIndex", "Align", "Record",
    "Variant",   "List",     "Outlined",        "ConstraintCheck",
};

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t r = a + b;
  return r < a ? std::numeric_limits<std::uint64_t>::max() : r;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t span_of(std::int64_t lo, std::int64_t hi) {
  return static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
}

bool is_int_kind(PlanKind k) {
  return k == PlanKind::kConstUInt || k == PlanKind::kUIntBits || k == PlanKind::kTwosComplement ||
         k == PlanKind::kConstrainedNumber;
}

}  // namespace

std::string alignment_name(unsigned alignment) {
  return alignment <= 1 ? "none" : cat("mod", alignment);
}

std::string_view to_string(PlanKind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<PlanKind> plan_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == name) return static_cast<PlanKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(SlotKind kind) {
  switch (kind) {
    case SlotKind::kInteger: return "integer";
    case SlotKind::kEnumerated: return "enumerated";
    case SlotKind::kBoolean: return "boolean";
  }
  return "?";
}

const PlanItem* PlanNode::item_by_name(std::string_view item) const {
  for (const auto& it : items) {
    if (it.name == item) return &it;
  }
  return nullptr;
}

const PlanItem* PlanNode::item_by_value(std::int64_t value) const {
  for (const auto& it : items) {
    if (it.value == value) return &it;
  }
  return nullptr;
}

const PlanSlot* CodecPlan::find_slot(std::string_view name) const {
  for (const auto& s : slots) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const PlanNode& strip_wrappers(const PlanNode& node) {
  const PlanNode* n = &node;
  while ((n->kind == PlanKind::kAlign || n->kind == PlanKind::kConstraintCheck ||
          n->kind == PlanKind::kOutlined) &&
         n->child) {
    n = n->child.get();
  }
  return *n;
}

SizeBounds compute_bounds(const PlanNode& n) {
  auto fixed = [](std::uint64_t w) { return SizeBounds{w, w, 1}; };
  switch (n.kind) {
    case PlanKind::kConstUInt:
    case PlanKind::kUIntBits:
    case PlanKind::kTwosComplement:
    case PlanKind::kReal:
      return fixed(n.width);
    case PlanKind::kConstrainedNumber:
      return fixed(bits_needed(span_of(n.min, n.max)));
    case PlanKind::kBool:
      return fixed(1);
    case PlanKind::kNull:
      return fixed(0);
    case PlanKind::kEnumerated:
    case PlanKind::kOutlined:
    case PlanKind::kConstraintCheck:
      return n.child ? n.child->bounds : SizeBounds{};
    case PlanKind::kStringAsciiNull: {
      const std::uint64_t plen = n.terminator.size();
      return {sat_mul(sat_add(static_cast<std::uint64_t>(n.min), plen), 8),
              sat_mul(sat_add(static_cast<std::uint64_t>(n.max), plen), 8), 1};
    }
    case PlanKind::kStringCharIndex: {
      const unsigned bpc = n.alphabet ? n.alphabet->bits_per_char() : 0;
      const unsigned len = n.slot.empty() ? bits_needed(span_of(n.min, n.max)) : 0;
      return {sat_add(len, sat_mul(static_cast<std::uint64_t>(n.min), bpc)),
              sat_add(len, sat_mul(static_cast<std::uint64_t>(n.max), bpc)), 1};
    }
    case PlanKind::kAlign: {
      const SizeBounds c = n.child ? n.child->bounds : SizeBounds{};
      return {c.min_bits, sat_add(c.max_bits, n.width - 1), std::max(n.width, c.alignment)};
    }
    case PlanKind::kRecord: {
      SizeBounds b{0, 0, 1};
      for (const auto& f : n.fields) {
        if (!f.node) continue;
        if (!f.optional) b.min_bits = sat_add(b.min_bits, f.node->bounds.min_bits);
        b.max_bits = sat_add(b.max_bits, f.node->bounds.max_bits);
        b.alignment = std::max(b.alignment, f.node->bounds.alignment);
      }
      return b;
    }
    case PlanKind::kVariant: {
      if (n.alternatives.empty()) return {};
      const unsigned idx = n.slot.empty() ? bits_needed(n.alternatives.size() - 1) : 0;
      SizeBounds b{std::numeric_limits<std::uint64_t>::max(), 0, 1};
      for (const auto& a : n.alternatives) {
        if (!a.node) continue;
        b.min_bits = std::min(b.min_bits, a.node->bounds.min_bits);
        b.max_bits = std::max(b.max_bits, a.node->bounds.max_bits);
        b.alignment = std::max(b.alignment, a.node->bounds.alignment);
      }
      b.min_bits = sat_add(b.min_bits, idx);
      b.max_bits = sat_add(b.max_bits, idx);
      return b;
    }
    case PlanKind::kList: {
      const SizeBounds e = n.child ? n.child->bounds : SizeBounds{};
      const unsigned len = n.slot.empty() ? bits_needed(span_of(n.min, n.max)) : 0;
      return {sat_add(len, sat_mul(static_cast<std::uint64_t>(n.min), e.min_bits)),
              sat_add(len, sat_mul(static_cast<std::uint64_t>(n.max), e.max_bits)), e.alignment};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Validation

namespace {

Error plan_error(const std::string& where, const std::string& message) {
  return make_error(ErrorCode::kPlanFormat, where.empty() ? "plan" : where, ": ", message);
}

std::optional<SlotKind> produced_kind(const PlanNode& n) {
  const PlanNode& s = strip_wrappers(n);
  if (is_int_kind(s.kind)) return SlotKind::kInteger;
  if (s.kind == PlanKind::kEnumerated) return SlotKind::kEnumerated;
  if (s.kind == PlanKind::kBool) return SlotKind::kBoolean;
  return std::nullopt;
}

bool value_fits(const PlanNode& c, std::int64_t v) {
  switch (c.kind) {
    case PlanKind::kConstrainedNumber:
      return v >= c.min && v <= c.max;
    case PlanKind::kConstUInt:
    case PlanKind::kUIntBits:
      return v >= 0 && (c.width >= 64 || static_cast<std::uint64_t>(v) < (std::uint64_t{1} << c.width));
    case PlanKind::kTwosComplement: {
      if (c.width >= 64) return true;
      const std::int64_t limit = std::int64_t{1} << (c.width - 1);
      return v >= -limit && v < limit;
    }
    default:
      return false;
  }
}

class Validator {
 public:
  explicit Validator(const CodecPlan& plan) : plan_(plan) {}

  Status run() {
    if (plan_.type_name.empty()) return plan_error("", "missing type name");
    for (const auto& s : plan_.slots) {
      if (s.name.empty()) return plan_error("slots", "empty slot name");
      if (!declared_.emplace(s.name, s.kind).second) {
        return plan_error("slots", cat("slot '", s.name, "' declared twice"));
      }
    }
    if (!plan_.root) return plan_error("root", "missing node");
    ACNKIT_TRY(node(*plan_.root, "root"));
    for (const auto& s : plan_.slots) {
      if (!producers_.count(s.name)) {
        return plan_error("slots", cat("slot '", s.name, "' has no producer"));
      }
    }
    for (std::size_t i = 0; i < plan_.slots.size(); ++i) {
      if (order_[i] != plan_.slots[i].name) {
        return plan_error("slots", "slots are not listed in producer order");
      }
    }
    return {};
  }

 private:
  Status consume(const std::string& slot, SlotKind kind, const std::string& where) {
    auto d = declared_.find(slot);
    if (d == declared_.end()) return plan_error(where, cat("undeclared slot '", slot, "'"));
    if (d->second != kind) {
      return plan_error(where, cat("slot '", slot, "' is ", to_string(d->second), ", expected ",
                                   to_string(kind)));
    }
    if (std::find(visible_.begin(), visible_.end(), slot) == visible_.end()) {
      return plan_error(where, producers_.count(slot)
                                   ? cat("slot '", slot, "' is out of scope here")
                                   : cat("slot '", slot, "' is used before its producer"));
    }
    return {};
  }

  Status child(const PlanNode& n, const std::string& where) {
    if (!n.child) return plan_error(where, "missing child node");
    return node(*n.child, where + ".node");
  }

  Status node(const PlanNode& n, const std::string& where) {
    switch (n.kind) {
      case PlanKind::kConstUInt:
        if (n.width != 8 && n.width != 16 && n.width != 32 && n.width != 64) {
          return plan_error(where, cat("ConstUInt width ", n.width, " is not 8, 16, 32 or 64"));
        }
        if (n.endianness != Endianness::kBig) return plan_error(where, "integers are big-endian");
        break;
      case PlanKind::kUIntBits:
      case PlanKind::kTwosComplement:
        if (n.width < 1 || n.width > 64) return plan_error(where, cat("width ", n.width, " is outside 1..64"));
        break;
      case PlanKind::kConstrainedNumber:
      case PlanKind::kConstraintCheck:
        if (n.min > n.max) return plan_error(where, "min exceeds max");
        if (n.kind == PlanKind::kConstraintCheck) {
          ACNKIT_TRY(child(n, where));
          if (!is_int_kind(n.child->kind)) {
            return plan_error(where, "ConstraintCheck must wrap an integer node");
          }
        }
        break;
      case PlanKind::kReal:
        if (n.width != 32 && n.width != 64) return plan_error(where, "Real width must be 32 or 64");
        break;
      case PlanKind::kBool:
      case PlanKind::kNull:
        break;
      case PlanKind::kEnumerated: {
        if (n.items.empty()) return plan_error(where, "Enumerated without items");
        std::set<std::string> names;
        std::set<std::int64_t> values;
        for (const auto& it : n.items) {
          if (it.name.empty() || !names.insert(it.name).second || !values.insert(it.value).second) {
            return plan_error(where, cat("duplicate or empty item '", it.name, "'"));
          }
        }
        ACNKIT_TRY(child(n, where));
        if (!is_int_kind(n.child->kind)) return plan_error(where, "Enumerated needs an integer node");
        for (const auto& it : n.items) {
          if (!value_fits(*n.child, it.value)) {
            return plan_error(where, cat("item '", it.name, "' does not fit the integer node"));
          }
        }
        break;
      }
      case PlanKind::kStringAsciiNull:
      case PlanKind::kStringCharIndex:
        if (n.min < 0 || n.min > n.max) return plan_error(where, "bad length range");
        if (!n.alphabet) return plan_error(where, "missing alphabet");
        if (n.kind == PlanKind::kStringAsciiNull) {
          if (n.terminator.empty() || n.terminator.size() > 8) {
            return plan_error(where, "terminator must be 1 to 8 bytes");
          }
        } else if (!n.slot.empty()) {
          ACNKIT_TRY(consume(n.slot, SlotKind::kInteger, where));
        }
        break;
      case PlanKind::kAlign:
        if (n.width != 8 && n.width != 16 && n.width != 32) {
          return plan_error(where, cat("Align to ", n.width, " is not 8, 16 or 32"));
        }
        ACNKIT_TRY(child(n, where));
        break;
      case PlanKind::kRecord:
        ACNKIT_TRY(record(n, where));
        break;
      case PlanKind::kVariant:
        ACNKIT_TRY(variant(n, where));
        break;
      case PlanKind::kList:
        if (n.min < 0 || n.min > n.max) return plan_error(where, "bad length range");
        if (!n.slot.empty()) ACNKIT_TRY(consume(n.slot, SlotKind::kInteger, where));
        if (!n.child) return plan_error(where, "missing element node");
        ACNKIT_TRY(node(*n.child, where + ".element"));
        break;
      case PlanKind::kOutlined: {
        if (n.name.empty()) return plan_error(where, "Outlined without a name");
        if (!outlined_.insert(n.name).second) {
          return plan_error(where, cat("Outlined name '", n.name, "' is not unique"));
        }
        std::set<std::string> params;
        for (const auto& p : n.params) {
          if (p.param.empty() || !params.insert(p.param).second) {
            return plan_error(where, cat("bad parameter '", p.param, "'"));
          }
          auto d = declared_.find(p.slot);
          if (d == declared_.end()) return plan_error(where, cat("undeclared slot '", p.slot, "'"));
          ACNKIT_TRY(consume(p.slot, d->second, where));
        }
        if (!n.child) return plan_error(where, "missing body");
        ACNKIT_TRY(node(*n.child, where + ".body"));
        break;
      }
    }
    const SizeBounds expect = compute_bounds(n);
    if (!(expect == n.bounds)) {
      return plan_error(where, cat("bounds (", n.bounds.min_bits, ", ", n.bounds.max_bits, ", ",
                                   alignment_name(n.bounds.alignment), ") differ from computed (",
                                   expect.min_bits, ", ", expect.max_bits, ", ",
                                   alignment_name(expect.alignment), ")"));
    }
    if (n.bounds.max_bits > kMaxPlanBits) return plan_error(where, "bounds exceed 2^48 bits");
    return {};
  }

  Status record(const PlanNode& n, const std::string& where) {
    const std::size_t mark = visible_.size();
    std::set<std::string> names;
    for (std::size_t i = 0; i < n.fields.size(); ++i) {
      const PlanField& f = n.fields[i];
      const std::string at = cat(where, ".fields[", i, "]");
      if (f.name.empty() || !names.insert(f.name).second) {
        return plan_error(at, cat("duplicate or empty field name '", f.name, "'"));
      }
      if (f.inserted && f.optional) return plan_error(at, "inserted fields cannot be optional");
      if (f.optional != !f.present_slot.empty()) {
        return plan_error(at, "optional fields need a presence slot, and only they may have one");
      }
      if (f.optional && !f.produces.empty()) {
        return plan_error(at, "an optional field cannot produce a slot");
      }
      if (!f.present_slot.empty()) ACNKIT_TRY(consume(f.present_slot, SlotKind::kBoolean, at));
      if (!f.node) return plan_error(at, "missing node");
      ACNKIT_TRY(node(*f.node, at + ".node"));
      if (!f.produces.empty()) {
        auto d = declared_.find(f.produces);
        if (d == declared_.end()) return plan_error(at, cat("undeclared slot '", f.produces, "'"));
        if (producers_.count(f.produces)) {
          return plan_error(at, cat("slot '", f.produces, "' has two producers"));
        }
        if (produced_kind(*f.node) != d->second) {
          return plan_error(at, cat("field does not produce a ", to_string(d->second), " value"));
        }
        producers_[f.produces] = &strip_wrappers(*f.node);
        order_.push_back(f.produces);
        visible_.push_back(f.produces);
      }
    }
    visible_.resize(mark);
    return {};
  }

  Status variant(const PlanNode& n, const std::string& where) {
    if (n.alternatives.empty()) return plan_error(where, "Variant without alternatives");
    const PlanNode* producer = nullptr;
    if (!n.slot.empty()) {
      ACNKIT_TRY(consume(n.slot, SlotKind::kEnumerated, where));
      producer = producers_.at(n.slot);
    }
    std::set<std::string> names;
    std::set<std::string> whens;
    for (std::size_t i = 0; i < n.alternatives.size(); ++i) {
      const PlanAlternative& a = n.alternatives[i];
      const std::string at = cat(where, ".alternatives[", i, "]");
      if (a.name.empty() || !names.insert(a.name).second) {
        return plan_error(at, cat("duplicate or empty alternative '", a.name, "'"));
      }
      if (producer) {
        if (!producer->item_by_name(a.when)) {
          return plan_error(at, cat("'", a.when, "' is not an item of slot '", n.slot, "'"));
        }
        if (!whens.insert(a.when).second) {
          return plan_error(at, cat("item '", a.when, "' selects two alternatives"));
        }
      } else if (!a.when.empty()) {
        return plan_error(at, "'when' needs a determinant slot");
      }
      if (!a.node) return plan_error(at, "missing node");
      ACNKIT_TRY(node(*a.node, at + ".node"));
    }
    return {};
  }

  const CodecPlan& plan_;
  std::map<std::string, SlotKind> declared_;
  std::map<std::string, const PlanNode*> producers_;
  std::vector<std::string> order_;
  std::vector<std::string> visible_;
  std::set<std::string> outlined_;
};

}  // namespace

Status validate_plan(const CodecPlan& plan) { return Validator(plan).run(); }

// ---------------------------------------------------------------------------
// Dump and load

namespace {

std::string hex_bytes(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

// Alphabet as ascending inclusive code ranges: [[lo, hi], ...].
Json alphabet_json(const Alphabet& a) {
  Json out = Json::array();
  const auto chars = a.chars();
  std::size_t i = 0;
  while (i < chars.size()) {
    std::size_t j = i;
    while (j + 1 < chars.size() && chars[j + 1] == chars[j] + 1) ++j;
    out.push_back(Json::array({static_cast<int>(chars[i]), static_cast<int>(chars[j])}));
    i = j + 1;
  }
  return out;
}

Json bounds_json(const SizeBounds& b) {
  Json j = Json::object();
  j["min"] = b.min_bits;
  j["max"] = b.max_bits;
  j["alignment"] = alignment_name(b.alignment);
  return j;
}

Json node_json(const PlanNode& n) {
  Json j = Json::object();
  j["kind"] = std::string(to_string(n.kind));
  j["bounds"] = bounds_json(n.bounds);
  switch (n.kind) {
    case PlanKind::kConstUInt:
    case PlanKind::kReal:
      j["width"] = n.width;
      j["endianness"] = std::string(to_string(n.endianness));
      break;
    case PlanKind::kUIntBits:
    case PlanKind::kTwosComplement:
      j["width"] = n.width;
      break;
    case PlanKind::kConstrainedNumber:
      j["min"] = n.min;
      j["max"] = n.max;
      break;
    case PlanKind::kBool:
    case PlanKind::kNull:
      break;
    case PlanKind::kEnumerated: {
      Json items = Json::array();
      for (const auto& it : n.items) items.push_back(Json{{"name", it.name}, {"value", it.value}});
      j["items"] = std::move(items);
      j["encoding"] = node_json(*n.child);
      break;
    }
    case PlanKind::kStringAsciiNull:
      j["minLength"] = n.min;
      j["maxLength"] = n.max;
      j["terminator"] = hex_bytes(n.terminator);
      j["alphabet"] = alphabet_json(*n.alphabet);
      break;
    case PlanKind::kStringCharIndex:
      j["minLength"] = n.min;
      j["maxLength"] = n.max;
      j["alphabet"] = alphabet_json(*n.alphabet);
      if (!n.slot.empty()) j["lengthSlot"] = n.slot;
      break;
    case PlanKind::kAlign:
      j["to"] = n.width;
      j["node"] = node_json(*n.child);
      break;
    case PlanKind::kRecord: {
      Json fields = Json::array();
      for (const auto& f : n.fields) {
        Json fj = Json::object();
        fj["name"] = f.name;
        if (f.inserted) fj["inserted"] = true;
        if (f.optional) fj["optional"] = true;
        if (!f.present_slot.empty()) fj["presentSlot"] = f.present_slot;
        if (!f.produces.empty()) fj["produces"] = f.produces;
        fj["node"] = node_json(*f.node);
        fields.push_back(std::move(fj));
      }
      j["fields"] = std::move(fields);
      break;
    }
    case PlanKind::kVariant: {
      if (!n.slot.empty()) j["determinantSlot"] = n.slot;
      Json alts = Json::array();
      for (const auto& a : n.alternatives) {
        Json aj = Json::object();
        aj["name"] = a.name;
        if (!a.when.empty()) aj["when"] = a.when;
        aj["node"] = node_json(*a.node);
        alts.push_back(std::move(aj));
      }
      j["alternatives"] = std::move(alts);
      break;
    }
    case PlanKind::kList:
      j["minLength"] = n.min;
      j["maxLength"] = n.max;
      if (!n.slot.empty()) j["sizeSlot"] = n.slot;
      j["element"] = node_json(*n.child);
      break;
    case PlanKind::kOutlined: {
      j["name"] = n.name;
      Json params = Json::array();
      for (const auto& p : n.params) params.push_back(Json{{"param", p.param}, {"slot", p.slot}});
      j["params"] = std::move(params);
      j["body"] = node_json(*n.child);
      break;
    }
    case PlanKind::kConstraintCheck:
      j["min"] = n.min;
      j["max"] = n.max;
      j["node"] = node_json(*n.child);
      break;
  }
  return j;
}

class Loader {
 public:
  Result<CodecPlan> document(const Json& j) {
    ACNKIT_TRY(keys(j, "plan", {"format", "version", "type", "bounds", "slots", "root"}));
    ACNKIT_ASSIGN_OR_RETURN(std::string format, str(j, "format", "plan"));
    if (format != "acnkit-plan") return plan_error("plan", cat("unknown format '", format, "'"));
    ACNKIT_ASSIGN_OR_RETURN(std::int64_t version, integer(j, "version", "plan"));
    if (version != 1) return plan_error("plan", cat("unsupported version ", version));
    CodecPlan plan;
    ACNKIT_ASSIGN_OR_RETURN(plan.type_name, str(j, "type", "plan"));
    ACNKIT_ASSIGN_OR_RETURN(SizeBounds top, bounds(j, "plan"));
    ACNKIT_ASSIGN_OR_RETURN(const Json* slots, array(j, "slots", "plan"));
    for (std::size_t i = 0; i < slots->size(); ++i) {
      const Json& s = (*slots)[i];
      const std::string at = cat("slots[", i, "]");
      ACNKIT_TRY(keys(s, at, {"name", "kind"}));
      PlanSlot slot;
      ACNKIT_ASSIGN_OR_RETURN(slot.name, str(s, "name", at));
      ACNKIT_ASSIGN_OR_RETURN(std::string kind, str(s, "kind", at));
      if (kind == "integer") slot.kind = SlotKind::kInteger;
      else if (kind == "enumerated") slot.kind = SlotKind::kEnumerated;
      else if (kind == "boolean") slot.kind = SlotKind::kBoolean;
      else return plan_error(at, cat("unknown slot kind '", kind, "'"));
      plan.slots.push_back(std::move(slot));
    }
    ACNKIT_ASSIGN_OR_RETURN(plan.root, node_at(j, "root", "root"));
    if (!(top == plan.root->bounds)) return plan_error("plan", "top-level bounds differ from root");
    ACNKIT_TRY(validate_plan(plan));
    return plan;
  }

 private:
  static Status keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) return plan_error(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      for (const char* k : allowed) known = known || it.key() == k;
      if (!known) return plan_error(where, cat("unexpected key '", it.key(), "'"));
    }
    return {};
  }

  static Result<const Json*> member(const Json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) return plan_error(where, cat("missing '", key, "'"));
    return &*it;
  }

  static Result<std::string> str(const Json& j, const char* key, const std::string& where) {
    ACNKIT_ASSIGN_OR_RETURN(const Json* v, member(j, key, where));
    if (!v->is_string()) return plan_error(where, cat("'", key, "' must be a string"));
    return v->get<std::string>();
  }

  static std::string opt_str(const Json& j, const char* key) {
    auto it = j.find(key);
    return it != j.end() && it->is_string() ? it->get<std::string>() : std::string();
  }

  static Result<std::int64_t> integer(const Json& j, const char* key, const std::string& where) {
    ACNKIT_ASSIGN_OR_RETURN(const Json* v, member(j, key, where));
    if (v->is_number_unsigned()) {
      if (v->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        return plan_error(where, cat("'", key, "' is out of range"));
      }
      return static_cast<std::int64_t>(v->get<std::uint64_t>());
    }
    if (!v->is_number_integer()) return plan_error(where, cat("'", key, "' must be an integer"));
    return v->get<std::int64_t>();
  }

  static Result<unsigned> small(const Json& j, const char* key, const std::string& where) {
    ACNKIT_ASSIGN_OR_RETURN(std::int64_t v, integer(j, key, where));
    if (v < 0 || v > 64) return plan_error(where, cat("'", key, "' is out of range"));
    return static_cast<unsigned>(v);
  }

  static Result<const Json*> array(const Json& j, const char* key, const std::string& where) {
    ACNKIT_ASSIGN_OR_RETURN(const Json* v, member(j, key, where));
    if (!v->is_array()) return plan_error(where, cat("'", key, "' must be an array"));
    return v;
  }

  static Result<bool> flag(const Json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) return false;
    if (!it->is_boolean() || !it->get<bool>()) {
      return plan_error(where, cat("'", key, "' must be true when present"));
    }
    return true;
  }

  static Result<std::string> opt_name(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return std::string();
    ACNKIT_ASSIGN_OR_RETURN(std::string s, str(j, key, where));
    if (s.empty()) return plan_error(where, cat("'", key, "' is empty"));
    return s;
  }

  static Result<SizeBounds> bounds(const Json& j, const std::string& where) {
    ACNKIT_ASSIGN_OR_RETURN(const Json* b, member(j, "bounds", where));
    const std::string at = where + ".bounds";
    ACNKIT_TRY(keys(*b, at, {"min", "max", "alignment"}));
    SizeBounds out;
    for (const char* k : {"min", "max"}) {
      ACNKIT_ASSIGN_OR_RETURN(const Json* v, member(*b, k, at));
      if (!v->is_number_unsigned()) return plan_error(at, cat("'", k, "' must be a nonnegative integer"));
      (k[1] == 'i' ? out.min_bits : out.max_bits) = v->get<std::uint64_t>();
    }
    ACNKIT_ASSIGN_OR_RETURN(std::string a, str(*b, "alignment", at));
    if (a == "none") out.alignment = 1;
    else if (a == "mod8") out.alignment = 8;
    else if (a == "mod16") out.alignment = 16;
    else if (a == "mod32") out.alignment = 32;
    else return plan_error(at, cat("unknown alignment '", a, "'"));
    return out;
  }

  static Result<Alphabet> alphabet(const Json& j, const std::string& where) {
    ACNKIT_ASSIGN_OR_RETURN(const Json* ranges, array(j, "alphabet", where));
    std::string chars;
    int prev = -2;
    for (const auto& r : *ranges) {
      if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
        return plan_error(where, "alphabet entries must be [lo, hi] pairs");
      }
      const int lo = r[0].get<int>();
      const int hi = r[1].get<int>();
      if (lo <= prev + 1 || hi < lo || hi > 127) {
        return plan_error(where, "alphabet ranges must be ascending, disjoint, non-adjacent and 7-bit");
      }
      for (int c = lo; c <= hi; ++c) chars.push_back(static_cast<char>(c));
      prev = hi;
    }
    auto a = Alphabet::create(chars);
    if (!a.ok()) return plan_error(where, a.error().message);
    return std::move(a).value();
  }

  static Result<std::vector<std::uint8_t>> hex(const std::string& s, const std::string& where) {
    if (s.size() % 2 != 0) return plan_error(where, "terminator must be whole bytes of lowercase hex");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < s.size(); i += 2) {
      int v = 0;
      for (std::size_t k = i; k < i + 2; ++k) {
        const char c = s[k];
        int d = c >= '0' && c <= '9' ? c - '0' : c >= 'a' && c <= 'f' ? c - 'a' + 10 : -1;
        if (d < 0) return plan_error(where, "terminator must be whole bytes of lowercase hex");
        v = v * 16 + d;
      }
      out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
  }

  Result<PlanNodePtr> node_at(const Json& j, const char* key, const std::string& where) {
    ACNKIT_ASSIGN_OR_RETURN(const Json* v, member(j, key, where));
    return node(*v, where == key ? where : where + "." + key);
  }

  Result<PlanNodePtr> node(const Json& j, const std::string& where) {
    if (++depth_ > 256) return plan_error(where, "nesting too deep");
    auto out = node_inner(j, where);
    --depth_;
    return out;
  }

  Result<PlanNodePtr> node_inner(const Json& j, const std::string& where) {
    if (!j.is_object()) return plan_error(where, "expected a node object");
    ACNKIT_ASSIGN_OR_RETURN(std::string kind_name, str(j, "kind", where));
    auto kind = plan_kind_from_string(kind_name);
    if (!kind) return plan_error(where, cat("unknown node kind '", kind_name, "'"));
    PlanNode n;
    n.kind = *kind;
    ACNKIT_ASSIGN_OR_RETURN(n.bounds, bounds(j, where));
    auto endianness = [&]() -> Status {
      ACNKIT_ASSIGN_OR_RETURN(std::string e, str(j, "endianness", where));
      if (e == "big") n.endianness = Endianness::kBig;
      else if (e == "little") n.endianness = Endianness::kLittle;
      else return plan_error(where, cat("unknown endianness '", e, "'"));
      return {};
    };
    switch (n.kind) {
      case PlanKind::kConstUInt:
      case PlanKind::kReal: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "width", "endianness"}));
        ACNKIT_ASSIGN_OR_RETURN(n.width, small(j, "width", where));
        ACNKIT_TRY(endianness());
        break;
      }
      case PlanKind::kUIntBits:
      case PlanKind::kTwosComplement: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "width"}));
        ACNKIT_ASSIGN_OR_RETURN(n.width, small(j, "width", where));
        break;
      }
      case PlanKind::kConstrainedNumber: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "min", "max"}));
        ACNKIT_ASSIGN_OR_RETURN(n.min, integer(j, "min", where));
        ACNKIT_ASSIGN_OR_RETURN(n.max, integer(j, "max", where));
        break;
      }
      case PlanKind::kBool:
      case PlanKind::kNull: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds"}));
        break;
      }
      case PlanKind::kEnumerated: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "items", "encoding"}));
        ACNKIT_ASSIGN_OR_RETURN(const Json* items, array(j, "items", where));
        for (std::size_t i = 0; i < items->size(); ++i) {
          const std::string at = cat(where, ".items[", i, "]");
          ACNKIT_TRY(keys((*items)[i], at, {"name", "value"}));
          PlanItem it;
          ACNKIT_ASSIGN_OR_RETURN(it.name, str((*items)[i], "name", at));
          ACNKIT_ASSIGN_OR_RETURN(it.value, integer((*items)[i], "value", at));
          n.items.push_back(std::move(it));
        }
        ACNKIT_ASSIGN_OR_RETURN(n.child, node_at(j, "encoding", where));
        break;
      }
      case PlanKind::kStringAsciiNull: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "minLength", "maxLength", "terminator", "alphabet"}));
        ACNKIT_ASSIGN_OR_RETURN(n.min, integer(j, "minLength", where));
        ACNKIT_ASSIGN_OR_RETURN(n.max, integer(j, "maxLength", where));
        ACNKIT_ASSIGN_OR_RETURN(std::string t, str(j, "terminator", where));
        ACNKIT_ASSIGN_OR_RETURN(n.terminator, hex(t, where));
        ACNKIT_ASSIGN_OR_RETURN(n.alphabet, alphabet(j, where));
        break;
      }
      case PlanKind::kStringCharIndex: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "minLength", "maxLength", "alphabet", "lengthSlot"}));
        ACNKIT_ASSIGN_OR_RETURN(n.min, integer(j, "minLength", where));
        ACNKIT_ASSIGN_OR_RETURN(n.max, integer(j, "maxLength", where));
        ACNKIT_ASSIGN_OR_RETURN(n.alphabet, alphabet(j, where));
        ACNKIT_ASSIGN_OR_RETURN(n.slot, opt_name(j, "lengthSlot", where));
        break;
      }
      case PlanKind::kAlign: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "to", "node"}));
        ACNKIT_ASSIGN_OR_RETURN(n.width, small(j, "to", where));
        ACNKIT_ASSIGN_OR_RETURN(n.child, node_at(j, "node", where));
        break;
      }
      case PlanKind::kRecord: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "fields"}));
        ACNKIT_ASSIGN_OR_RETURN(const Json* fields, array(j, "fields", where));
        for (std::size_t i = 0; i < fields->size(); ++i) {
          const Json& fj = (*fields)[i];
          const std::string at = cat(where, ".fields[", i, "]");
          ACNKIT_TRY(keys(fj, at, {"name", "inserted", "optional", "presentSlot", "produces", "node"}));
          PlanField f;
          ACNKIT_ASSIGN_OR_RETURN(f.name, str(fj, "name", at));
          ACNKIT_ASSIGN_OR_RETURN(f.inserted, flag(fj, "inserted", at));
          ACNKIT_ASSIGN_OR_RETURN(f.optional, flag(fj, "optional", at));
          ACNKIT_ASSIGN_OR_RETURN(f.present_slot, opt_name(fj, "presentSlot", at));
          ACNKIT_ASSIGN_OR_RETURN(f.produces, opt_name(fj, "produces", at));
          ACNKIT_ASSIGN_OR_RETURN(f.node, node_at(fj, "node", at));
          n.fields.push_back(std::move(f));
        }
        break;
      }
      case PlanKind::kVariant: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "determinantSlot", "alternatives"}));
        ACNKIT_ASSIGN_OR_RETURN(n.slot, opt_name(j, "determinantSlot", where));
        ACNKIT_ASSIGN_OR_RETURN(const Json* alts, array(j, "alternatives", where));
        for (std::size_t i = 0; i < alts->size(); ++i) {
          const Json& aj = (*alts)[i];
          const std::string at = cat(where, ".alternatives[", i, "]");
          ACNKIT_TRY(keys(aj, at, {"name", "when", "node"}));
          PlanAlternative a;
          ACNKIT_ASSIGN_OR_RETURN(a.name, str(aj, "name", at));
          ACNKIT_ASSIGN_OR_RETURN(a.when, opt_name(aj, "when", at));
          ACNKIT_ASSIGN_OR_RETURN(a.node, node_at(aj, "node", at));
          n.alternatives.push_back(std::move(a));
        }
        break;
      }
      case PlanKind::kList: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "minLength", "maxLength", "sizeSlot", "element"}));
        ACNKIT_ASSIGN_OR_RETURN(n.min, integer(j, "minLength", where));
        ACNKIT_ASSIGN_OR_RETURN(n.max, integer(j, "maxLength", where));
        ACNKIT_ASSIGN_OR_RETURN(n.slot, opt_name(j, "sizeSlot", where));
        ACNKIT_ASSIGN_OR_RETURN(n.child, node_at(j, "element", where));
        break;
      }
      case PlanKind::kOutlined: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "name", "params", "body"}));
        ACNKIT_ASSIGN_OR_RETURN(n.name, str(j, "name", where));
        ACNKIT_ASSIGN_OR_RETURN(const Json* params, array(j, "params", where));
        for (std::size_t i = 0; i < params->size(); ++i) {
          const std::string at = cat(where, ".params[", i, "]");
          ACNKIT_TRY(keys((*params)[i], at, {"param", "slot"}));
          PlanParam p;
          ACNKIT_ASSIGN_OR_RETURN(p.param, str((*params)[i], "param", at));
          ACNKIT_ASSIGN_OR_RETURN(p.slot, str((*params)[i], "slot", at));
          n.params.push_back(std::move(p));
        }
        ACNKIT_ASSIGN_OR_RETURN(n.child, node_at(j, "body", where));
        break;
      }
      case PlanKind::kConstraintCheck: {
        ACNKIT_TRY(keys(j, where, {"kind", "bounds", "min", "max", "node"}));
        ACNKIT_ASSIGN_OR_RETURN(n.min, integer(j, "min", where));
        ACNKIT_ASSIGN_OR_RETURN(n.max, integer(j, "max", where));
        ACNKIT_ASSIGN_OR_RETURN(n.child, node_at(j, "node", where));
        break;
      }
    }
    return PlanNodePtr(std::make_shared<PlanNode>(std::move(n)));
  }

  int depth_ = 0;
};

}  // namespace

std::string plan_dump(const CodecPlan& plan) {
  Json j = Json::object();
  j["format"] = "acnkit-plan";
  j["version"] = 1;
  j["type"] = plan.type_name;
  j["bounds"] = bounds_json(plan.bounds());
  Json slots = Json::array();
  for (const auto& s : plan.slots) {
    slots.push_back(Json{{"name", s.name}, {"kind", std::string(to_string(s.kind))}});
  }
  j["slots"] = std::move(slots);
  j["root"] = node_json(*plan.root);
  return j.dump(2, ' ', true) + "\n";
}

Result<CodecPlan> plan_load(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    return make_error(ErrorCode::kPlanFormat, "plan is not valid JSON: ", e.what());
  }
  return Loader().document(j);
}

}  // namespace acnkit
