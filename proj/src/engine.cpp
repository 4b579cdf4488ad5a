#include "acnkit/engine.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>

namespace acnkit {

namespace {

std::string field_path(const std::string& path, const std::string& name) {
  return path.empty() ? name : path + "." + name;
}

std::string index_path(const std::string& path, std::size_t i) { return cat(path, "[", i, "]"); }

std::string where(const std::string& path) { return path.empty() ? "value" : path; }

template <typename... Args>
Error value_error(ErrorCode code, const std::string& path, Args&&... args) {
  return make_error(code, where(path), ": ", std::forward<Args>(args)...);
}

// Codec errors gain the value path; running out of buffer is reported as
// insufficient space or data.
Error codec_error(Error e, const std::string& path) {
  if (e.code == ErrorCode::kBounds || e.code == ErrorCode::kCapacity) {
    e.code = ErrorCode::kInsufficientBuffer;
  }
  e.message = cat(where(path), ": ", e.message);
  return e;
}

Status wrap_codec(Status s, const std::string& path) {
  if (s.ok()) return s;
  return codec_error(std::move(s).error(), path);
}

template <typename T>
Result<T> wrap_codec(Result<T> r, const std::string& path) {
  if (r.ok()) return r;
  return codec_error(std::move(r).error(), path);
}

bool is_int_kind(PlanKind k) {
  return k == PlanKind::kConstUInt || k == PlanKind::kUIntBits || k == PlanKind::kTwosComplement ||
         k == PlanKind::kConstrainedNumber;
}

// Whether v is representable by an integer node (not counting any
// ConstraintCheck above it).
bool int_fits(const PlanNode& n, std::int64_t v) {
  switch (n.kind) {
    case PlanKind::kConstUInt:
    case PlanKind::kUIntBits:
      return v >= 0 && (n.width >= 64 || static_cast<std::uint64_t>(v) < (std::uint64_t{1} << n.width));
    case PlanKind::kTwosComplement: {
      if (n.width >= 64) return true;
      const std::int64_t limit = std::int64_t{1} << (n.width - 1);
      return v >= -limit && v < limit;
    }
    case PlanKind::kConstrainedNumber:
      return v >= n.min && v <= n.max;
    default:
      return false;
  }
}

std::string int_domain(const PlanNode& n) {
  switch (n.kind) {
    case PlanKind::kConstUInt:
    case PlanKind::kUIntBits:
      return cat(n.width, "-bit unsigned");
    case PlanKind::kTwosComplement:
      return cat(n.width, "-bit two's complement");
    default:
      return cat("[", n.min, ", ", n.max, "]");
  }
}

const Value* record_field(const RecordV& r, std::string_view name) {
  for (const auto& f : r.fields) {
    if (f.name == name) return &f.value;
  }
  return nullptr;
}

std::string bytes_text(const std::vector<std::uint8_t>& b) { return std::string(b.begin(), b.end()); }

// ---------------------------------------------------------------------------
// Shape normalization

class Conformer {
 public:
  Result<Value> node(const PlanNode& n, const Value& v, const std::string& path) {
    auto mismatch = [&](std::string_view expected) {
      return value_error(ErrorCode::kShapeMismatch, path, "expected ", expected, ", got ",
                         v.kind_name());
    };
    switch (n.kind) {
      case PlanKind::kAlign:
      case PlanKind::kConstraintCheck:
      case PlanKind::kOutlined:
        return node(*n.child, v, path);
      case PlanKind::kConstUInt:
      case PlanKind::kUIntBits:
      case PlanKind::kTwosComplement:
      case PlanKind::kConstrainedNumber:
        if (!v.is<IntV>()) return mismatch("integer");
        return v;
      case PlanKind::kReal:
        if (!v.is<RealV>()) return mismatch("real");
        return v;
      case PlanKind::kBool:
        if (!v.is<BoolV>()) return mismatch("boolean");
        return v;
      case PlanKind::kNull:
        if (!v.is<NullV>()) return mismatch("null");
        return v;
      case PlanKind::kEnumerated:
        if (v.is<EnumV>()) return v;
        if (const auto* s = v.get_if<StrV>()) return Value::enumerated(bytes_text(s->bytes));
        return mismatch("enumeration item");
      case PlanKind::kStringAsciiNull:
      case PlanKind::kStringCharIndex:
        if (!v.is<StrV>()) return mismatch("string");
        return v;
      case PlanKind::kList: {
        const auto* l = v.get_if<ListV>();
        if (!l) return mismatch("list");
        std::vector<Value> items;
        items.reserve(l->items.size());
        for (std::size_t i = 0; i < l->items.size(); ++i) {
          ACNKIT_ASSIGN_OR_RETURN(Value item, node(*n.child, l->items[i], index_path(path, i)));
          items.push_back(std::move(item));
        }
        return Value::list(std::move(items));
      }
      case PlanKind::kRecord:
        return record(n, v, path);
      case PlanKind::kVariant: {
        std::string name;
        const Value* inner = nullptr;
        if (const auto* vv = v.get_if<VariantV>()) {
          name = vv->name;
          inner = &*vv->inner;
        } else if (const auto* r = v.get_if<RecordV>(); r && r->fields.size() == 1) {
          name = r->fields[0].name;
          inner = &r->fields[0].value;
        } else {
          return mismatch("single-alternative object");
        }
        for (const auto& a : n.alternatives) {
          if (a.name != name) continue;
          ACNKIT_ASSIGN_OR_RETURN(Value in, node(*a.node, *inner, field_path(path, name)));
          return Value::variant(name, std::move(in));
        }
        return value_error(ErrorCode::kShapeMismatch, path, "no alternative named '", name, "'");
      }
    }
    return mismatch("?");
  }

 private:
  Result<Value> record(const PlanNode& n, const Value& v, const std::string& path) {
    std::vector<std::pair<std::string, const Value*>> given;
    if (const auto* r = v.get_if<RecordV>()) {
      for (const auto& f : r->fields) given.push_back({f.name, &f.value});
    } else if (const auto* vv = v.get_if<VariantV>()) {
      given.push_back({vv->name, &*vv->inner});
    } else {
      return value_error(ErrorCode::kShapeMismatch, path, "expected record, got ", v.kind_name());
    }
    for (const auto& [name, _] : given) {
      const auto it = std::find_if(n.fields.begin(), n.fields.end(),
                                   [&](const PlanField& f) { return f.name == name; });
      if (it == n.fields.end()) {
        return value_error(ErrorCode::kShapeMismatch, path, "unknown field '", name, "'");
      }
      if (it->inserted) {
        return value_error(ErrorCode::kShapeMismatch, path, "'", name,
                           "' is an ACN-inserted field and must not be supplied");
      }
    }
    std::vector<RecordField> out;
    for (const auto& f : n.fields) {
      if (f.inserted) continue;
      const auto it = std::find_if(given.begin(), given.end(),
                                   [&](const auto& g) { return g.first == f.name; });
      if (it == given.end()) {
        if (f.optional) continue;
        return value_error(ErrorCode::kShapeMismatch, path, "missing field '", f.name, "'");
      }
      ACNKIT_ASSIGN_OR_RETURN(Value fv, node(*f.node, *it->second, field_path(path, f.name)));
      out.push_back({f.name, std::move(fv)});
    }
    return Value::record(std::move(out));
  }
};

// ---------------------------------------------------------------------------
// Slot bookkeeping shared by the walkers

class SlotIndex {
 public:
  explicit SlotIndex(const CodecPlan& plan) { index(*plan.root); }

  const PlanNode& producer(const std::string& slot) const { return *producers_.at(slot); }

  // Slot value carried by a producer's value.
  std::optional<std::int64_t> numeric(const std::string& slot, const Value& v) const {
    if (const auto* i = v.get_if<IntV>()) return i->v;
    if (const auto* b = v.get_if<BoolV>()) return b->v ? 1 : 0;
    if (const auto* e = v.get_if<EnumV>()) {
      if (const PlanItem* it = producer(slot).item_by_name(e->name)) return it->value;
    }
    return std::nullopt;
  }

  // Values that consumers of `slot` inside (n, v) need it to hold.
  void requirements(const std::string& slot, const PlanNode& n, const Value& v,
                    std::set<std::int64_t>& out) const {
    switch (n.kind) {
      case PlanKind::kAlign:
      case PlanKind::kConstraintCheck:
      case PlanKind::kOutlined:
      case PlanKind::kEnumerated:
        if (n.kind != PlanKind::kEnumerated) requirements(slot, *n.child, v, out);
        return;
      case PlanKind::kStringCharIndex:
        if (n.slot == slot) {
          if (const auto* s = v.get_if<StrV>()) out.insert(static_cast<std::int64_t>(s->bytes.size()));
        }
        return;
      case PlanKind::kList: {
        const auto* l = v.get_if<ListV>();
        if (!l) return;
        if (n.slot == slot) out.insert(static_cast<std::int64_t>(l->items.size()));
        for (const auto& item : l->items) requirements(slot, *n.child, item, out);
        return;
      }
      case PlanKind::kRecord: {
        const auto* r = v.get_if<RecordV>();
        if (!r) return;
        for (const auto& f : n.fields) {
          if (f.inserted) continue;
          const Value* fv = record_field(*r, f.name);
          if (f.present_slot == slot) out.insert(fv ? 1 : 0);
          if (fv) requirements(slot, *f.node, *fv, out);
        }
        return;
      }
      case PlanKind::kVariant: {
        const auto* vv = v.get_if<VariantV>();
        if (!vv) return;
        for (const auto& a : n.alternatives) {
          if (a.name != vv->name) continue;
          if (n.slot == slot) {
            if (const PlanItem* it = producer(slot).item_by_name(a.when)) out.insert(it->value);
          }
          requirements(slot, *a.node, *vv->inner, out);
        }
        return;
      }
      default:
        return;
    }
  }

  // Requirements on field i's slot from the fields after it.
  std::set<std::int64_t> requirements_after(const PlanNode& record, const RecordV& rv,
                                            std::size_t i) const {
    std::set<std::int64_t> req;
    const std::string& slot = record.fields[i].produces;
    if (slot.empty()) return req;
    for (std::size_t j = i + 1; j < record.fields.size(); ++j) {
      const PlanField& g = record.fields[j];
      if (g.inserted) continue;
      const Value* gv = record_field(rv, g.name);
      if (g.present_slot == slot) req.insert(gv ? 1 : 0);
      if (gv) requirements(slot, *g.node, *gv, req);
    }
    return req;
  }

  // Value for an inserted field nobody constrains.
  static std::int64_t domain_min(const PlanNode& n) {
    switch (n.kind) {
      case PlanKind::kAlign:
      case PlanKind::kOutlined:
        return domain_min(*n.child);
      case PlanKind::kConstraintCheck:
      case PlanKind::kConstrainedNumber:
        return n.min;
      case PlanKind::kEnumerated:
        return n.items.front().value;
      default:
        return 0;
    }
  }

  // Value object an inserted field carries for slot value x.
  static std::optional<Value> slot_value(const PlanNode& node, std::int64_t x) {
    const PlanNode& s = strip_wrappers(node);
    if (s.kind == PlanKind::kBool) return Value::boolean(x != 0);
    if (s.kind == PlanKind::kEnumerated) {
      const PlanItem* it = s.item_by_value(x);
      if (!it) return std::nullopt;
      return Value::enumerated(it->name);
    }
    return Value::integer(x);
  }

 private:
  void index(const PlanNode& n) {
    for (const auto& f : n.fields) {
      if (!f.produces.empty()) producers_[f.produces] = &strip_wrappers(*f.node);
      index(*f.node);
    }
    for (const auto& a : n.alternatives) index(*a.node);
    if (n.child) index(*n.child);
  }

  std::map<std::string, const PlanNode*> producers_;
};

// ---------------------------------------------------------------------------
// Encoding

class Encoder {
 public:
  Encoder(const CodecPlan& plan, AcnCodec& codec) : slots_(plan), c_(codec) {}

  Status node(const PlanNode& n, const Value& v, const std::string& path) {
    switch (n.kind) {
      case PlanKind::kConstUInt:
      case PlanKind::kUIntBits:
      case PlanKind::kTwosComplement:
      case PlanKind::kConstrainedNumber:
        return integer(n, v.as<IntV>().v, path);
      case PlanKind::kConstraintCheck: {
        const std::int64_t x = v.as<IntV>().v;
        if (x < n.min || x > n.max) {
          return value_error(ErrorCode::kConstraint, path, "value ", x, " is outside [", n.min,
                             ", ", n.max, "]");
        }
        return node(*n.child, v, path);
      }
      case PlanKind::kReal: {
        const auto& r = v.as<RealV>();
        if (r.width != n.width) {
          return value_error(ErrorCode::kShapeMismatch, path, "expected a ", n.width,
                             "-bit real, got ", r.width, " bits");
        }
        return wrap_codec(c_.enc_real_ieee754(r.pattern, n.width, n.endianness), path);
      }
      case PlanKind::kBool:
        return wrap_codec(c_.stream().append_bit(v.as<BoolV>().v), path);
      case PlanKind::kNull:
        return {};
      case PlanKind::kEnumerated: {
        const auto& name = v.as<EnumV>().name;
        const PlanItem* it = n.item_by_name(name);
        if (!it) return value_error(ErrorCode::kConstraint, path, "'", name, "' is not an item");
        return integer(*n.child, it->value, path);
      }
      case PlanKind::kStringAsciiNull:
      case PlanKind::kStringCharIndex:
        return string(n, v.as<StrV>().bytes, path);
      case PlanKind::kAlign:
        ACNKIT_TRY(wrap_codec(c_.align_to(n.width), path));
        return node(*n.child, v, path);
      case PlanKind::kOutlined:
        return node(*n.child, v, path);
      case PlanKind::kRecord:
        return record(n, v.as<RecordV>(), path);
      case PlanKind::kVariant:
        return variant(n, v.as<VariantV>(), path);
      case PlanKind::kList:
        return list(n, v.as<ListV>(), path);
    }
    return {};
  }

 private:
  Status integer(const PlanNode& n, std::int64_t x, const std::string& path) {
    if (!int_fits(n, x)) {
      return value_error(ErrorCode::kConstraint, path, "value ", x, " does not fit ", int_domain(n));
    }
    switch (n.kind) {
      case PlanKind::kConstUInt:
        return wrap_codec(c_.enc_uint_const_size_aligned(static_cast<std::uint64_t>(x), n.width), path);
      case PlanKind::kUIntBits:
        return wrap_codec(c_.enc_uint_const_size(static_cast<std::uint64_t>(x), n.width), path);
      case PlanKind::kTwosComplement:
        if (n.width % 8 == 0 && (n.width & (n.width - 1)) == 0) {
          return wrap_codec(c_.enc_int_twos_complement_const_size_aligned(x, n.width), path);
        }
        return wrap_codec(c_.enc_int_twos_complement_const_size(x, n.width), path);
      default:
        return wrap_codec(c_.encode_constrained_whole_number(x, n.min, n.max), path);
    }
  }

  Status check_slot(const std::string& slot, std::int64_t want, const std::string& path,
                    std::string_view what) {
    const std::int64_t have = env_.at(slot);
    if (have != want) {
      return value_error(ErrorCode::kConstraint, path, what, " needs slot '", slot, "' = ", want,
                         ", but it holds ", have);
    }
    return {};
  }

  Status string(const PlanNode& n, const std::vector<std::uint8_t>& s, const std::string& path) {
    const auto len = static_cast<std::int64_t>(s.size());
    if (len < n.min || len > n.max) {
      return value_error(ErrorCode::kConstraint, path, "length ", len, " is outside [", n.min, ", ",
                         n.max, "]");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!n.alphabet->contains(s[i])) {
        return value_error(s[i] > 127 ? ErrorCode::kCharOutOfRange : ErrorCode::kCharNotInAlphabet,
                           path, "character code ", unsigned{s[i]}, " at index ", i,
                           " is not in the permitted alphabet");
      }
    }
    if (n.kind == PlanKind::kStringAsciiNull) {
      return wrap_codec(c_.enc_string_ascii_null_terminated(s, static_cast<std::uint64_t>(n.max),
                                                            n.terminator),
                        path);
    }
    if (!n.slot.empty()) {
      ACNKIT_TRY(check_slot(n.slot, len, path, "string length"));
      return wrap_codec(c_.enc_string_char_index_external(s, *n.alphabet,
                                                          static_cast<std::uint64_t>(n.max),
                                                          static_cast<std::uint64_t>(len)),
                        path);
    }
    return wrap_codec(c_.enc_string_char_index_internal(s, *n.alphabet,
                                                        static_cast<std::uint64_t>(n.min),
                                                        static_cast<std::uint64_t>(n.max)),
                      path);
  }

  Status record(const PlanNode& n, const RecordV& rv, const std::string& path) {
    for (std::size_t i = 0; i < n.fields.size(); ++i) {
      const PlanField& f = n.fields[i];
      const std::string fp = field_path(path, f.name);
      if (f.inserted) {
        const std::set<std::int64_t> req = slots_.requirements_after(n, rv, i);
        if (req.size() > 1) {
          return value_error(ErrorCode::kConstraint, fp, "consumers need ", req.size(),
                             " different values (", *req.begin(), " and ", *req.rbegin(), ")");
        }
        const std::int64_t x = req.empty() ? SlotIndex::domain_min(*f.node) : *req.begin();
        const auto fv = SlotIndex::slot_value(*f.node, x);
        if (!fv) return value_error(ErrorCode::kConstraint, fp, "no item has value ", x);
        ACNKIT_TRY(node(*f.node, *fv, fp));
        if (!f.produces.empty()) env_[f.produces] = x;
        continue;
      }
      const Value* fv = record_field(rv, f.name);
      if (f.optional) {
        ACNKIT_TRY(check_slot(f.present_slot, fv ? 1 : 0, fp, fv ? "presence" : "absence"));
      }
      if (!fv) continue;
      ACNKIT_TRY(node(*f.node, *fv, fp));
      if (!f.produces.empty()) env_[f.produces] = *slots_.numeric(f.produces, *fv);
    }
    return {};
  }

  Status variant(const PlanNode& n, const VariantV& vv, const std::string& path) {
    std::size_t idx = 0;
    while (n.alternatives[idx].name != vv.name) ++idx;
    const PlanAlternative& a = n.alternatives[idx];
    if (!n.slot.empty()) {
      const std::int64_t want = slots_.producer(n.slot).item_by_name(a.when)->value;
      ACNKIT_TRY(check_slot(n.slot, want, path, cat("alternative '", a.name, "'")));
    } else {
      ACNKIT_TRY(wrap_codec(c_.encode_constrained_pos_whole_number(idx, 0, n.alternatives.size() - 1),
                            path));
    }
    return node(*a.node, *vv.inner, field_path(path, a.name));
  }

  Status list(const PlanNode& n, const ListV& l, const std::string& path) {
    const auto len = static_cast<std::int64_t>(l.items.size());
    if (len < n.min || len > n.max) {
      return value_error(ErrorCode::kConstraint, path, "list length ", len, " is outside [", n.min,
                         ", ", n.max, "]");
    }
    if (!n.slot.empty()) {
      ACNKIT_TRY(check_slot(n.slot, len, path, "list length"));
    } else {
      ACNKIT_TRY(wrap_codec(c_.encode_constrained_pos_whole_number(
                                static_cast<std::uint64_t>(len), static_cast<std::uint64_t>(n.min),
                                static_cast<std::uint64_t>(n.max)),
                            path));
    }
    for (std::size_t i = 0; i < l.items.size(); ++i) {
      ACNKIT_TRY(node(*n.child, l.items[i], index_path(path, i)));
    }
    return {};
  }

  SlotIndex slots_;
  AcnCodec& c_;
  std::map<std::string, std::int64_t> env_;
};

// ---------------------------------------------------------------------------
// Decoding

class DecoderImpl {
 public:
  DecoderImpl(const CodecPlan& plan, AcnCodec& codec, SlotValues* out)
      : slots_(plan), c_(codec), out_(out) {}

  Result<Value> node(const PlanNode& n, const std::string& path) {
    switch (n.kind) {
      case PlanKind::kConstUInt:
      case PlanKind::kUIntBits:
      case PlanKind::kTwosComplement:
      case PlanKind::kConstrainedNumber: {
        ACNKIT_ASSIGN_OR_RETURN(std::int64_t x, integer(n, path));
        return Value::integer(x);
      }
      case PlanKind::kConstraintCheck: {
        ACNKIT_ASSIGN_OR_RETURN(std::int64_t x, integer(*n.child, path));
        if (x < n.min || x > n.max) {
          return value_error(ErrorCode::kDecodeConstraint, path, "decoded value ", x,
                             " is outside [", n.min, ", ", n.max, "]");
        }
        return Value::integer(x);
      }
      case PlanKind::kReal: {
        ACNKIT_ASSIGN_OR_RETURN(std::uint64_t p, wrap_codec(c_.dec_real_ieee754(n.width, n.endianness), path));
        return Value::real(p, n.width);
      }
      case PlanKind::kBool: {
        ACNKIT_ASSIGN_OR_RETURN(bool b, wrap_codec(c_.stream().read_bit(), path));
        return Value::boolean(b);
      }
      case PlanKind::kNull:
        return Value::null();
      case PlanKind::kEnumerated: {
        ACNKIT_ASSIGN_OR_RETURN(std::int64_t x, integer(*n.child, path));
        const PlanItem* it = n.item_by_value(x);
        if (!it) {
          return value_error(ErrorCode::kDecodeConstraint, path, "decoded value ", x,
                             " is not an item of the enumeration");
        }
        return Value::enumerated(it->name);
      }
      case PlanKind::kStringAsciiNull:
      case PlanKind::kStringCharIndex:
        return string(n, path);
      case PlanKind::kAlign:
        ACNKIT_TRY(wrap_codec(c_.skip_alignment(n.width), path));
        return node(*n.child, path);
      case PlanKind::kOutlined:
        return node(*n.child, path);
      case PlanKind::kRecord:
        return record(n, path);
      case PlanKind::kVariant:
        return variant(n, path);
      case PlanKind::kList:
        return list(n, path);
    }
    return value_error(ErrorCode::kPlanFormat, path, "unknown node");
  }

 private:
  Result<std::int64_t> integer(const PlanNode& n, const std::string& path) {
    switch (n.kind) {
      case PlanKind::kConstUInt:
      case PlanKind::kUIntBits: {
        auto r = n.kind == PlanKind::kConstUInt ? c_.dec_uint_const_size_aligned(n.width)
                                                : c_.dec_uint_const_size(n.width);
        ACNKIT_ASSIGN_OR_RETURN(std::uint64_t u, wrap_codec(std::move(r), path));
        if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
          return value_error(ErrorCode::kDecodeConstraint, path, "decoded value ", u,
                             " exceeds the 64-bit signed range");
        }
        return static_cast<std::int64_t>(u);
      }
      case PlanKind::kTwosComplement:
        if (n.width % 8 == 0 && (n.width & (n.width - 1)) == 0) {
          return wrap_codec(c_.dec_int_twos_complement_const_size_aligned(n.width), path);
        }
        return wrap_codec(c_.dec_int_twos_complement_const_size(n.width), path);
      default:
        return wrap_codec(c_.decode_constrained_whole_number(n.min, n.max), path);
    }
  }

  Result<std::int64_t> slot(const std::string& name) const { return env_.at(name); }

  Result<Value> string(const PlanNode& n, const std::string& path) {
    std::vector<std::uint8_t> s;
    if (n.kind == PlanKind::kStringAsciiNull) {
      ACNKIT_ASSIGN_OR_RETURN(s, wrap_codec(c_.dec_string_ascii_null_terminated(
                                                static_cast<std::uint64_t>(n.max), n.terminator),
                                            path));
    } else if (!n.slot.empty()) {
      const std::int64_t len = env_.at(n.slot);
      if (len < n.min || len > n.max) {
        return value_error(ErrorCode::kDecodeConstraint, path, "length slot '", n.slot, "' holds ",
                           len, ", outside [", n.min, ", ", n.max, "]");
      }
      ACNKIT_ASSIGN_OR_RETURN(s, wrap_codec(c_.dec_string_char_index_external(
                                                *n.alphabet, static_cast<std::uint64_t>(n.max),
                                                static_cast<std::uint64_t>(len)),
                                            path));
    } else {
      ACNKIT_ASSIGN_OR_RETURN(s, wrap_codec(c_.dec_string_char_index_internal(
                                                *n.alphabet, static_cast<std::uint64_t>(n.min),
                                                static_cast<std::uint64_t>(n.max)),
                                            path));
    }
    const auto len = static_cast<std::int64_t>(s.size());
    if (len < n.min || len > n.max) {
      return value_error(ErrorCode::kDecodeConstraint, path, "decoded length ", len,
                         " is outside [", n.min, ", ", n.max, "]");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!n.alphabet->contains(s[i])) {
        return value_error(ErrorCode::kDecodeConstraint, path, "decoded character code ",
                           unsigned{s[i]}, " at index ", i, " is not in the permitted alphabet");
      }
    }
    return Value::string(std::move(s));
  }

  Result<Value> record(const PlanNode& n, const std::string& path) {
    std::vector<RecordField> fields;
    for (const auto& f : n.fields) {
      const std::string fp = field_path(path, f.name);
      if (f.optional && env_.at(f.present_slot) == 0) continue;
      ACNKIT_ASSIGN_OR_RETURN(Value v, node(*f.node, fp));
      if (!f.produces.empty()) env_[f.produces] = *slots_.numeric(f.produces, v);
      if (f.inserted) {
        if (out_) out_->push_back({fp, std::move(v)});
        continue;
      }
      fields.push_back({f.name, std::move(v)});
    }
    return Value::record(std::move(fields));
  }

  Result<Value> variant(const PlanNode& n, const std::string& path) {
    const PlanAlternative* chosen = nullptr;
    if (!n.slot.empty()) {
      const std::int64_t x = env_.at(n.slot);
      const PlanItem* item = slots_.producer(n.slot).item_by_value(x);
      const std::string item_name = item ? item->name : cat(x);
      for (const auto& a : n.alternatives) {
        if (item && a.when == item->name) chosen = &a;
      }
      if (!chosen) {
        return value_error(ErrorCode::kDeterminant, path, "determinant '", n.slot, "' = '",
                           item_name, "' selects no alternative");
      }
    } else {
      auto r = c_.decode_constrained_pos_whole_number(0, n.alternatives.size() - 1);
      if (!r.ok() && r.error().code == ErrorCode::kDecodeConstraint) {
        return value_error(ErrorCode::kDeterminant, path, "alternative index selects nothing: ",
                           r.error().message);
      }
      ACNKIT_ASSIGN_OR_RETURN(std::uint64_t idx, wrap_codec(std::move(r), path));
      chosen = &n.alternatives[idx];
    }
    ACNKIT_ASSIGN_OR_RETURN(Value inner, node(*chosen->node, field_path(path, chosen->name)));
    return Value::variant(chosen->name, std::move(inner));
  }

  Result<Value> list(const PlanNode& n, const std::string& path) {
    std::int64_t len = 0;
    if (!n.slot.empty()) {
      len = env_.at(n.slot);
      if (len < n.min || len > n.max) {
        return value_error(ErrorCode::kDecodeConstraint, path, "size slot '", n.slot, "' holds ",
                           len, ", outside [", n.min, ", ", n.max, "]");
      }
    } else {
      ACNKIT_ASSIGN_OR_RETURN(
          std::uint64_t u,
          wrap_codec(c_.decode_constrained_pos_whole_number(static_cast<std::uint64_t>(n.min),
                                                            static_cast<std::uint64_t>(n.max)),
                     path));
      len = static_cast<std::int64_t>(u);
    }
    std::vector<Value> items;
    items.reserve(static_cast<std::size_t>(len));
    for (std::int64_t i = 0; i < len; ++i) {
      ACNKIT_ASSIGN_OR_RETURN(Value v, node(*n.child, index_path(path, static_cast<std::size_t>(i))));
      items.push_back(std::move(v));
    }
    return Value::list(std::move(items));
  }

  SlotIndex slots_;
  AcnCodec& c_;
  SlotValues* out_;
  std::map<std::string, std::int64_t> env_;
};

// ---------------------------------------------------------------------------
// Exact sizes

class Sizer {
 public:
  std::uint64_t node(const PlanNode& n, const Value* v, std::uint64_t off) const {
    switch (n.kind) {
      case PlanKind::kConstUInt:
      case PlanKind::kUIntBits:
      case PlanKind::kTwosComplement:
      case PlanKind::kConstrainedNumber:
      case PlanKind::kReal:
      case PlanKind::kBool:
      case PlanKind::kNull:
      case PlanKind::kEnumerated:
        return n.bounds.min_bits;
      case PlanKind::kConstraintCheck:
      case PlanKind::kOutlined:
        return node(*n.child, v, off);
      case PlanKind::kStringAsciiNull:
        return (v->as<StrV>().bytes.size() + n.terminator.size()) * 8;
      case PlanKind::kStringCharIndex: {
        const std::uint64_t len = v->as<StrV>().bytes.size();
        const std::uint64_t lenbits =
            n.slot.empty() ? bits_needed(static_cast<std::uint64_t>(n.max - n.min)) : 0;
        return lenbits + len * n.alphabet->bits_per_char();
      }
      case PlanKind::kAlign: {
        const std::uint64_t pad = AcnCodec::padding_bits(off, n.width);
        return pad + node(*n.child, v, off + pad);
      }
      case PlanKind::kRecord: {
        const auto& rv = v->as<RecordV>();
        std::uint64_t total = 0;
        for (const auto& f : n.fields) {
          const Value* fv = f.inserted ? nullptr : record_field(rv, f.name);
          if (!f.inserted && !fv) continue;
          total += node(*f.node, fv, off + total);
        }
        return total;
      }
      case PlanKind::kVariant: {
        const auto& vv = v->as<VariantV>();
        const std::uint64_t idx = n.slot.empty() ? bits_needed(n.alternatives.size() - 1) : 0;
        for (const auto& a : n.alternatives) {
          if (a.name == vv.name) return idx + node(*a.node, &*vv.inner, off + idx);
        }
        return idx;
      }
      case PlanKind::kList: {
        const auto& l = v->as<ListV>();
        std::uint64_t total =
            n.slot.empty() ? bits_needed(static_cast<std::uint64_t>(n.max - n.min)) : 0;
        for (const auto& item : l.items) total += node(*n.child, &item, off + total);
        return total;
      }
    }
    return 0;
  }
};

// ---------------------------------------------------------------------------
// Constraint checking

class Checker {
 public:
  Checker(const CodecPlan& plan, std::vector<Violation>& out) : slots_(plan), out_(out) {}

  void node(const PlanNode& n, const Value& v, const std::string& path) {
    switch (n.kind) {
      case PlanKind::kConstUInt:
      case PlanKind::kUIntBits:
      case PlanKind::kTwosComplement:
      case PlanKind::kConstrainedNumber: {
        const std::int64_t x = v.as<IntV>().v;
        if (!int_fits(n, x)) add(path, cat("value ", x, " does not fit ", int_domain(n)));
        return;
      }
      case PlanKind::kConstraintCheck: {
        const std::int64_t x = v.as<IntV>().v;
        if (x < n.min || x > n.max) {
          add(path, cat("value ", x, " is outside [", n.min, ", ", n.max, "]"));
          return;
        }
        node(*n.child, v, path);
        return;
      }
      case PlanKind::kReal:
        if (v.as<RealV>().width != n.width) add(path, cat("expected a ", n.width, "-bit real"));
        return;
      case PlanKind::kEnumerated:
        if (!n.item_by_name(v.as<EnumV>().name)) {
          add(path, cat("'", v.as<EnumV>().name, "' is not an item"));
        }
        return;
      case PlanKind::kStringAsciiNull:
      case PlanKind::kStringCharIndex: {
        const auto& s = v.as<StrV>().bytes;
        const auto len = static_cast<std::int64_t>(s.size());
        if (len < n.min || len > n.max) {
          add(path, cat("length ", len, " is outside [", n.min, ", ", n.max, "]"));
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (!n.alphabet->contains(s[i])) {
            add(path, cat("character code ", unsigned{s[i]}, " at index ", i,
                          " is not in the permitted alphabet"));
          }
        }
        if (n.kind == PlanKind::kStringAsciiNull && !terminator_is_unambiguous(s, n.terminator)) {
          add(path, "string contains its own termination pattern");
        }
        return;
      }
      case PlanKind::kAlign:
      case PlanKind::kOutlined:
        node(*n.child, v, path);
        return;
      case PlanKind::kRecord:
        record(n, v.as<RecordV>(), path);
        return;
      case PlanKind::kVariant: {
        const auto& vv = v.as<VariantV>();
        for (const auto& a : n.alternatives) {
          if (a.name == vv.name) node(*a.node, *vv.inner, field_path(path, a.name));
        }
        return;
      }
      case PlanKind::kList: {
        const auto& l = v.as<ListV>();
        const auto len = static_cast<std::int64_t>(l.items.size());
        if (len < n.min || len > n.max) {
          add(path, cat("list length ", len, " is outside [", n.min, ", ", n.max, "]"));
        }
        for (std::size_t i = 0; i < l.items.size(); ++i) node(*n.child, l.items[i], index_path(path, i));
        return;
      }
      default:
        return;
    }
  }

 private:
  void add(const std::string& path, std::string message) {
    out_.push_back({where(path), std::move(message)});
  }

  void record(const PlanNode& n, const RecordV& rv, const std::string& path) {
    for (std::size_t i = 0; i < n.fields.size(); ++i) {
      const PlanField& f = n.fields[i];
      const std::string fp = field_path(path, f.name);
      const std::set<std::int64_t> req = slots_.requirements_after(n, rv, i);
      if (f.inserted) {
        if (req.size() > 1) {
          add(fp, cat("consumers need ", req.size(), " different values (", *req.begin(), " and ",
                      *req.rbegin(), ")"));
        } else if (req.size() == 1) {
          if (!representable(*f.node, *req.begin())) {
            add(fp, cat("value ", *req.begin(), " needed by its consumers is not representable"));
          }
        }
        continue;
      }
      const Value* fv = record_field(rv, f.name);
      if (!fv) continue;
      node(*f.node, *fv, fp);
      if (!f.produces.empty() && !req.empty()) {
        const auto x = slots_.numeric(f.produces, *fv);
        if (!x || req.size() > 1 || *req.begin() != *x) {
          add(fp, "value disagrees with the fields that depend on it");
        }
      }
    }
  }

  static bool representable(const PlanNode& n, std::int64_t x) {
    switch (n.kind) {
      case PlanKind::kAlign:
      case PlanKind::kOutlined:
        return representable(*n.child, x);
      case PlanKind::kConstraintCheck:
        return x >= n.min && x <= n.max && representable(*n.child, x);
      case PlanKind::kEnumerated:
        return n.item_by_value(x) != nullptr;
      case PlanKind::kBool:
        return x == 0 || x == 1;
      default:
        return is_int_kind(n.kind) && int_fits(n, x);
    }
  }

  SlotIndex slots_;
  std::vector<Violation>& out_;
};

}  // namespace

// ---------------------------------------------------------------------------

Result<Value> conform(const CodecPlan& plan, const Value& v) { return Conformer().node(*plan.root, v, ""); }

Result<EncodeReport> encode(const CodecPlan& plan, const Value& v, AcnCodec& codec) {
  const std::uint64_t start = codec.bit_index();
  if (codec.remaining_bits() < plan.bounds().max_bits) {
    return make_error(ErrorCode::kInsufficientBuffer, "encoding needs up to ",
                      plan.bounds().max_bits, " bits, ", codec.remaining_bits(), " remaining");
  }
  ACNKIT_ASSIGN_OR_RETURN(Value canon, conform(plan, v));
  ACNKIT_TRY(Encoder(plan, codec).node(*plan.root, canon, ""));
  EncodeReport report;
  report.start_offset = start;
  report.bit_length = codec.bit_index() - start;
  const auto buf = codec.stream().buffer();
  const std::uint64_t first = start / 8;
  const std::uint64_t last = (codec.bit_index() + 7) / 8;
  report.bytes.assign(buf.begin() + static_cast<std::ptrdiff_t>(first),
                      buf.begin() + static_cast<std::ptrdiff_t>(last));
  return report;
}

Result<Value> decode(const CodecPlan& plan, AcnCodec& codec, SlotValues* slots) {
  return DecoderImpl(plan, codec, slots).node(*plan.root, "");
}

Result<std::uint64_t> size_of(const CodecPlan& plan, const Value& v, std::uint64_t offset_bits) {
  ACNKIT_ASSIGN_OR_RETURN(Value canon, conform(plan, v));
  return Sizer().node(*plan.root, &canon, offset_bits);
}

std::vector<Violation> check_constraints(const CodecPlan& plan, const Value& v) {
  std::vector<Violation> out;
  auto canon = conform(plan, v);
  if (!canon.ok()) {
    out.push_back({"value", canon.error().message});
    return out;
  }
  Checker(plan, out).node(*plan.root, *canon, "");
  return out;
}

// ---------------------------------------------------------------------------
// Invertibility contracts

bool RoundtripReport::passed() const {
  if (contracts.size() != contract_names().size()) return false;
  return std::all_of(contracts.begin(), contracts.end(), [](const auto& c) { return c.passed; });
}

std::string RoundtripReport::first_failure() const {
  for (const auto& c : contracts) {
    if (!c.passed) return c.name;
  }
  return {};
}

const std::vector<std::string>& contract_names() {
  static const std::vector<std::string> names = {
      "encode-succeeds",     "buffer-length-unchanged", "prior-bits-intact",
      "advance-equals-size-of", "size-within-bounds",   "decode-succeeds",
      "value-equality",      "cursor-equality",         "prefix-fuzz",
  };
  return names;
}

RoundtripReport roundtrip_check(const CodecPlan& plan, const Value& v,
                                const RoundtripOptions& options) {
  RoundtripReport report;
  auto record = [&](std::size_t i, bool ok, std::string detail = {}) {
    report.contracts.push_back({contract_names()[i], ok, std::move(detail)});
    return ok;
  };
  const Decoder decoder =
      options.decoder ? options.decoder
                      : Decoder([](const CodecPlan& p, AcnCodec& c) { return decode(p, c); });
  std::mt19937_64 rng(options.seed);
  const std::uint64_t offset = options.offset_bits;
  const std::uint64_t slack_bytes = 8;
  const std::uint64_t capacity = (offset + plan.bounds().max_bits + 7) / 8 + slack_bytes;
  if (capacity > BitStream::kDefaultCapacityCap) {
    record(0, false, cat("buffer of ", capacity, " bytes exceeds the capacity cap"));
    return report;
  }
  std::vector<std::uint8_t> initial(capacity);
  for (auto& b : initial) b = static_cast<std::uint8_t>(rng());

  auto codec_at = [&](std::vector<std::uint8_t> bytes) -> Result<AcnCodec> {
    ACNKIT_ASSIGN_OR_RETURN(BitStream s, BitStream::wrap(std::move(bytes)));
    ACNKIT_TRY(s.set_bit_index(offset));
    return AcnCodec(std::move(s));
  };

  auto canon = conform(plan, v);
  auto enc_codec = codec_at(initial);
  if (!canon.ok() || !enc_codec.ok()) {
    record(0, false, !canon.ok() ? canon.error().describe() : enc_codec.error().describe());
    return report;
  }
  AcnCodec& codec = *enc_codec;
  auto encoded = encode(plan, *canon, codec);
  if (!record(0, encoded.ok(), encoded.ok() ? "" : encoded.error().describe())) return report;
  const std::uint64_t end = codec.bit_index();
  const std::uint64_t advance = end - offset;
  report.bit_length = advance;

  record(1, codec.stream().buffer_length() == initial.size(),
         cat("buffer length ", codec.stream().buffer_length(), ", was ", initial.size()));
  auto prior = bit_ranges_equal(initial, codec.stream().buffer(), 0, offset);
  record(2, prior.ok() && *prior, "bits before the start offset changed");

  auto size = size_of(plan, *canon, offset);
  record(3, size.ok() && *size == advance,
         size.ok() ? cat("cursor advanced ", advance, " bits, size_of says ", *size)
                   : size.error().describe());
  const SizeBounds& b = plan.bounds();
  record(4, advance >= b.min_bits && advance <= b.max_bits,
         cat(advance, " bits outside [", b.min_bits, ", ", b.max_bits, "]"));

  const std::vector<std::uint8_t> written(codec.stream().buffer().begin(),
                                          codec.stream().buffer().end());
  auto dec_codec = codec_at(written);
  Result<Value> decoded = dec_codec.ok() ? decoder(plan, *dec_codec) : Result<Value>(dec_codec.error());
  if (!record(5, decoded.ok(), decoded.ok() ? "" : decoded.error().describe())) return report;
  record(6, *decoded == *canon,
         cat("decoded ", print_value_json(*decoded, -1), ", expected ", print_value_json(*canon, -1)));
  record(7, dec_codec->bit_index() == end,
         cat("decoder stopped at bit ", dec_codec->bit_index(), ", encoder at ", end));

  const std::uint64_t total_bits = written.size() * 8;
  std::string fuzz_failure;
  for (unsigned k = 0; k < options.fuzz_cases && fuzz_failure.empty() && total_bits > end; ++k) {
    std::vector<std::uint8_t> mutated = written;
    std::uniform_int_distribution<std::uint64_t> pick(end, total_bits - 1);
    const unsigned flips = 1 + static_cast<unsigned>(rng() % 8);
    for (unsigned i = 0; i < flips; ++i) {
      const std::uint64_t bit = pick(rng);
      mutated[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
    }
    auto fuzz_codec = codec_at(std::move(mutated));
    if (!fuzz_codec.ok()) {
      fuzz_failure = fuzz_codec.error().describe();
      break;
    }
    auto again = decoder(plan, *fuzz_codec);
    ++report.fuzz_runs;
    if (!again.ok()) {
      fuzz_failure = cat("case ", k, ": decode failed: ", again.error().describe());
    } else if (!(*again == *canon) || fuzz_codec->bit_index() != end) {
      fuzz_failure = cat("case ", k, ": flipping bits beyond the message changed the result");
    }
  }
  record(8, fuzz_failure.empty(), fuzz_failure);
  return report;
}

}  // namespace acnkit
