#include <algorithm>
#include <map>
#include <set>

#include "acnkit/compiler.hpp"

namespace acnkit {

namespace {

Error compile_error(const SourceSpan& span, SourceKind source, std::string message) {
  Error e{ErrorCode::kCompile, message, {}};
  e.diagnostics.push_back({span, std::move(message), source});
  return e;
}

std::string join_path(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

std::optional<SlotKind> slot_kind_of(const AsnType& t) {
  switch (t.kind) {
    case AsnKind::kInteger: return SlotKind::kInteger;
    case AsnKind::kEnumerated: return SlotKind::kEnumerated;
    case AsnKind::kBoolean: return SlotKind::kBoolean;
    default: return std::nullopt;
  }
}

struct CEntry {
  std::string name;
  std::size_t index = 0;
  std::string global;
  std::optional<SlotKind> kind;
  std::size_t seq = 0;
};

struct CRecord {
  std::vector<PlanField>* fields = nullptr;
  std::vector<CEntry> visible;
};

struct CFrame {
  std::vector<CRecord*> records;
  std::vector<PlanParam> params;  // parameter name -> global slot
};

// A property in force at a node, with the frame it was written in so that
// field references resolve where they were written.
struct EffProp {
  const AcnProperty* prop = nullptr;
  const SlotRef* ref = nullptr;
  CFrame* frame = nullptr;
};
using Eff = std::map<AcnPropKind, EffProp>;

bool fits_unsigned(std::int64_t lo, std::int64_t hi, unsigned n) {
  if (lo < 0) return false;
  return n >= 64 || static_cast<std::uint64_t>(hi) < (std::uint64_t{1} << n);
}

bool fits_signed(std::int64_t lo, std::int64_t hi, unsigned n) {
  if (n >= 64) return true;
  const std::int64_t limit = std::int64_t{1} << (n - 1);
  return lo >= -limit && hi <= limit - 1;
}

class Compiler {
 public:
  explicit Compiler(const ResolvedSchema& schema) : schema_(schema) {}

  Result<CodecPlan> run(std::string_view type_name) {
    const ResolvedType* t = schema_.find(type_name);
    if (!t) return make_error(ErrorCode::kInvalidArgument, "no type assignment named '", type_name, "'");
    if (!t->params.empty()) {
      return make_error(ErrorCode::kInvalidArgument, "'", type_name,
                        "' is parameterized and cannot be compiled on its own");
    }
    CFrame frame;
    CodecPlan plan;
    plan.type_name = std::string(type_name);
    ACNKIT_ASSIGN_OR_RETURN(plan.root, node(*t->root, "", frame, {}));
    std::vector<std::pair<std::size_t, PlanSlot>> ordered;
    for (const auto& [name, s] : slots_) ordered.push_back({s.first, PlanSlot{name, s.second}});
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& o : ordered) plan.slots.push_back(std::move(o.second));
    ACNKIT_TRY(validate_plan(plan));
    return plan;
  }

 private:
  Result<PlanNodePtr> finish(PlanNode n, const SourceSpan& span) {
    n.bounds = compute_bounds(n);
    if (n.bounds.max_bits > kMaxPlanBits) {
      return compile_error(span, SourceKind::kAcn,
                           cat("encoding may need more than 2^48 bits; tighten the size constraints"));
    }
    return PlanNodePtr(std::make_shared<PlanNode>(std::move(n)));
  }

  std::string lookup(const SlotRef& ref, CFrame& frame) {
    if (ref.kind == SlotRef::Kind::kParam) {
      for (const auto& p : frame.params) {
        if (p.param == ref.name) return p.slot;
      }
      return {};
    }
    for (auto r = frame.records.rbegin(); r != frame.records.rend(); ++r) {
      for (const auto& e : (*r)->visible) {
        if (e.name != ref.name) continue;
        (*(*r)->fields)[e.index].produces = e.global;
        slots_.emplace(e.global, std::make_pair(e.seq, *e.kind));
        return e.global;
      }
    }
    return {};
  }

  std::string lookup(const EffProp& p) { return lookup(*p.ref, *p.frame); }

  static const AcnProperty* get(const Eff& eff, AcnPropKind kind) {
    auto it = eff.find(kind);
    return it == eff.end() ? nullptr : it->second.prop;
  }

  Result<PlanNodePtr> node(const ResolvedNode& rn, const std::string& path, CFrame& frame,
                           const Eff& outer) {
    Eff eff;
    for (const auto& p : rn.props) {
      EffProp e{&p, nullptr, &frame};
      if (p.kind == AcnPropKind::kSize && rn.size_ref) e.ref = &*rn.size_ref;
      if (p.kind == AcnPropKind::kDeterminant && rn.determinant) e.ref = &*rn.determinant;
      eff[p.kind] = e;
    }
    for (const auto& [k, v] : outer) eff[k] = v;

    if (!rn.target.empty()) return reference(rn, path, frame, std::move(eff));

    PlanNodePtr inner;
    const AsnType& base = *rn.base;
    switch (base.kind) {
      case AsnKind::kInteger: {
        ACNKIT_ASSIGN_OR_RETURN(inner, integer(rn, eff));
        break;
      }
      case AsnKind::kEnumerated: {
        ACNKIT_ASSIGN_OR_RETURN(inner, enumerated(rn, eff));
        break;
      }
      case AsnKind::kReal: {
        ACNKIT_ASSIGN_OR_RETURN(inner, real(rn, eff));
        break;
      }
      case AsnKind::kBoolean: {
        PlanNode n;
        n.kind = PlanKind::kBool;
        ACNKIT_ASSIGN_OR_RETURN(inner, finish(std::move(n), rn.span));
        break;
      }
      case AsnKind::kNull: {
        PlanNode n;
        n.kind = PlanKind::kNull;
        ACNKIT_ASSIGN_OR_RETURN(inner, finish(std::move(n), rn.span));
        break;
      }
      case AsnKind::kIA5String: {
        ACNKIT_ASSIGN_OR_RETURN(inner, string(rn, eff));
        break;
      }
      case AsnKind::kSequence: {
        ACNKIT_ASSIGN_OR_RETURN(inner, record(rn, path, frame));
        break;
      }
      case AsnKind::kChoice: {
        ACNKIT_ASSIGN_OR_RETURN(inner, variant(rn, path, frame, eff));
        break;
      }
      case AsnKind::kSequenceOf: {
        ACNKIT_ASSIGN_OR_RETURN(inner, list(rn, path, frame, eff));
        break;
      }
      case AsnKind::kReference:
        return make_error(ErrorCode::kCompile, "unresolved reference at ", path);
    }
    return align(std::move(inner), eff, rn.span);
  }

  Result<PlanNodePtr> align(PlanNodePtr inner, const Eff& eff, const SourceSpan& span) {
    const AcnProperty* a = get(eff, AcnPropKind::kAlignToNext);
    if (!a) return inner;
    PlanNode n;
    n.kind = PlanKind::kAlign;
    n.width = a->text == "byte" ? 8 : a->text == "word" ? 16 : 32;
    n.child = std::move(inner);
    return finish(std::move(n), span);
  }

  Result<PlanNodePtr> reference(const ResolvedNode& rn, const std::string& path, CFrame& frame,
                                Eff eff) {
    const ResolvedType* t = schema_.find(rn.target);
    CFrame inner;
    for (std::size_t i = 0; i < rn.args.size(); ++i) {
      inner.params.push_back({t->params[i].name, lookup(rn.args[i], frame)});
    }
    if (rn.args.empty()) return node(*t->root, path, inner, eff);

    Eff outside;
    if (auto it = eff.find(AcnPropKind::kAlignToNext); it != eff.end()) {
      outside.insert(*it);
      eff.erase(it);
    }
    ACNKIT_ASSIGN_OR_RETURN(PlanNodePtr body, node(*t->root, path, inner, eff));
    PlanNode n;
    n.kind = PlanKind::kOutlined;
    n.name = t->name + "__" + path;
    n.params = inner.params;
    n.child = std::move(body);
    ACNKIT_ASSIGN_OR_RETURN(PlanNodePtr out, finish(std::move(n), rn.span));
    return align(std::move(out), outside, rn.span);
  }

  // Fixed-width integer node for `size n` with the given encoding keyword.
  Result<PlanNodePtr> fixed_int(unsigned n_bits, bool twos, const SourceSpan& span) {
    PlanNode n;
    n.width = n_bits;
    if (twos) {
      n.kind = PlanKind::kTwosComplement;
    } else if (n_bits == 8 || n_bits == 16 || n_bits == 32 || n_bits == 64) {
      n.kind = PlanKind::kConstUInt;
    } else {
      n.kind = PlanKind::kUIntBits;
    }
    return finish(std::move(n), span);
  }

  struct IntEncoding {
    unsigned bits = 0;  // 0: constrained-number default
    bool twos = false;
  };

  // Shared by INTEGER and ENUMERATED: reads size/encoding/endianness and
  // checks the value range fits.
  Result<IntEncoding> int_encoding(const Eff& eff, std::optional<IntRange> range,
                                   const SourceSpan& span, std::string_view what) {
    const AcnProperty* size = get(eff, AcnPropKind::kSize);
    const AcnProperty* enc = get(eff, AcnPropKind::kEncoding);
    if (const AcnProperty* e = get(eff, AcnPropKind::kEndianness); e && e->text == "little") {
      return compile_error(e->span, SourceKind::kAcn,
                           cat("endianness little is not supported for ", what));
    }
    if (enc && enc->text != "pos-int" && enc->text != "twos-complement") {
      return compile_error(enc->span, SourceKind::kAcn,
                           cat("encoding ", enc->text, " is not supported for ", what));
    }
    IntEncoding out;
    if (!size) {
      if (enc) {
        return compile_error(enc->span, SourceKind::kAcn,
                             cat("encoding ", enc->text, " needs an ACN size"));
      }
      if (!range) {
        return compile_error(span, SourceKind::kAcn, cat(what, " needs a value range or an ACN size"));
      }
      return out;
    }
    const std::uint64_t n = *size->number;
    if (n == 0 || n > 64) {
      return compile_error(size->span, SourceKind::kAcn, cat("size ", n, " is outside 1..64"));
    }
    out.bits = static_cast<unsigned>(n);
    out.twos = enc ? enc->text == "twos-complement" : (range && range->lo < 0);
    if (range) {
      const bool ok = out.twos ? fits_signed(range->lo, range->hi, out.bits)
                               : fits_unsigned(range->lo, range->hi, out.bits);
      if (!ok) {
        return compile_error(size->span, SourceKind::kAcn,
                             cat("range ", range->lo, "..", range->hi, " does not fit ", n, "-bit ",
                                 out.twos ? "twos-complement" : "pos-int"));
      }
    }
    return out;
  }

  Result<PlanNodePtr> integer(const ResolvedNode& rn, const Eff& eff) {
    const auto& range = rn.base->range;
    ACNKIT_ASSIGN_OR_RETURN(IntEncoding enc, int_encoding(eff, range, rn.span, "INTEGER"));
    PlanNodePtr inner;
    if (enc.bits == 0) {
      PlanNode n;
      n.kind = PlanKind::kConstrainedNumber;
      n.min = range->lo;
      n.max = range->hi;
      ACNKIT_ASSIGN_OR_RETURN(inner, finish(std::move(n), rn.span));
    } else {
      ACNKIT_ASSIGN_OR_RETURN(inner, fixed_int(enc.bits, enc.twos, rn.span));
    }
    if (!range) return inner;
    PlanNode check;
    check.kind = PlanKind::kConstraintCheck;
    check.min = range->lo;
    check.max = range->hi;
    check.child = std::move(inner);
    return finish(std::move(check), rn.span);
  }

  Result<PlanNodePtr> enumerated(const ResolvedNode& rn, const Eff& eff) {
    PlanNode n;
    n.kind = PlanKind::kEnumerated;
    IntRange range{rn.base->items.front().value, rn.base->items.front().value};
    for (const auto& it : rn.base->items) {
      n.items.push_back({it.name, it.value});
      range.lo = std::min(range.lo, it.value);
      range.hi = std::max(range.hi, it.value);
    }
    ACNKIT_ASSIGN_OR_RETURN(IntEncoding enc, int_encoding(eff, range, rn.span, "ENUMERATED"));
    if (enc.bits == 0) {
      PlanNode c;
      c.kind = PlanKind::kConstrainedNumber;
      c.min = range.lo;
      c.max = range.hi;
      ACNKIT_ASSIGN_OR_RETURN(n.child, finish(std::move(c), rn.span));
    } else {
      ACNKIT_ASSIGN_OR_RETURN(n.child, fixed_int(enc.bits, enc.twos, rn.span));
    }
    return finish(std::move(n), rn.span);
  }

  Result<PlanNodePtr> real(const ResolvedNode& rn, const Eff& eff) {
    PlanNode n;
    n.kind = PlanKind::kReal;
    n.width = 64;
    if (const AcnProperty* enc = get(eff, AcnPropKind::kEncoding)) {
      if (enc->text == "IEEE754-1985-32") {
        n.width = 32;
      } else if (enc->text != "IEEE754-1985-64") {
        return compile_error(enc->span, SourceKind::kAcn,
                             cat("encoding ", enc->text, " is not supported for REAL"));
      }
    }
    if (const AcnProperty* e = get(eff, AcnPropKind::kEndianness)) {
      n.endianness = e->text == "little" ? Endianness::kLittle : Endianness::kBig;
    }
    return finish(std::move(n), rn.span);
  }

  Result<PlanNodePtr> string(const ResolvedNode& rn, const Eff& eff) {
    const AsnType& base = *rn.base;
    if (!base.size) {
      return compile_error(base.span, SourceKind::kAsn1, "IA5String needs a SIZE constraint");
    }
    PlanNode n;
    n.min = base.size->lo;
    n.max = base.size->hi;
    const std::string chars = base.alphabet.empty() ? std::string() : expand_alphabet(base.alphabet);
    if (chars.empty()) {
      n.alphabet = Alphabet::ascii();
    } else {
      auto a = Alphabet::create(chars);
      if (!a.ok()) return compile_error(base.span, SourceKind::kAsn1, a.error().message);
      n.alphabet = std::move(a).value();
    }
    auto size_it = eff.find(AcnPropKind::kSize);
    const AcnProperty* term = get(eff, AcnPropKind::kTerminationPattern);
    if (size_it != eff.end() && size_it->second.prop->text == "null-terminated") {
      n.kind = PlanKind::kStringAsciiNull;
      n.terminator = term ? term->pattern : std::vector<std::uint8_t>{0x00};
    } else {
      if (term) {
        return compile_error(term->span, SourceKind::kAcn,
                             "termination-pattern needs size null-terminated");
      }
      n.kind = PlanKind::kStringCharIndex;
      if (size_it != eff.end()) n.slot = lookup(size_it->second);
    }
    return finish(std::move(n), rn.span);
  }

  Result<PlanNodePtr> record(const ResolvedNode& rn, const std::string& path, CFrame& frame) {
    PlanNode n;
    n.kind = PlanKind::kRecord;
    CRecord scope{&n.fields, {}};
    frame.records.push_back(&scope);
    for (const auto& f : rn.fields) {
      PlanField pf;
      pf.name = f.name;
      pf.inserted = f.inserted;
      pf.optional = f.optional;
      if (f.present_when) pf.present_slot = lookup(*f.present_when, frame);
      const std::string child_path = join_path(path, f.name);
      auto child = node(*f.node, child_path, frame, {});
      if (!child.ok()) {
        frame.records.pop_back();
        return std::move(child).error();
      }
      pf.node = std::move(child).value();
      n.fields.push_back(std::move(pf));
      scope.visible.push_back(
          {f.name, n.fields.size() - 1, child_path, slot_kind_of(*f.node->base), seq_++});
    }
    frame.records.pop_back();
    return finish(std::move(n), rn.span);
  }

  Result<PlanNodePtr> variant(const ResolvedNode& rn, const std::string& path, CFrame& frame,
                              const Eff& eff) {
    PlanNode n;
    n.kind = PlanKind::kVariant;
    auto det = eff.find(AcnPropKind::kDeterminant);
    if (det != eff.end()) n.slot = lookup(det->second);
    for (const auto& f : rn.fields) {
      PlanAlternative alt;
      alt.name = f.name;
      if (!n.slot.empty()) alt.when = f.name;
      ACNKIT_ASSIGN_OR_RETURN(alt.node, node(*f.node, join_path(path, f.name), frame, {}));
      n.alternatives.push_back(std::move(alt));
    }
    return finish(std::move(n), rn.span);
  }

  Result<PlanNodePtr> list(const ResolvedNode& rn, const std::string& path, CFrame& frame,
                           const Eff& eff) {
    const AsnType& base = *rn.base;
    if (!base.size) {
      return compile_error(base.span, SourceKind::kAsn1, "SEQUENCE OF needs a SIZE constraint");
    }
    PlanNode n;
    n.kind = PlanKind::kList;
    n.min = base.size->lo;
    n.max = base.size->hi;
    auto size_it = eff.find(AcnPropKind::kSize);
    if (size_it != eff.end()) n.slot = lookup(size_it->second);
    ACNKIT_ASSIGN_OR_RETURN(n.child, node(*rn.element, join_path(path, "#"), frame, {}));
    return finish(std::move(n), rn.span);
  }

  const ResolvedSchema& schema_;
  std::map<std::string, std::pair<std::size_t, SlotKind>> slots_;
  std::size_t seq_ = 0;
};

}  // namespace

Result<CodecPlan> compile(const ResolvedSchema& schema, std::string_view type_name) {
  return Compiler(schema).run(type_name);
}

Result<SizeBounds> size_bounds(const ResolvedSchema& schema, std::string_view type_name) {
  ACNKIT_ASSIGN_OR_RETURN(CodecPlan plan, compile(schema, type_name));
  return plan.bounds();
}

Result<CodecPlan> compile_text(std::string_view asn1_text, std::string_view acn_text,
                               std::string_view type_name) {
  ACNKIT_ASSIGN_OR_RETURN(AsnModule asn, parse_asn1(asn1_text));
  ACNKIT_ASSIGN_OR_RETURN(AcnSpec acn, parse_acn(acn_text));
  ACNKIT_ASSIGN_OR_RETURN(ResolvedSchema schema, resolve(asn, acn));
  return compile(schema, type_name);
}

}  // namespace acnkit
