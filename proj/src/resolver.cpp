#include <algorithm>
#include <map>
#include <set>

#include "acnkit/compiler.hpp"

namespace acnkit {

const ResolvedType* ResolvedSchema::find(std::string_view name) const {
  for (const auto& t : types) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

namespace {

Error resolve_error(const SourceSpan& span, SourceKind source, std::string message) {
  Error e{ErrorCode::kResolve, message, {}};
  e.diagnostics.push_back({span, std::move(message), source});
  return e;
}

AsnTypePtr builtin(AsnKind kind) {
  auto t = std::make_shared<AsnType>();
  t->kind = kind;
  return t;
}

bool is_builtin_name(std::string_view name) { return name == "INTEGER" || name == "BOOLEAN"; }

bool prop_applies(AcnPropKind prop, AsnKind kind) {
  switch (prop) {
    case AcnPropKind::kAlignToNext:
      return true;
    case AcnPropKind::kSize:
      return kind == AsnKind::kInteger || kind == AsnKind::kEnumerated ||
             kind == AsnKind::kIA5String || kind == AsnKind::kSequenceOf;
    case AcnPropKind::kEncoding:
    case AcnPropKind::kEndianness:
      return kind == AsnKind::kInteger || kind == AsnKind::kEnumerated || kind == AsnKind::kReal;
    case AcnPropKind::kDeterminant:
      return kind == AsnKind::kChoice;
    case AcnPropKind::kTerminationPattern:
      return kind == AsnKind::kIA5String;
    case AcnPropKind::kPresentWhen:
      return false;  // handled at field level
  }
  return false;
}

struct ScopeEntry {
  std::string name;
  AsnTypePtr base;
  bool optional = false;
};

struct RecordScope {
  std::vector<ScopeEntry> before;  // fields preceding the one being resolved
  std::vector<std::string> rest;   // that field and everything after it
};

struct Frame {
  const std::vector<AcnParam>* params = nullptr;
  const std::vector<AsnTypePtr>* param_types = nullptr;
  std::vector<RecordScope> records;
};

struct Lookup {
  SlotRef ref;
  AsnTypePtr base;
};

class Resolver {
 public:
  Resolver(const AsnModule& asn, const AcnSpec& acn) : asn_(asn), acn_(acn) {}

  Result<ResolvedSchema> run() {
    for (const auto& e : acn_.entries) {
      if (!asn_.find(e.type_name)) {
        return resolve_error(e.span, SourceKind::kAcn,
                             cat("ACN entry for unknown type '", e.type_name, "'"));
      }
    }
    ACNKIT_TRY(check_references());
    ACNKIT_TRY(check_recursion());
    ResolvedSchema schema;
    for (const auto& a : asn_.assignments) {
      ACNKIT_ASSIGN_OR_RETURN(ResolvedType t, resolve_assignment(a));
      schema.types.push_back(std::move(t));
    }
    return schema;
  }

 private:
  // Every reference in the ASN.1 text names an assignment.
  Status check_references() {
    for (const auto& a : asn_.assignments) ACNKIT_TRY(check_refs_in(a.type));
    return {};
  }

  Status check_refs_in(const AsnTypePtr& t) {
    if (t->kind == AsnKind::kReference && !asn_.find(t->ref)) {
      return resolve_error(t->span, SourceKind::kAsn1, cat("unknown type '", t->ref, "'"));
    }
    for (const auto& c : t->components) ACNKIT_TRY(check_refs_in(c.type));
    if (t->element) ACNKIT_TRY(check_refs_in(t->element));
    return {};
  }

  static void collect_refs(const AsnTypePtr& t, std::vector<const AsnType*>& out) {
    if (t->kind == AsnKind::kReference) out.push_back(t.get());
    for (const auto& c : t->components) collect_refs(c.type, out);
    if (t->element) collect_refs(t->element, out);
  }

  Status check_recursion() {
    std::map<std::string, int> state;  // 1 on stack, 2 done
    std::vector<std::string> stack;
    for (const auto& a : asn_.assignments) ACNKIT_TRY(visit(a, state, stack));
    return {};
  }

  Status visit(const TypeAssignment& a, std::map<std::string, int>& state,
               std::vector<std::string>& stack) {
    auto& s = state[a.name];
    if (s == 2) return {};
    s = 1;
    stack.push_back(a.name);
    std::vector<const AsnType*> refs;
    collect_refs(a.type, refs);
    for (const AsnType* r : refs) {
      const int target = state[r->ref];
      if (target == 1) {
        std::string chain;
        auto from = std::find(stack.begin(), stack.end(), r->ref);
        for (auto it = from; it != stack.end(); ++it) chain += *it + " -> ";
        return resolve_error(r->span, SourceKind::kAsn1,
                             cat("recursive type: ", chain, r->ref));
      }
      if (target == 0) ACNKIT_TRY(visit(*asn_.find(r->ref), state, stack));
    }
    stack.pop_back();
    state[a.name] = 2;
    return {};
  }

  AsnTypePtr chase(AsnTypePtr t) const {
    while (t->kind == AsnKind::kReference) t = asn_.find(t->ref)->type;
    return t;
  }

  // Parameter and inserted-field types: INTEGER, BOOLEAN or an assignment.
  Result<AsnTypePtr> named_type(const std::string& name, const SourceSpan& span) const {
    if (name == "INTEGER") return builtin(AsnKind::kInteger);
    if (name == "BOOLEAN") return builtin(AsnKind::kBoolean);
    const auto* a = asn_.find(name);
    if (!a) return resolve_error(span, SourceKind::kAcn, cat("unknown type '", name, "'"));
    return chase(a->type);
  }

  static bool same_kind(const AsnType& a, const AsnType& b) {
    if (a.kind != b.kind) return false;
    if (a.kind != AsnKind::kEnumerated) return true;
    if (a.items.size() != b.items.size()) return false;
    for (std::size_t i = 0; i < a.items.size(); ++i) {
      if (a.items[i].name != b.items[i].name) return false;
    }
    return true;
  }

  Result<Lookup> lookup(const std::string& name, const SourceSpan& span, const Frame& frame) const {
    if (name.find('.') != std::string::npos) {
      return resolve_error(span, SourceKind::kAcn,
                           cat("dotted reference '", name,
                               "' is not supported; name a preceding field or a parameter"));
    }
    for (auto r = frame.records.rbegin(); r != frame.records.rend(); ++r) {
      for (const auto& e : r->before) {
        if (e.name != name) continue;
        if (e.optional) {
          return resolve_error(span, SourceKind::kAcn,
                               cat("'", name, "' is OPTIONAL and cannot be referenced"));
        }
        return Lookup{SlotRef{SlotRef::Kind::kField, name, span}, e.base};
      }
      if (std::find(r->rest.begin(), r->rest.end(), name) != r->rest.end()) {
        return resolve_error(span, SourceKind::kAcn,
                             cat("'", name, "' is encoded after the field that references it"));
      }
    }
    if (frame.params) {
      for (std::size_t i = 0; i < frame.params->size(); ++i) {
        if ((*frame.params)[i].name == name) {
          return Lookup{SlotRef{SlotRef::Kind::kParam, name, span}, (*frame.param_types)[i]};
        }
      }
    }
    return resolve_error(span, SourceKind::kAcn, cat("unresolved reference '", name, "'"));
  }

  Result<ResolvedType> resolve_assignment(const TypeAssignment& a) {
    ResolvedType out;
    out.name = a.name;
    const AcnEntry* entry = acn_.find(a.name);
    if (entry) {
      out.params = entry->params;
      for (const auto& p : entry->params) {
        ACNKIT_ASSIGN_OR_RETURN(AsnTypePtr pt, named_type(p.type_name, p.span));
        if (pt->kind != AsnKind::kInteger && pt->kind != AsnKind::kEnumerated &&
            pt->kind != AsnKind::kBoolean) {
          return resolve_error(p.span, SourceKind::kAcn,
                               cat("parameter '", p.name, "' must be INTEGER, ENUMERATED or BOOLEAN"));
        }
        out.param_types.push_back(pt);
      }
    }
    Frame frame{&out.params, &out.param_types, {}};
    static const std::vector<AcnProperty> kNoProps;
    static const std::vector<AcnChild> kNoChildren;
    static const std::vector<std::string> kNoArgs;
    ACNKIT_ASSIGN_OR_RETURN(
        out.root, node(a.type, entry ? entry->props : kNoProps,
                       entry ? entry->children : kNoChildren, entry && entry->has_children, kNoArgs,
                       entry ? entry->span : a.span, frame));
    return out;
  }

  Result<ResolvedNodePtr> node(const AsnTypePtr& type, const std::vector<AcnProperty>& props,
                               const std::vector<AcnChild>& children, bool has_children,
                               const std::vector<std::string>& args, const SourceSpan& acn_span,
                               Frame& frame) {
    auto n = std::make_shared<ResolvedNode>();
    n->type = type;
    n->span = acn_span;
    n->props = props;
    if (type->kind == AsnKind::kReference) {
      n->target = type->ref;
      if (has_children) {
        return resolve_error(acn_span, SourceKind::kAcn,
                             cat("a reference to '", type->ref,
                                 "' takes no child entries here; put them on the type's own entry"));
      }
      const AcnEntry* target_entry = acn_.find(type->ref);
      const std::size_t arity = target_entry ? target_entry->params.size() : 0;
      if (args.size() != arity) {
        return resolve_error(acn_span, SourceKind::kAcn,
                             cat("'", type->ref, "' takes ", arity, " argument(s), got ", args.size()));
      }
      for (std::size_t i = 0; i < args.size(); ++i) {
        ACNKIT_ASSIGN_OR_RETURN(Lookup l, lookup(args[i], acn_span, frame));
        const AcnParam& p = target_entry->params[i];
        ACNKIT_ASSIGN_OR_RETURN(AsnTypePtr pt, named_type(p.type_name, p.span));
        if (!same_kind(*l.base, *pt)) {
          return resolve_error(acn_span, SourceKind::kAcn,
                               cat("argument '", args[i], "' does not match parameter '", p.name,
                                   "' of type ", p.type_name));
        }
        n->args.push_back(l.ref);
      }
      n->base = chase(type);
    } else {
      if (!args.empty()) {
        return resolve_error(acn_span, SourceKind::kAcn, "arguments given to a type that takes none");
      }
      n->base = type;
    }
    const AsnType& base = *n->base;

    for (const auto& p : props) {
      if (!prop_applies(p.kind, base.kind)) {
        return resolve_error(p.span, SourceKind::kAcn,
                             cat("property '", to_string(p.kind), "' does not apply to ",
                                 to_string(base.kind)));
      }
    }
    if (const auto* p = find_prop(props, AcnPropKind::kSize)) {
      const bool numeric_kind = base.kind == AsnKind::kInteger || base.kind == AsnKind::kEnumerated;
      if (numeric_kind != p->number.has_value()) {
        return resolve_error(p->span, SourceKind::kAcn,
                             numeric_kind ? cat("size of ", to_string(base.kind), " must be a bit count")
                                          : cat("size of ", to_string(base.kind),
                                                " must be null-terminated or a field reference"));
      }
      if (p->text == "null-terminated" && !p->number) {
        if (base.kind != AsnKind::kIA5String) {
          return resolve_error(p->span, SourceKind::kAcn, "null-terminated applies to strings only");
        }
      } else if (!numeric_kind) {
        ACNKIT_ASSIGN_OR_RETURN(Lookup l, lookup(p->text, p->span, frame));
        if (l.base->kind != AsnKind::kInteger) {
          return resolve_error(p->span, SourceKind::kAcn,
                               cat("size field '", p->text, "' must be an INTEGER, not ",
                                   to_string(l.base->kind)));
        }
        n->size_ref = l.ref;
      }
    }
    if (const auto* p = find_prop(props, AcnPropKind::kDeterminant)) {
      ACNKIT_ASSIGN_OR_RETURN(Lookup l, lookup(p->text, p->span, frame));
      if (l.base->kind != AsnKind::kEnumerated) {
        return resolve_error(p->span, SourceKind::kAcn,
                             cat("determinant '", p->text, "' must be ENUMERATED, not ",
                                 to_string(l.base->kind)));
      }
      for (const auto& alt : base.components) {
        const bool mapped = std::any_of(l.base->items.begin(), l.base->items.end(),
                                        [&](const EnumItem& it) { return it.name == alt.name; });
        if (!mapped) {
          return resolve_error(p->span, SourceKind::kAcn,
                               cat("determinant '", p->text, "' has no item named '", alt.name,
                                   "' for the alternative of that name"));
        }
      }
      n->determinant = l.ref;
    }

    if (n->target.empty()) {
      switch (base.kind) {
        case AsnKind::kSequence:
          ACNKIT_TRY(sequence(*n, children, frame));
          break;
        case AsnKind::kChoice:
          ACNKIT_TRY(choice(*n, children, frame));
          break;
        case AsnKind::kSequenceOf:
          ACNKIT_TRY(sequence_of(*n, children, frame));
          break;
        default:
          if (has_children) {
            return resolve_error(acn_span, SourceKind::kAcn,
                                 cat(to_string(base.kind), " takes no child entries"));
          }
      }
    }
    return ResolvedNodePtr(n);
  }

  static const Component* component(const AsnType& t, const std::string& name, std::size_t* index) {
    for (std::size_t i = 0; i < t.components.size(); ++i) {
      if (t.components[i].name == name) {
        if (index) *index = i;
        return &t.components[i];
      }
    }
    return nullptr;
  }

  static const std::vector<AcnProperty>& no_props() {
    static const std::vector<AcnProperty> v;
    return v;
  }
  static const std::vector<AcnChild>& no_children() {
    static const std::vector<AcnChild> v;
    return v;
  }
  static const std::vector<std::string>& no_args() {
    static const std::vector<std::string> v;
    return v;
  }

  struct Slot {
    const Component* comp = nullptr;  // null for inserted fields
    const AcnChild* acn = nullptr;
  };

  // Wire order: ACN children in written order, each component entry
  // preceded by any unmentioned components that come before it.
  Result<std::vector<Slot>> merge_children(const AsnType& t, const std::vector<AcnChild>& children,
                                           bool allow_inserted) const {
    std::vector<Slot> out;
    std::size_t next = 0;
    for (const auto& c : children) {
      std::size_t idx = 0;
      const Component* comp = component(t, c.name, &idx);
      if (c.name.empty()) {
        return resolve_error(c.span, SourceKind::kAcn, "element entry outside SEQUENCE OF");
      }
      if (comp && !c.inserted_type.empty()) {
        return resolve_error(c.span, SourceKind::kAcn,
                             cat("'", c.name, "' is already a component; inserted fields need new names"));
      }
      if (!comp) {
        if (c.inserted_type.empty()) {
          return resolve_error(c.span, SourceKind::kAcn,
                               cat("'", c.name, "' is not a component of this ", to_string(t.kind)));
        }
        if (!allow_inserted) {
          return resolve_error(c.span, SourceKind::kAcn, "inserted fields are not allowed in a CHOICE");
        }
        out.push_back({nullptr, &c});
        continue;
      }
      if (idx < next) {
        return resolve_error(c.span, SourceKind::kAcn,
                             cat("'", c.name, "' is out of order; ACN entries follow the ASN.1 order"));
      }
      for (; next < idx; ++next) out.push_back({&t.components[next], nullptr});
      out.push_back({comp, &c});
      next = idx + 1;
    }
    for (; next < t.components.size(); ++next) out.push_back({&t.components[next], nullptr});
    return out;
  }

  static std::string slot_name(const Slot& s) { return s.comp ? s.comp->name : s.acn->name; }

  Status sequence(ResolvedNode& n, const std::vector<AcnChild>& children, Frame& frame) {
    ACNKIT_ASSIGN_OR_RETURN(std::vector<Slot> slots, merge_children(*n.base, children, true));
    frame.records.push_back({});
    for (const auto& s : slots) frame.records.back().rest.push_back(slot_name(s));
    for (const auto& s : slots) {
      ResolvedField f;
      f.name = slot_name(s);
      const AcnChild* c = s.acn;
      f.span = c ? c->span : s.comp->span;
      if (!s.comp) {
        f.inserted = true;
        if (!c->args.empty() || c->has_children) {
          return resolve_error(c->span, SourceKind::kAcn,
                               cat("inserted field '", c->name, "' takes no arguments or children"));
        }
        if (find_prop(c->props, AcnPropKind::kPresentWhen)) {
          return resolve_error(c->span, SourceKind::kAcn,
                               cat("inserted field '", c->name, "' is always present"));
        }
        AsnTypePtr t;
        if (is_builtin_name(c->inserted_type)) {
          t = builtin(c->inserted_type == "INTEGER" ? AsnKind::kInteger : AsnKind::kBoolean);
          t->span = c->span;
        } else {
          if (!asn_.find(c->inserted_type)) {
            return resolve_error(c->span, SourceKind::kAcn,
                                 cat("unknown type '", c->inserted_type, "'"));
          }
          t = std::make_shared<AsnType>();
          t->kind = AsnKind::kReference;
          t->ref = c->inserted_type;
          t->span = c->span;
        }
        const AsnKind k = chase(t)->kind;
        if (k != AsnKind::kInteger && k != AsnKind::kEnumerated && k != AsnKind::kBoolean) {
          return resolve_error(c->span, SourceKind::kAcn,
                               cat("inserted field '", c->name,
                                   "' must be INTEGER, ENUMERATED or BOOLEAN"));
        }
        ACNKIT_ASSIGN_OR_RETURN(f.node,
                                node(t, c->props, no_children(), false, no_args(), c->span, frame));
      } else {
        f.optional = s.comp->optional;
        std::vector<AcnProperty> props = c ? c->props : std::vector<AcnProperty>{};
        auto pw = std::find_if(props.begin(), props.end(),
                               [](const AcnProperty& p) { return p.kind == AcnPropKind::kPresentWhen; });
        if (pw != props.end()) {
          if (!f.optional) {
            return resolve_error(pw->span, SourceKind::kAcn,
                                 cat("present-when on '", f.name, "', which is not OPTIONAL"));
          }
          ACNKIT_ASSIGN_OR_RETURN(Lookup l, lookup(pw->text, pw->span, frame));
          if (l.base->kind != AsnKind::kBoolean) {
            return resolve_error(pw->span, SourceKind::kAcn,
                                 cat("present-when field '", pw->text, "' must be BOOLEAN, not ",
                                     to_string(l.base->kind)));
          }
          f.present_when = l.ref;
          props.erase(pw);
        } else if (f.optional) {
          return resolve_error(f.span, c ? SourceKind::kAcn : SourceKind::kAsn1,
                               cat("OPTIONAL field '", f.name, "' needs a present-when property"));
        }
        ACNKIT_ASSIGN_OR_RETURN(
            f.node, node(s.comp->type, props, c ? c->children : no_children(), c && c->has_children,
                         c ? c->args : no_args(), f.span, frame));
      }
      auto& scope = frame.records.back();
      scope.before.push_back({f.name, f.node->base, f.optional});
      scope.rest.erase(scope.rest.begin());
      n.fields.push_back(std::move(f));
    }
    frame.records.pop_back();
    return {};
  }

  Status choice(ResolvedNode& n, const std::vector<AcnChild>& children, Frame& frame) {
    ACNKIT_ASSIGN_OR_RETURN(std::vector<Slot> slots, merge_children(*n.base, children, false));
    for (const auto& s : slots) {
      ResolvedField f;
      f.name = s.comp->name;
      const AcnChild* c = s.acn;
      f.span = c ? c->span : s.comp->span;
      if (c && find_prop(c->props, AcnPropKind::kPresentWhen)) {
        return resolve_error(c->span, SourceKind::kAcn, "present-when does not apply to alternatives");
      }
      ACNKIT_ASSIGN_OR_RETURN(
          f.node, node(s.comp->type, c ? c->props : no_props(), c ? c->children : no_children(),
                       c && c->has_children, c ? c->args : no_args(), f.span, frame));
      n.fields.push_back(std::move(f));
    }
    return {};
  }

  Status sequence_of(ResolvedNode& n, const std::vector<AcnChild>& children, Frame& frame) {
    const AcnChild* elem = nullptr;
    for (const auto& c : children) {
      if (!c.name.empty()) {
        return resolve_error(c.span, SourceKind::kAcn,
                             cat("SEQUENCE OF has no component '", c.name, "'"));
      }
      elem = &c;
    }
    if (elem && find_prop(elem->props, AcnPropKind::kPresentWhen)) {
      return resolve_error(elem->span, SourceKind::kAcn, "present-when does not apply to elements");
    }
    ACNKIT_ASSIGN_OR_RETURN(
        n.element, node(n.base->element, elem ? elem->props : no_props(),
                        elem ? elem->children : no_children(), elem && elem->has_children,
                        elem ? elem->args : no_args(), elem ? elem->span : n.base->element->span,
                        frame));
    return {};
  }

  const AsnModule& asn_;
  const AcnSpec& acn_;
};

}  // namespace

Result<ResolvedSchema> resolve(const AsnModule& asn, const AcnSpec& acn) {
  return Resolver(asn, acn).run();
}

}  // namespace acnkit
