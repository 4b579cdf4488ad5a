#include <sstream>

#include "acnkit/ast.hpp"

namespace acnkit {

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

std::string range_text(const IntRange& r) {
  if (r.lo == r.hi) return std::to_string(r.lo);
  return cat(r.lo, " .. ", r.hi);
}

void print_type(std::ostream& os, const AsnType& t, int indent);

void print_components(std::ostream& os, const AsnType& t, int indent) {
  if (t.components.empty()) {
    os << "{ }";
    return;
  }
  os << "{\n";
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  for (std::size_t i = 0; i < t.components.size(); ++i) {
    const auto& c = t.components[i];
    os << pad << c.name << ' ';
    print_type(os, *c.type, indent + 2);
    if (c.optional) os << " OPTIONAL";
    os << (i + 1 < t.components.size() ? ",\n" : "\n");
  }
  os << std::string(static_cast<std::size_t>(indent), ' ') << '}';
}

void print_type(std::ostream& os, const AsnType& t, int indent) {
  switch (t.kind) {
    case AsnKind::kInteger:
      os << "INTEGER";
      if (t.range) os << " (" << range_text(*t.range) << ')';
      break;
    case AsnKind::kBoolean: os << "BOOLEAN"; break;
    case AsnKind::kNull: os << "NULL"; break;
    case AsnKind::kReal: os << "REAL"; break;
    case AsnKind::kEnumerated: {
      os << "ENUMERATED { ";
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (i) os << ", ";
        os << t.items[i].name;
        if (t.items[i].explicit_value) os << '(' << t.items[i].value << ')';
      }
      os << " }";
      break;
    }
    case AsnKind::kIA5String:
      os << "IA5String";
      if (t.size) os << " (SIZE(" << range_text(*t.size) << "))";
      if (!t.alphabet.empty()) {
        os << " (FROM(";
        for (std::size_t i = 0; i < t.alphabet.size(); ++i) {
          const auto& p = t.alphabet[i];
          if (i) os << " | ";
          if (p.is_range) {
            os << quote(std::string(1, p.lo)) << " .. " << quote(std::string(1, p.hi));
          } else {
            os << quote(p.chars);
          }
        }
        os << "))";
      }
      break;
    case AsnKind::kSequence:
      os << "SEQUENCE ";
      print_components(os, t, indent);
      break;
    case AsnKind::kChoice:
      os << "CHOICE ";
      print_components(os, t, indent);
      break;
    case AsnKind::kSequenceOf:
      os << "SEQUENCE ";
      if (t.size) os << "(SIZE(" << range_text(*t.size) << ")) ";
      os << "OF ";
      print_type(os, *t.element, indent);
      break;
    case AsnKind::kReference: os << t.ref; break;
  }
}

void print_props(std::ostream& os, const std::vector<AcnProperty>& props) {
  os << '[';
  for (std::size_t i = 0; i < props.size(); ++i) {
    const auto& p = props[i];
    if (i) os << ", ";
    os << to_string(p.kind) << ' ';
    if (p.kind == AcnPropKind::kTerminationPattern) {
      os << '\'' << p.text << "'H";
    } else {
      os << p.text;
    }
  }
  os << ']';
}

void print_children(std::ostream& os, const std::vector<AcnChild>& children, int indent) {
  if (children.empty()) {
    os << "{ }";
    return;
  }
  os << "{\n";
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  for (std::size_t i = 0; i < children.size(); ++i) {
    const auto& c = children[i];
    os << pad;
    if (!c.name.empty()) os << c.name << ' ';
    if (!c.inserted_type.empty()) os << c.inserted_type << ' ';
    if (!c.args.empty()) {
      os << '<';
      for (std::size_t j = 0; j < c.args.size(); ++j) os << (j ? ", " : "") << c.args[j];
      os << "> ";
    }
    print_props(os, c.props);
    if (c.has_children) {
      os << ' ';
      print_children(os, c.children, indent + 2);
    }
    os << (i + 1 < children.size() ? ",\n" : "\n");
  }
  os << std::string(static_cast<std::size_t>(indent), ' ') << '}';
}

}  // namespace

std::string print_asn1(const AsnModule& module) {
  std::ostringstream os;
  const bool shell = !module.name.empty();
  if (shell) os << module.name << " DEFINITIONS AUTOMATIC TAGS ::= BEGIN\n\n";
  for (const auto& a : module.assignments) {
    os << a.name << " ::= ";
    print_type(os, *a.type, 0);
    os << '\n';
  }
  if (shell) os << "\nEND\n";
  return os.str();
}

std::string print_acn(const AcnSpec& spec) {
  std::ostringstream os;
  const bool shell = !spec.module_name.empty();
  if (shell) os << spec.module_name << " DEFINITIONS ::= BEGIN\n\n";
  for (const auto& e : spec.entries) {
    os << e.type_name;
    if (!e.params.empty()) {
      os << '<';
      for (std::size_t i = 0; i < e.params.size(); ++i) {
        os << (i ? ", " : "") << e.params[i].type_name << ": " << e.params[i].name;
      }
      os << '>';
    }
    os << ' ';
    print_props(os, e.props);
    if (e.has_children) {
      os << ' ';
      print_children(os, e.children, 0);
    }
    os << '\n';
  }
  if (shell) os << "\nEND\n";
  return os.str();
}

}  // namespace acnkit
