#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <stdexcept>

#include "acnkit/compiler.hpp"
#include "acnkit/engine.hpp"
#include "acnkit/generate.hpp"

namespace py = pybind11;
using namespace acnkit;

namespace {

// Carries an acnkit Error across the binding boundary.
struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void raise(const Error& e) { throw CodecError(e.describe()); }

template <typename T>
T take(Result<T> r) {
  if (!r.ok()) raise(r.error());
  return std::move(r).value();
}

Value parse_value(const CodecPlan& plan, const std::string& json) {
  Value v = take(parse_value_json(json));
  return take(conform(plan, v));
}

py::bytes encode_value(const CodecPlan& plan, const std::string& json, std::uint64_t offset) {
  const Value v = parse_value(plan, json);
  AcnCodec c = take(AcnCodec::create((offset + plan.bounds().max_bits + 7) / 8));
  if (auto st = c.move_bit_index(static_cast<std::int64_t>(offset)); !st.ok()) raise(st.error());
  const EncodeReport r = take(encode(plan, v, c));
  const auto buf = c.stream().buffer();
  const std::string bytes(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>((offset + r.bit_length + 7) / 8));
  return py::bytes(bytes);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ASN.1/ACN codec plans: compile, encode, decode, size and contract checks";
  py::register_exception<CodecError>(m, "CodecError", PyExc_ValueError);

  py::class_<CodecPlan>(m, "Plan")
      .def_property_readonly("type_name", [](const CodecPlan& p) { return p.type_name; })
      .def_property_readonly("min_bits", [](const CodecPlan& p) { return p.bounds().min_bits; })
      .def_property_readonly("max_bits", [](const CodecPlan& p) { return p.bounds().max_bits; })
      .def_property_readonly("alignment",
                             [](const CodecPlan& p) { return std::string(alignment_name(p.bounds().alignment)); })
      .def_property_readonly("slots",
                             [](const CodecPlan& p) {
                               std::vector<std::string> names;
                               for (const auto& s : p.slots) names.push_back(s.name);
                               return names;
                             })
      .def("dump", [](const CodecPlan& p) { return plan_dump(p); })
      .def_static("load", [](const std::string& text) { return take(plan_load(text)); });

  m.def("compile", [](const std::string& asn1, const std::string& acn, const std::string& type) {
    return take(compile_text(asn1, acn, type));
  }, py::arg("asn1"), py::arg("acn"), py::arg("type"));

  m.def("encode_json", &encode_value, py::arg("plan"), py::arg("value_json"), py::arg("offset") = 0);

  m.def("decode_json", [](const CodecPlan& plan, const py::bytes& data, std::uint64_t offset) {
    const std::string raw = data;
    BitStream s = take(BitStream::wrap(std::vector<std::uint8_t>(raw.begin(), raw.end())));
    if (auto st = s.set_bit_index(offset); !st.ok()) raise(st.error());
    AcnCodec c(std::move(s));
    const Value v = take(decode(plan, c));
    return py::make_tuple(print_value_json(v, -1), c.bit_index() - offset);
  }, py::arg("plan"), py::arg("data"), py::arg("offset") = 0);

  m.def("size_of_json", [](const CodecPlan& plan, const std::string& json, std::uint64_t offset) {
    return take(size_of(plan, parse_value(plan, json), offset));
  }, py::arg("plan"), py::arg("value_json"), py::arg("offset") = 0);

  m.def("check_constraints_json", [](const CodecPlan& plan, const std::string& json) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : check_constraints(plan, take(parse_value_json(json)))) out.emplace_back(v.path, v.message);
    return out;
  }, py::arg("plan"), py::arg("value_json"));

  m.def("roundtrip_json", [](const CodecPlan& plan, const std::string& json, std::uint64_t offset,
                             unsigned fuzz, std::uint64_t seed) {
    RoundtripOptions o;
    o.offset_bits = offset;
    o.fuzz_cases = fuzz;
    o.seed = seed;
    const RoundtripReport r = roundtrip_check(plan, parse_value(plan, json), o);
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const auto& c : r.contracts) out.emplace_back(c.name, c.passed, c.detail);
    return out;
  }, py::arg("plan"), py::arg("value_json"), py::arg("offset") = 0, py::arg("fuzz") = 16, py::arg("seed") = 1);

  m.def("random_schema", [](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const GeneratedSchema s = random_schema(rng);
    return py::make_tuple(s.asn1, s.acn, s.type);
  }, py::arg("seed"));

  m.def("random_value_json", [](const CodecPlan& plan, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return print_value_json(random_value(plan, rng), -1);
  }, py::arg("plan"), py::arg("seed"));
}
