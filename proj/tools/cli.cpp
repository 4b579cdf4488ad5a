#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "acnkit/compiler.hpp"
#include "acnkit/engine.hpp"
#include "acnkit/generate.hpp"

namespace acnkit::cli {

namespace {

constexpr const char* kVersion =
    "acnkit 0.1.0\n"
    "ASN.1 subset r1: INTEGER, BOOLEAN, ENUMERATED, NULL, REAL, IA5String (SIZE, FROM),\n"
    "  SEQUENCE (OPTIONAL), CHOICE, SEQUENCE OF (SIZE), type references\n"
    "ACN subset r1: size, encoding pos-int | twos-complement | IEEE754-1985-32/64,\n"
    "  endianness, align-to-next byte | word | dword, size null-terminated,\n"
    "  termination-pattern, size <field>, determinant, present-when,\n"
    "  inserted fields, CHOICE parameters";

// Failure carried to the exit path: code plus lines for stderr.
struct Failure {
  int code = kFailure;
  std::vector<std::string> lines;
};

template <typename T>
using Outcome = std::variant<T, Failure>;

struct Inputs {
  std::string asn;
  std::string acn;
  std::string plan;
  std::string type;
  std::string value;
  std::uint64_t offset = 0;
};

int exit_code_for(const Error& e) {
  switch (e.code) {
    case ErrorCode::kSyntax:
    case ErrorCode::kResolve:
    case ErrorCode::kCompile:
    case ErrorCode::kPlanFormat:
      return kDiagnostics;
    case ErrorCode::kInvalidArgument:
      return kUsage;
    default:
      return kFailure;
  }
}

Failure failure(const Error& e, const Inputs& in) {
  Failure f{exit_code_for(e), {}};
  if (e.diagnostics.empty()) {
    f.lines.push_back(cat("acnkit: ", to_string(e.code), ": ", e.message));
    return f;
  }
  for (const auto& d : e.diagnostics) {
    std::string file;
    switch (d.source) {
      case SourceKind::kAsn1: file = in.asn; break;
      case SourceKind::kAcn: file = in.acn; break;
      case SourceKind::kValue: file = in.value; break;
      case SourceKind::kPlan: file = in.plan; break;
      case SourceKind::kNone: break;
    }
    f.lines.push_back(format_diagnostic(d, file.empty() ? "acnkit" : file));
  }
  return f;
}

Outcome<std::string> read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return Failure{kUsage, {cat("acnkit: cannot read '", path, "'")}};
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::optional<Failure> write_bytes(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !f.write(data.data(), static_cast<std::streamsize>(data.size()))) {
    return Failure{kUsage, {cat("acnkit: cannot write '", path, "'")}};
  }
  return std::nullopt;
}

Outcome<CodecPlan> load_plan(const Inputs& in) {
  if (!in.plan.empty()) {
    auto text = read_text(in.plan);
    if (auto* f = std::get_if<Failure>(&text)) return *f;
    auto plan = plan_load(std::get<std::string>(text));
    if (!plan.ok()) return failure(Error(plan.error()).with_source(SourceKind::kPlan), in);
    return std::move(plan).value();
  }
  if (in.asn.empty() || in.acn.empty() || in.type.empty()) {
    return Failure{kUsage, {"acnkit: give <asn> <acn> --type T, or --plan plan.json"}};
  }
  auto asn = read_text(in.asn);
  if (auto* f = std::get_if<Failure>(&asn)) return *f;
  auto acn = read_text(in.acn);
  if (auto* f = std::get_if<Failure>(&acn)) return *f;
  auto plan = compile_text(std::get<std::string>(asn), std::get<std::string>(acn), in.type);
  if (!plan.ok()) return failure(plan.error(), in);
  return std::move(plan).value();
}

Outcome<Value> load_value(const Inputs& in, const CodecPlan& plan) {
  auto text = read_text(in.value);
  if (auto* f = std::get_if<Failure>(&text)) return *f;
  auto v = parse_value_json(std::get<std::string>(text));
  if (!v.ok()) return failure(Error(v.error()).with_source(SourceKind::kValue), in);
  auto canon = conform(plan, *v);
  if (!canon.ok()) return failure(canon.error(), in);
  return std::move(canon).value();
}

std::string bounds_line(const CodecPlan& plan) {
  const SizeBounds& b = plan.bounds();
  return cat(plan.type_name, ": min_bits ", b.min_bits, ", max_bits ", b.max_bits, ", alignment ",
             alignment_name(b.alignment), ", ", plan.slots.size(), " slot(s)");
}

Outcome<AcnCodec> codec_for(const CodecPlan& plan, std::uint64_t offset) {
  const std::uint64_t bytes = (offset + plan.bounds().max_bits + 7) / 8;
  if (bytes > BitStream::kDefaultCapacityCap) {
    return Failure{kFailure, {cat("acnkit: a ", bytes, "-byte buffer exceeds the capacity cap")}};
  }
  auto c = AcnCodec::create(static_cast<std::size_t>(bytes));
  if (!c.ok()) return Failure{kFailure, {cat("acnkit: ", c.error().describe())}};
  AcnCodec codec = std::move(c).value();
  auto moved = codec.stream().set_bit_index(offset);
  if (!moved.ok()) return Failure{kFailure, {cat("acnkit: ", moved.error().describe())}};
  return codec;
}

std::vector<std::string> violation_lines(const std::vector<Violation>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs) out.push_back(cat(v.path, ": ", v.message));
  return out;
}

// Each command returns an exit code or a Failure.
using Run = Outcome<int>;

Run cmd_compile(const Inputs& in, const std::string& out_path, std::ostream& out) {
  auto plan = load_plan(in);
  if (auto* f = std::get_if<Failure>(&plan)) return *f;
  const CodecPlan& p = std::get<CodecPlan>(plan);
  if (out_path.empty()) {
    out << plan_dump(p);
    return kOk;
  }
  if (auto f = write_bytes(out_path, plan_dump(p))) return *f;
  out << bounds_line(p) << "\n";
  return kOk;
}

Run cmd_encode(const Inputs& in, const std::string& out_path, const std::string& check,
               std::ostream& out) {
  auto plan = load_plan(in);
  if (auto* f = std::get_if<Failure>(&plan)) return *f;
  const CodecPlan& p = std::get<CodecPlan>(plan);
  auto value = load_value(in, p);
  if (auto* f = std::get_if<Failure>(&value)) return *f;
  const Value& v = std::get<Value>(value);
  if (check != "none") {
    const auto violations = check_constraints(p, v);
    if (!violations.empty()) return Failure{kFailure, violation_lines(violations)};
  }
  auto codec = codec_for(p, in.offset);
  if (auto* f = std::get_if<Failure>(&codec)) return *f;
  AcnCodec& c = std::get<AcnCodec>(codec);
  auto report = encode(p, v, c);
  if (!report.ok()) return failure(report.error(), in);
  if (check == "roundtrip") {
    RoundtripOptions o;
    o.offset_bits = in.offset;
    const RoundtripReport r = roundtrip_check(p, v, o);
    if (!r.passed()) {
      return Failure{kFailure, {cat("acnkit: contract ", r.first_failure(), " failed")}};
    }
  }
  const std::uint64_t end = in.offset + report->bit_length;
  const auto buf = c.stream().buffer();
  const std::string bytes(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>((end + 7) / 8));
  if (auto f = write_bytes(out_path, bytes)) return *f;
  nlohmann::ordered_json meta;
  meta["type"] = p.type_name;
  meta["bit_length"] = report->bit_length;
  meta["start_offset"] = in.offset;
  meta["byte_length"] = bytes.size();
  if (auto f = write_bytes(out_path + ".meta.json", meta.dump(2) + "\n")) return *f;
  out << "wrote " << bytes.size() << " byte(s), " << report->bit_length << " bit(s) to " << out_path
      << "\n";
  return kOk;
}

Run cmd_decode(const Inputs& in, const std::string& in_path, const std::string& out_path,
               bool show_slots, std::ostream& out, std::ostream& err) {
  auto plan = load_plan(in);
  if (auto* f = std::get_if<Failure>(&plan)) return *f;
  const CodecPlan& p = std::get<CodecPlan>(plan);
  auto data = read_text(in_path);
  if (auto* f = std::get_if<Failure>(&data)) return *f;
  const std::string& bytes = std::get<std::string>(data);
  auto stream = BitStream::wrap(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
  if (!stream.ok()) return failure(stream.error(), in);
  AcnCodec c(std::move(stream).value());
  if (auto moved = c.stream().set_bit_index(in.offset); !moved.ok()) {
    return Failure{kFailure, {cat("acnkit: ", to_string(ErrorCode::kInsufficientBuffer),
                                  ": offset ", in.offset, " is beyond the input")}};
  }
  SlotValues slots;
  auto v = decode(p, c, &slots);
  if (!v.ok()) return failure(v.error(), in);
  if (show_slots) {
    for (const auto& [path, sv] : slots) err << "slot " << path << " = " << print_value_json(sv, -1) << "\n";
  }
  const std::string text = print_value_json(*v) + "\n";
  if (out_path.empty()) {
    out << text;
  } else if (auto f = write_bytes(out_path, text)) {
    return *f;
  }
  return kOk;
}

Run cmd_size(const Inputs& in, std::ostream& out) {
  auto plan = load_plan(in);
  if (auto* f = std::get_if<Failure>(&plan)) return *f;
  const CodecPlan& p = std::get<CodecPlan>(plan);
  auto value = load_value(in, p);
  if (auto* f = std::get_if<Failure>(&value)) return *f;
  auto size = size_of(p, std::get<Value>(value), in.offset);
  if (!size.ok()) return failure(size.error(), in);
  const SizeBounds& b = p.bounds();
  out << "size_bits: " << *size << "\n"
      << "offset_bits: " << in.offset << "\n"
      << "min_bits: " << b.min_bits << "\n"
      << "max_bits: " << b.max_bits << "\n"
      << "alignment: " << alignment_name(b.alignment) << "\n";
  return kOk;
}

Run cmd_roundtrip(const Inputs& in, unsigned fuzz, std::uint64_t seed, std::ostream& out) {
  auto plan = load_plan(in);
  if (auto* f = std::get_if<Failure>(&plan)) return *f;
  const CodecPlan& p = std::get<CodecPlan>(plan);
  auto value = load_value(in, p);
  if (auto* f = std::get_if<Failure>(&value)) return *f;
  const Value& v = std::get<Value>(value);
  const auto violations = check_constraints(p, v);
  if (!violations.empty()) return Failure{kFailure, violation_lines(violations)};
  RoundtripOptions o;
  o.offset_bits = in.offset;
  o.fuzz_cases = fuzz;
  o.seed = seed;
  const RoundtripReport r = roundtrip_check(p, v, o);
  for (const auto& c : r.contracts) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) out << ": " << c.detail;
    out << "\n";
  }
  if (!r.passed()) {
    out << "contract failed: " << r.first_failure() << "\n";
    return kFailure;
  }
  out << "all contracts passed (" << r.bit_length << " bits, " << r.fuzz_runs << " fuzz decodes)\n";
  return kOk;
}

double default_timeout() {
  if (const char* env = std::getenv("ACNKIT_PROPERTY_TIMEOUT_S")) {
    char* end = nullptr;
    const double t = std::strtod(env, &end);
    if (end != env && t > 0) return t;
  }
  return 300.0;
}

Run cmd_selftest(unsigned cases, std::uint64_t seed, double timeout, bool verbose, std::ostream& out) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  unsigned failed = 0;
  unsigned done = 0;
  for (; done < cases; ++done) {
    if (std::chrono::duration<double>(Clock::now() - start).count() > timeout) {
      out << "selftest: timed out after " << done << " of " << cases << " cases\n";
      return kFailure;
    }
    const GeneratedSchema s = random_schema(rng);
    auto plan = compile_text(s.asn1, s.acn, s.type);
    if (!plan.ok()) {
      ++failed;
      out << "case " << done << ": generated schema does not compile: " << plan.error().describe() << "\n"
          << s.asn1 << s.acn;
      continue;
    }
    const Value v = random_value(*plan, rng);
    RoundtripOptions o;
    o.offset_bits = rng() % 32;
    o.seed = rng();
    const RoundtripReport r = roundtrip_check(*plan, v, o);
    if (verbose) {
      out << "case " << done << ": offset " << o.offset_bits << ", " << r.bit_length << " bits, "
          << (r.passed() ? "ok" : "FAILED") << "\n";
    }
    if (!r.passed()) {
      ++failed;
      std::string detail;
      for (const auto& c : r.contracts) {
        if (!c.passed) detail = c.detail;
      }
      out << "case " << done << ": contract " << r.first_failure() << " failed: " << detail << "\n"
          << s.asn1 << s.acn << print_value_json(v) << "\n";
    }
  }
  out << "selftest: " << cases << " cases, " << failed << " failed, seed " << seed << "\n";
  return failed == 0 ? kOk : kFailure;
}

void add_schema_options(CLI::App* cmd, Inputs& in) {
  cmd->add_option("asn", in.asn, "ASN.1 module (.asn1/.asn)");
  cmd->add_option("acn", in.acn, "ACN module (.acn)");
  cmd->add_option("-t,--type", in.type, "type assignment to compile");
  cmd->add_option("--plan", in.plan, "precompiled plan instead of <asn> <acn> --type");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ASN.1/ACN codec toolkit", "acnkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Inputs in;
  std::string out_path;
  std::string in_path;
  std::string check = "constraints";
  bool show_slots = false;
  unsigned fuzz = 16;
  std::uint64_t seed = 1;
  unsigned cases = 200;
  double timeout = default_timeout();
  bool verbose = false;

  auto* compile_cmd = app.add_subcommand("compile", "resolve and compile, print the plan and bounds");
  add_schema_options(compile_cmd, in);
  compile_cmd->add_option("-o,--out", out_path, "write the plan here and print bounds");

  auto* encode_cmd = app.add_subcommand("encode", "encode a value file to a binary message");
  add_schema_options(encode_cmd, in);
  encode_cmd->add_option("--value", in.value, "value file (JSON notation)")->required();
  encode_cmd->add_option("-o,--out", out_path, "binary output; metadata goes to <out>.meta.json")
      ->required();
  encode_cmd->add_option("--offset", in.offset, "start bit offset");
  encode_cmd->add_option("--check", check, "checks before writing")
      ->check(CLI::IsMember({"none", "constraints", "roundtrip"}));

  auto* decode_cmd = app.add_subcommand("decode", "decode a binary message to value notation");
  add_schema_options(decode_cmd, in);
  decode_cmd->add_option("--in", in_path, "binary input")->required();
  decode_cmd->add_option("-o,--out", out_path, "value output (default stdout)");
  decode_cmd->add_option("--offset", in.offset, "start bit offset");
  decode_cmd->add_flag("--slots", show_slots, "print ACN-inserted values to stderr");

  auto* size_cmd = app.add_subcommand("size", "exact size of a value plus the plan bounds");
  add_schema_options(size_cmd, in);
  size_cmd->add_option("--value", in.value, "value file")->required();
  size_cmd->add_option("--offset", in.offset, "start bit offset");

  auto* rt_cmd = app.add_subcommand("roundtrip", "run the invertibility contracts on a value");
  add_schema_options(rt_cmd, in);
  rt_cmd->add_option("--value", in.value, "value file")->required();
  rt_cmd->add_option("--offset", in.offset, "start bit offset");
  rt_cmd->add_option("--fuzz", fuzz, "prefix-fuzz decodes");
  rt_cmd->add_option("--seed", seed, "seed for buffer noise and fuzzing");

  auto* self_cmd = app.add_subcommand("selftest", "random-schema invertibility sweep");
  self_cmd->add_option("--cases", cases, "number of schema/value cases");
  self_cmd->add_option("--seed", seed, "generator seed");
  self_cmd->add_option("--timeout", timeout,
                       "seconds before the sweep stops (default $ACNKIT_PROPERTY_TIMEOUT_S or 300)");
  self_cmd->add_flag("-v,--verbose", verbose, "one line per case");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Run result = kOk;
  if (*compile_cmd) {
    result = cmd_compile(in, out_path, out);
  } else if (*encode_cmd) {
    result = cmd_encode(in, out_path, check, out);
  } else if (*decode_cmd) {
    result = cmd_decode(in, in_path, out_path, show_slots, out, err);
  } else if (*size_cmd) {
    result = cmd_size(in, out);
  } else if (*rt_cmd) {
    result = cmd_roundtrip(in, fuzz, seed, out);
  } else if (*self_cmd) {
    result = cmd_selftest(cases, seed, timeout, verbose, out);
  }
  if (const auto* f = std::get_if<Failure>(&result)) {
    for (const auto& line : f->lines) err << line << "\n";
    return f->code;
  }
  return std::get<int>(result);
}

}  // namespace acnkit::cli
