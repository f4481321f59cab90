#include "soqbt/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "soqbt/errors.hpp"

namespace soqbt::io {

using nlohmann::json;

namespace {

constexpr const char* kSystemTag = "soqbt.system";
constexpr const char* kSamplesTag = "soqbt.samples";
constexpr const char* kRomTag = "soqbt.rom";

[[noreturn]] void format_error(const std::string& msg) { throw Error(ErrorKind::FormatError, msg); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) format_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) format_error(std::string(what) + " must be a number");
  return j.get<double>();
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  format_error(std::string(what) + " must be a number or a [re, im] pair");
}

json matrix_to_json(const CMatrix& A) {
  const bool real = A.imag().isZero(0.0);
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
      if (real) {
        row.push_back(A(i, k).real());
      } else {
        row.push_back(complex_to_json(A(i, k)));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    format_error(std::string(what) + ": expected " + std::to_string(rows) + " rows");
  }
  CMatrix A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      format_error(std::string(what) + ": row " + std::to_string(i) + " needs " +
                   std::to_string(cols) + " entries");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      A(i, k) = complex_from_json(row[static_cast<std::size_t>(k)], what);
    }
  }
  return A;
}

void check_header(const json& doc, const char* tag) {
  const auto& fmt = field(doc, "format");
  if (!fmt.is_string() || fmt.get<std::string>() != tag) {
    format_error(std::string("expected a '") + tag + "' document");
  }
  const auto& ver = field(doc, "version");
  if (!ver.is_string()) format_error("version must be a string");
  const auto v = ver.get<std::string>();
  int major = -1;
  const auto dot = v.find('.');
  const auto head = v.substr(0, dot);
  const auto res = std::from_chars(head.data(), head.data() + head.size(), major);
  if (res.ec != std::errc() || res.ptr != head.data() + head.size()) {
    format_error("malformed version '" + v + "'");
  }
  if (major != kFormatMajor) {
    throw Error(ErrorKind::VersionMismatch, "unsupported format version " + v + " (reader supports " +
                                                std::to_string(kFormatMajor) + ".x)");
  }
}

json header(const char* tag) {
  json doc = json::object();
  doc["format"] = tag;
  doc["version"] = kFormatVersion;
  return doc;
}

json damping_to_json(const DampingSpec& d) {
  if (const auto* r = std::get_if<Rayleigh>(&d.value())) {
    return {{"type", "rayleigh"}, {"alpha", r->alpha}, {"beta", r->beta}};
  }
  if (const auto* s = std::get_if<Structural>(&d.value())) {
    return {{"type", "structural"}, {"eta", s->eta}};
  }
  format_error("generalized damping functions cannot be serialized");
}

DampingSpec damping_from_json(const json& j) {
  const auto& type = field(j, "type");
  if (!type.is_string()) format_error("damping type must be a string");
  const auto t = type.get<std::string>();
  if (t == "rayleigh") {
    return Rayleigh{number(field(j, "alpha"), "alpha"), number(field(j, "beta"), "beta")};
  }
  if (t == "structural") return Structural{number(field(j, "eta"), "eta")};
  format_error("unknown damping type '" + t + "'");
}

Eigen::Index dim(const json& doc, const char* key) {
  const auto& v = field(doc, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    format_error(std::string(key) + " must be a nonnegative integer");
  }
  return static_cast<Eigen::Index>(v.get<long long>());
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    format_error(std::string("invalid JSON: ") + e.what());
  }
}

json rule_to_json(const QuadratureRule& rule) {
  return {{"side", rule.side == Side::Left ? "left" : "right"},
          {"freqs", rule.freqs},
          {"weights", rule.weights},
          {"pair_ordered", rule.is_pair_ordered()}};
}

std::vector<double> doubles(const json& j, const char* what) {
  if (!j.is_array()) format_error(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

QuadratureRule rule_from_json(const json& j) {
  QuadratureRule rule;
  const auto& side = field(j, "side");
  if (side == "left") {
    rule.side = Side::Left;
  } else if (side == "right") {
    rule.side = Side::Right;
  } else {
    format_error("rule side must be 'left' or 'right'");
  }
  rule.freqs = doubles(field(j, "freqs"), "freqs");
  rule.weights = doubles(field(j, "weights"), "weights");
  rule.check();
  return rule;
}

json coeff_to_json(const CoefficientEval& c) {
  json j = {{"f", complex_to_json(c.f)}, {"g", complex_to_json(c.g)}, {"n", complex_to_json(c.n)},
            {"d", complex_to_json(c.d)}, {"h", complex_to_json(c.h)}};
  if (c.has_derivatives()) {
    j["n_prime"] = complex_to_json(*c.n_prime);
    j["d_prime"] = complex_to_json(*c.d_prime);
    j["h_prime"] = complex_to_json(*c.h_prime);
  }
  return j;
}

CoefficientEval coeff_from_json(const json& j, cplx s) {
  CoefficientEval c;
  c.s = s;
  c.f = complex_from_json(field(j, "f"), "f");
  c.g = complex_from_json(field(j, "g"), "g");
  c.n = complex_from_json(field(j, "n"), "n");
  c.d = complex_from_json(field(j, "d"), "d");
  c.h = complex_from_json(field(j, "h"), "h");
  if (j.contains("h_prime")) {
    c.n_prime = complex_from_json(field(j, "n_prime"), "n_prime");
    c.d_prime = complex_from_json(field(j, "d_prime"), "d_prime");
    c.h_prime = complex_from_json(field(j, "h_prime"), "h_prime");
  }
  return c;
}

json set_to_json(const SampleSet& set) {
  json j = rule_to_json(set.rule);
  j["has_derivatives"] = set.has_derivatives;
  j["zero_velocity_output"] = set.zero_velocity_output;
  json samples = json::array();
  for (const auto& smp : set.samples) {
    json s = {{"G", matrix_to_json(smp.G)}};
    if (smp.Gp) s["Gp"] = matrix_to_json(*smp.Gp);
    if (smp.Gv) s["Gv"] = matrix_to_json(*smp.Gv);
    if (smp.G_prime) s["G_prime"] = matrix_to_json(*smp.G_prime);
    samples.push_back(std::move(s));
  }
  j["samples"] = std::move(samples);
  json coeffs = json::array();
  for (const auto& c : set.coeffs) coeffs.push_back(coeff_to_json(c));
  j["coeffs"] = std::move(coeffs);
  return j;
}

SampleSet set_from_json(const json& j, Eigen::Index p, Eigen::Index m) {
  SampleSet set;
  set.rule = rule_from_json(j);
  const auto& hd = field(j, "has_derivatives");
  const auto& zv = field(j, "zero_velocity_output");
  if (!hd.is_boolean() || !zv.is_boolean()) format_error("sample flags must be booleans");
  set.has_derivatives = hd.get<bool>();
  set.zero_velocity_output = zv.get<bool>();
  const auto& samples = field(j, "samples");
  if (!samples.is_array() || samples.size() != set.rule.size()) {
    format_error("one sample per node is required");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    TransferSample smp;
    smp.node = set.rule.node(i);
    smp.G = matrix_from_json(field(s, "G"), p, m, "G");
    if (s.contains("Gp")) smp.Gp = matrix_from_json(s["Gp"], p, m, "Gp");
    if (s.contains("Gv")) smp.Gv = matrix_from_json(s["Gv"], p, m, "Gv");
    if (s.contains("G_prime")) smp.G_prime = matrix_from_json(s["G_prime"], p, m, "G_prime");
    set.samples.push_back(std::move(smp));
  }
  if (j.contains("coeffs")) {
    const auto& coeffs = j["coeffs"];
    if (!coeffs.is_array()) format_error("coeffs must be an array");
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      set.coeffs.push_back(coeff_from_json(coeffs[i], set.rule.node(i)));
    }
  }
  try {
    set.check();
  } catch (const Error& e) {
    format_error(std::string("inconsistent sample set: ") + e.what());
  }
  return set;
}

}  // namespace

std::string system_to_string(const SecondOrderSystem& sys) {
  json doc = header(kSystemTag);
  doc["n"] = sys.n();
  doc["m"] = sys.m();
  doc["p"] = sys.p();
  doc["damping"] = damping_to_json(sys.damping());
  doc["M"] = matrix_to_json(sys.M());
  doc["K"] = matrix_to_json(sys.K());
  doc["Bu"] = matrix_to_json(sys.Bu());
  doc["Cp"] = matrix_to_json(sys.Cp());
  doc["Cv"] = matrix_to_json(sys.Cv());
  return doc.dump(1) + "\n";
}

SecondOrderSystem system_from_string(const std::string& text) {
  const json doc = parse(text);
  check_header(doc, kSystemTag);
  const auto n = dim(doc, "n"), m = dim(doc, "m"), p = dim(doc, "p");
  try {
    return SecondOrderSystem(matrix_from_json(field(doc, "M"), n, n, "M"),
                             matrix_from_json(field(doc, "K"), n, n, "K"),
                             damping_from_json(field(doc, "damping")),
                             matrix_from_json(field(doc, "Bu"), n, m, "Bu"),
                             matrix_from_json(field(doc, "Cp"), p, n, "Cp"),
                             matrix_from_json(field(doc, "Cv"), p, n, "Cv"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::FormatError) throw;
    format_error(std::string("invalid system: ") + e.what());
  }
}

std::string samples_to_string(const SampleFile& file) {
  json doc = header(kSamplesTag);
  doc["mode"] = file.mode == AssemblyMode::Hermite ? "hermite" : "general";
  doc["damping"] = damping_to_json(file.damping);
  const auto& G = file.right.samples.at(0).G;
  doc["p"] = G.rows();
  doc["m"] = G.cols();
  if (file.left) doc["left"] = set_to_json(*file.left);
  doc["right"] = set_to_json(file.right);
  return doc.dump(1) + "\n";
}

SampleFile samples_from_string(const std::string& text) {
  const json doc = parse(text);
  check_header(doc, kSamplesTag);
  SampleFile file;
  const auto& mode = field(doc, "mode");
  if (mode == "general") {
    file.mode = AssemblyMode::General;
  } else if (mode == "hermite") {
    file.mode = AssemblyMode::Hermite;
  } else {
    format_error("mode must be 'general' or 'hermite'");
  }
  file.damping = damping_from_json(field(doc, "damping"));
  const auto p = dim(doc, "p"), m = dim(doc, "m");
  file.right = set_from_json(field(doc, "right"), p, m);
  if (file.mode == AssemblyMode::General) {
    file.left = set_from_json(field(doc, "left"), p, m);
  } else if (doc.contains("left")) {
    format_error("Hermite sample files carry only the right samples");
  }
  return file;
}

std::string rom_to_string(const ReducedSecondOrderModel& rom) {
  rom.check();
  json doc = header(kRomTag);
  doc["r"] = rom.r();
  doc["m"] = rom.m();
  doc["p"] = rom.p();
  doc["damping"] = damping_to_json(rom.damping);
  doc["K"] = matrix_to_json(rom.Kt);
  if (rom.Dt) doc["D"] = matrix_to_json(*rom.Dt);
  doc["Bu"] = matrix_to_json(rom.But);
  doc["Cp"] = matrix_to_json(rom.Cpt);
  doc["Cv"] = matrix_to_json(rom.Cvt);
  return doc.dump(1) + "\n";
}

ReducedSecondOrderModel rom_from_string(const std::string& text) {
  const json doc = parse(text);
  check_header(doc, kRomTag);
  const auto r = dim(doc, "r"), m = dim(doc, "m"), p = dim(doc, "p");
  ReducedSecondOrderModel rom;
  rom.damping = damping_from_json(field(doc, "damping"));
  rom.Kt = matrix_from_json(field(doc, "K"), r, r, "K");
  if (doc.contains("D")) rom.Dt = matrix_from_json(doc["D"], r, r, "D");
  rom.But = matrix_from_json(field(doc, "Bu"), r, m, "Bu");
  rom.Cpt = matrix_from_json(field(doc, "Cp"), p, r, "Cp");
  rom.Cvt = matrix_from_json(field(doc, "Cv"), p, r, "Cv");
  try {
    rom.check();
  } catch (const Error& e) {
    format_error(std::string("invalid ROM: ") + e.what());
  }
  return rom;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) format_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidParams, "cannot write " + path.string());
  out << text;
}

void write_system(const std::filesystem::path& path, const SecondOrderSystem& sys) {
  write_text(path, system_to_string(sys));
}
SecondOrderSystem read_system(const std::filesystem::path& path) {
  return system_from_string(read_text(path));
}
void write_samples(const std::filesystem::path& path, const SampleFile& file) {
  write_text(path, samples_to_string(file));
}
SampleFile read_samples(const std::filesystem::path& path) {
  return samples_from_string(read_text(path));
}
void write_rom(const std::filesystem::path& path, const ReducedSecondOrderModel& rom) {
  write_text(path, rom_to_string(rom));
}
ReducedSecondOrderModel read_rom(const std::filesystem::path& path) {
  return rom_from_string(read_text(path));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "CSV row length differs from header");
  }
  rows_.push_back(values);
}

void CsvTable::write(std::ostream& os) const {
  for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace soqbt::io
