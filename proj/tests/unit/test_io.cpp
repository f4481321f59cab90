#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "soqbt/errors.hpp"
#include "soqbt/generators.hpp"
#include "soqbt/io.hpp"

using namespace soqbt;

namespace {

void check_same(const CMatrix& a, const CMatrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    CHECK(a.data()[i].real() == b.data()[i].real());
    CHECK(a.data()[i].imag() == b.data()[i].imag());
  }
}

void check_same(const SampleSet& a, const SampleSet& b) {
  CHECK(a.rule.freqs == b.rule.freqs);
  CHECK(a.rule.weights == b.rule.weights);
  CHECK(a.rule.side == b.rule.side);
  CHECK(a.has_derivatives == b.has_derivatives);
  CHECK(a.zero_velocity_output == b.zero_velocity_output);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    check_same(a.samples[k].G, b.samples[k].G);
    CHECK(a.samples[k].Gp.has_value() == b.samples[k].Gp.has_value());
    if (a.samples[k].Gp) check_same(*a.samples[k].Gp, *b.samples[k].Gp);
    if (a.samples[k].Gv) check_same(*a.samples[k].Gv, *b.samples[k].Gv);
    CHECK(a.samples[k].G_prime.has_value() == b.samples[k].G_prime.has_value());
    if (a.samples[k].G_prime) check_same(*a.samples[k].G_prime, *b.samples[k].G_prime);
    CHECK(a.coeffs[k].h == b.coeffs[k].h);
    CHECK(a.coeffs[k].d == b.coeffs[k].d);
  }
}

}  // namespace

TEST_CASE("shortest round-trip doubles") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e10, 1e10);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1e-3) == "0.001");
}

TEST_CASE("system round trip is bit exact") {
  const SecondOrderSystem systems[] = {generate_msd_chain(4), generate_random_spd_system(5, 2, 3, 8),
                                       generate_structural_chain(3, 1e-3)};
  for (const auto& sys : systems) {
    const std::string text = io::system_to_string(sys);
    const auto back = io::system_from_string(text);
    check_same(back.M(), sys.M());
    check_same(back.K(), sys.K());
    check_same(back.Bu(), sys.Bu());
    check_same(back.Cp(), sys.Cp());
    check_same(back.Cv(), sys.Cv());
    CHECK(back.damping().describe() == sys.damping().describe());
    CHECK(io::system_to_string(back) == text);
  }
}

TEST_CASE("complex system entries survive") {
  const auto base = generate_random_spd_system(3, 1, 1, 2);
  CMatrix B = base.Bu();
  B(1, 0) = cplx(0.25, -1.0 / 3.0);
  const SecondOrderSystem sys(base.M(), base.K(), base.damping(), B, base.Cp(), base.Cv());
  const auto back = io::system_from_string(io::system_to_string(sys));
  check_same(back.Bu(), B);
}

TEST_CASE("generated files are deterministic") {
  CHECK(io::system_to_string(generate_random_spd_system(6, 1, 2, 5)) ==
        io::system_to_string(generate_random_spd_system(6, 1, 2, 5)));
}

TEST_CASE("general sample file round trip") {
  const auto sys = generate_random_spd_system(5, 2, 2, 3);
  const auto rules = interleave(0.1, 10.0, 6);
  io::SampleFile file;
  file.damping = sys.damping();
  file.left = sample_system(sys, rules.left);
  file.right = sample_system(sys, rules.right);
  const auto text = io::samples_to_string(file);
  const auto back = io::samples_from_string(text);
  CHECK(back.mode == AssemblyMode::General);
  REQUIRE(back.left.has_value());
  check_same(*back.left, *file.left);
  check_same(back.right, file.right);
  CHECK(io::samples_to_string(back) == text);
}

TEST_CASE("Hermite sample file round trip") {
  const auto sys = generate_random_spd_system(5, 1, 1, 3, true);
  io::SampleFile file;
  file.mode = AssemblyMode::Hermite;
  file.damping = sys.damping();
  file.right = sample_system(sys, conjugate_pair(0.1, 10.0, 6).right, true);
  const auto back = io::samples_from_string(io::samples_to_string(file));
  CHECK(back.mode == AssemblyMode::Hermite);
  CHECK_FALSE(back.left.has_value());
  check_same(back.right, file.right);
  CHECK(back.right.coeffs[0].h_prime.has_value());
}

TEST_CASE("ROM round trip") {
  ReducedSecondOrderModel rom;
  rom.Kt = CMatrix::Random(3, 3);
  rom.damping = Structural{1e-3};
  rom.But = CMatrix::Random(3, 2);
  rom.Cpt = CMatrix::Random(1, 3);
  rom.Cvt = CMatrix::Zero(1, 3);
  const auto back = io::rom_from_string(io::rom_to_string(rom));
  check_same(back.Kt, rom.Kt);
  check_same(back.But, rom.But);
  check_same(back.Cpt, rom.Cpt);
  CHECK_FALSE(back.Dt.has_value());
  rom.Dt = CMatrix::Identity(3, 3);
  rom.damping = Rayleigh{0.1, 0.2};
  const auto back2 = io::rom_from_string(io::rom_to_string(rom));
  REQUIRE(back2.Dt.has_value());
  check_same(*back2.Dt, *rom.Dt);
}

TEST_CASE("version and format errors") {
  std::string text = io::system_to_string(generate_msd_chain(1));
  const auto pos = text.find("\"1.0\"");
  REQUIRE(pos != std::string::npos);
  std::string v2 = text;
  v2.replace(pos, 5, "\"2.0\"");
  try {
    io::system_from_string(v2);
    FAIL("expected VersionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::VersionMismatch);
  }
  std::string v11 = text;
  v11.replace(pos, 5, "\"1.1\"");
  CHECK_NOTHROW(io::system_from_string(v11));

  for (const std::string bad : {std::string("not json"), std::string("{}"),
                                std::string("{\"format\": \"soqbt.rom\", \"version\": \"1.0\"}")}) {
    try {
      io::system_from_string(bad);
      FAIL("expected FormatError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::FormatError);
    }
  }
  CHECK_THROWS_AS(io::rom_from_string(text), Error);
}

TEST_CASE("ragged matrices are rejected") {
  std::string text = io::system_to_string(generate_msd_chain(1));
  const auto pos = text.find("\"K\"");
  REQUIRE(pos != std::string::npos);
  const auto open = text.find("[[", pos);
  text.insert(open + 2, "0, ");
  try {
    io::system_from_string(text);
    FAIL("expected FormatError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FormatError);
  }
}

TEST_CASE("file wrappers") {
  const auto dir = std::filesystem::temp_directory_path() / "soqbt_io_test";
  std::filesystem::create_directories(dir);
  const auto sys = generate_msd_chain(2);
  io::write_system(dir / "sys.json", sys);
  check_same(io::read_system(dir / "sys.json").K(), sys.K());
  CHECK_THROWS_AS(io::read_system(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("CSV table") {
  io::CsvTable t({"omega", "value"});
  t.add_row({0.1, 1.0 / 3.0});
  const std::string s = t.str();
  CHECK(s.rfind("omega,value\n", 0) == 0);
  CHECK(s.find("0.1,0.3333333333333333") != std::string::npos);
  CHECK_THROWS_AS(t.add_row({1.0}), Error);
}
