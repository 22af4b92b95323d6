#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mhom/config.hpp"
#include "mhom/errors.hpp"
#include "mhom/output.hpp"

using namespace mhom;

namespace {

std::string expect_error(const std::string &text) {
  try {
    parse_config(text).validate();
  } catch (const ConfigError &e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("defaults and sections") {
  const ExperimentConfig c = parse_config(
      "# comment\n[geometry]\nmap = bernoulli\nradius = 0.2\n\n[corrector]\ndelta = 1e-2 ; trailing\nn = 6\nm = 3\n"
      "[homogenize]\neps = 1/4, 0.125, 1/16\nsource = tilted\n[monte_carlo]\nsamples = 3\n");
  CHECK(c.map == MapKind::Bernoulli);
  CHECK(c.radius == 0.2);
  CHECK(c.delta == 0.01);
  CHECK(c.n == 6);
  CHECK(c.m == 3);
  CHECK(c.inv_eps == std::vector<int>{4, 8, 16});
  CHECK(c.source == SourcePreset::Tilted);
  CHECK(c.seed_list().size() == 3);
  CHECK(c.lines.at("corrector.delta") == 7);
  CHECK(c.h == 0.05);
}

TEST_CASE("JSON form is equivalent") {
  const ExperimentConfig a = parse_config("[geometry]\nmap = bump\n[mesh]\nh = 0.1\n[monte_carlo]\nseeds = 5, 9\n");
  const ExperimentConfig b =
      parse_config(R"({"mesh": {"h": 0.1}, "monte_carlo": {"seeds": [5, 9]}, "geometry": {"map": "bump"}})");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
  CHECK(b.seed_list() == std::vector<std::uint64_t>{5, 9});
}

TEST_CASE("hash is stable under reordering and sensitive to values") {
  const ExperimentConfig a = parse_config("[mesh]\nh = 0.1\nmembranes = all\n[corrector]\nn = 4\nm = 2\n");
  const ExperimentConfig b = parse_config("[corrector]\nm = 2\nn = 4\n[mesh]\nmembranes = all\nh = 0.1\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  const ExperimentConfig c = parse_config("[corrector]\nm = 2\nn = 4\n[mesh]\nmembranes = all\nh = 0.05\n");
  CHECK(a.hash() != c.hash());
  // The output directory is not part of the experiment.
  const ExperimentConfig d = parse_config("[mesh]\nh = 0.1\nmembranes = all\n[corrector]\nn = 4\nm = 2\n[output]\ndir = x\n");
  CHECK(a.hash() == d.hash());
}

TEST_CASE("errors name the offending key") {
  CHECK(expect_error("[corrector]\ndelta = 0\n") == "corrector.delta");
  CHECK(expect_error("[corrector]\nn = 4\nm = 4\n") == "corrector.m");
  CHECK(expect_error("[mesh]\nh = 0.3\n") == "mesh.h");
  CHECK(expect_error("[mesh]\nhh = 0.1\n") == "mesh.hh");
  CHECK(expect_error("[mesh]\nh = 0.1\nh = 0.2\n") == "mesh.h");
  CHECK(expect_error("[homogenize]\neps = 0.3\n") == "homogenize.eps");
  CHECK(expect_error("[homogenize]\neps = 1/8, 1/4\n") == "homogenize.eps");
  CHECK(expect_error("[geometry]\nmap = wiggly\n") == "geometry.map");
  CHECK(expect_error("[corrector]\ndelta = abc\n") == "corrector.delta");
  CHECK(expect_error("[geometry]\nradius = 0.6\n") == "geometry.radius");
  CHECK(expect_error("[mesh\nh = 0.1\n") == "");
  try {
    parse_config("[mesh]\nh = 0.1\n\n[corrector]\ndelta = 0\n").validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError &e) {
    CHECK(e.line() == 5);
  }
}

TEST_CASE("inverse eps tokens") {
  CHECK(parse_inverse_eps("1/8", "k", 1) == 8);
  CHECK(parse_inverse_eps("0.0625", "k", 1) == 16);
  CHECK_THROWS_AS(parse_inverse_eps("2/8", "k", 1), ConfigError);
  CHECK_THROWS_AS(parse_inverse_eps("0.3", "k", 1), ConfigError);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  for (double v : {-2.5e-20, 1.0 / 3.0, 6.02214076e23, 0.7774993477003106})
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
}

TEST_CASE("output transactions publish all files or none") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mhom_tx_test";
  fs::remove_all(dir);
  {
    OutputTransaction tx(dir);
    tx.write("a.csv", "x\n");
    tx.write("b.json", "{}\n");
  }  // abandoned
  CHECK((!fs::exists(dir) || fs::is_empty(dir)));
  {
    OutputTransaction tx(dir);
    tx.write("a.csv", "x\n");
    tx.write("b.json", "{}\n");
    tx.commit();
  }
  CHECK(fs::exists(dir / "a.csv"));
  CHECK(fs::exists(dir / "b.json"));
  std::size_t files = 0;
  for ([[maybe_unused]] const auto &e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 2);
  fs::remove_all(dir);
}
