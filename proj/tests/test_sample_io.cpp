#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "phasetype/errors.hpp"
#include "phasetype/sample_io.hpp"

using namespace phasetype;

TEST_CASE("plain sample files") {
  std::istringstream in("# header comment\n1.5\n\n  2\n0\n3e-2\n");
  const SampleBatch b = io::read_samples(in, "mem");
  CHECK(b.values == std::vector<double>{1.5, 2.0, 0.0, 0.03});
  CHECK(b.label == "mem");

  std::istringstream bad("1\nabc\n");
  CHECK_THROWS_WITH_AS(io::read_samples(bad, "mem"), doctest::Contains("mem:2"), InvalidParameter);
  std::istringstream neg("1\n-2\n");
  CHECK_THROWS_AS(io::read_samples(neg, "mem"), InvalidParameter);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(io::read_samples(empty, "mem"), InvalidParameter);
}

TEST_CASE("csv sample files") {
  std::istringstream in("id,time,other\n1,0.5,x\n2,1.25,y\n");
  const SampleBatch b = io::read_samples_csv(in, "time", "mem");
  CHECK(b.values == std::vector<double>{0.5, 1.25});
  std::istringstream missing("a,b\n1,2\n");
  CHECK_THROWS_AS(io::read_samples_csv(missing, "time", "mem"), InvalidParameter);
}

TEST_CASE("round trip through files") {
  const auto dir = std::filesystem::temp_directory_path() / "phasetype_io_test";
  std::filesystem::create_directories(dir);
  const SampleBatch b{{0.1, 1.0 / 3.0, 12345.678, 5e-300}, "x"};
  io::write_samples(dir / "s.txt", b);
  CHECK(io::read_samples(dir / "s.txt").values == b.values);

  for (const Distribution& d : {Distribution(ExpParams(0.3)), Distribution(ErlangParams(4, 2.5)),
                                Distribution(RateVector({1.0, 2.0, 0.1})), Distribution(EMEParams(3, 1.0 / 7.0, 0.25))}) {
    io::write_params(dir / "p.json", d);
    const Distribution back = io::read_params(dir / "p.json");
    CHECK(io::to_json(back) == io::to_json(d));
    CHECK(family_name(back) == family_name(d));
  }
  CHECK_THROWS_AS(io::read_samples(dir / "missing.txt"), InvalidParameter);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parameter records") {
  const auto j = io::to_json(EMEParams(2, 1.0, 3.0));
  CHECK(j.at("family") == "eme");
  CHECK(j.at("n") == 2);
  CHECK_FALSE(j.contains("rates"));
  CHECK_THROWS_AS(io::distribution_from_json(nlohmann::json{{"family", "gamma"}}), InvalidParameter);
  CHECK_THROWS_AS(io::distribution_from_json(nlohmann::json{{"family", "eme"}, {"n", 2}}), InvalidParameter);
  CHECK_THROWS_AS(io::distribution_from_json(nlohmann::json{{"family", "eme"}, {"n", 2}, {"lambda", 1.0}, {"w", 1.0}}),
                  InvalidParameter);
  CHECK_THROWS_AS(io::distribution_from_json(nlohmann::json{{"family", "hypo"}, {"rates", {1.0, 1.0}}}),
                  InvalidParameter);
}
