#include <doctest.h>

#include <sstream>
#include <string>

#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/io.hpp"
#include "auctionmetrics/simulate.hpp"

using namespace auctionmetrics;

TEST_CASE("first-price samples round-trip exactly") {
  const FpSampleSet s = simulate_fp(uniform_model(3), 500, 8);
  std::stringstream buf;
  write_fp_samples(buf, s);
  const FpSampleSet back = parse_fp_samples(buf, 3);
  CHECK(back.k == 3);
  CHECK(back.obs == s.obs);
}

TEST_CASE("second-price samples round-trip exactly") {
  const SpSampleSet s = simulate_sp(uniform_model(2), 500, 8);
  std::stringstream buf;
  write_sp_samples(buf, s);
  CHECK(parse_sp_samples(buf).obs == s.obs);
}

TEST_CASE("partial logs round-trip") {
  const AuctionModel m = uniform_model(2);
  SimulatedSpOracle oracle(m, 1, true);
  for (int t = 0; t < 50; ++t) oracle.query(0.01 * t);
  std::stringstream buf;
  write_partial_sp(buf, oracle.log());
  CHECK(parse_partial_sp(buf, 2) == oracle.log());
}

TEST_CASE("zero index is rejected with its line number") {
  std::stringstream in("y,z\n0.5,1\n0.25,0\n");
  try {
    parse_fp_samples(in, std::nullopt, "s.csv");
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("s.csv:3") != std::string::npos);
  }
}

TEST_CASE("malformed rows and headers") {
  std::stringstream bad_header("a,b\n0.5,1\n");
  CHECK_THROWS_AS(parse_fp_samples(bad_header), IoError);
  std::stringstream bad_number("y,z\n0.5x,1\n");
  CHECK_THROWS_AS(parse_fp_samples(bad_number), IoError);
  std::stringstream short_row("y,z\n0.5\n");
  CHECK_THROWS_AS(parse_fp_samples(short_row), IoError);
  std::stringstream out_of_range("y,z\n0.5,3\n");
  CHECK_THROWS_AS(parse_fp_samples(out_of_range, 2), DomainError);
  std::stringstream bid_out("y,w\n1.5,1\n");
  CHECK_THROWS_AS(parse_sp_samples(bid_out), DomainError);
  CHECK_THROWS_AS(read_fp_samples("/nonexistent/x.csv"), IoError);
}

TEST_CASE("cdf json round-trip") {
  const PiecewiseCdf f({0.1, 0.30000000000000004, 0.7}, {0.2, 1.0 / 3.0, 1.0}, Interpolation::Linear);
  const json j = cdf_to_json(f);
  CHECK(j.at("interpolation") == "linear");
  CHECK(j.at("is_full_cdf") == true);
  const PiecewiseCdf g = cdf_from_json(json::parse(j.dump()));
  CHECK(std::vector<double>(g.breakpoints().begin(), g.breakpoints().end()) ==
        std::vector<double>(f.breakpoints().begin(), f.breakpoints().end()));
  CHECK(std::vector<double>(g.values().begin(), g.values().end()) ==
        std::vector<double>(f.values().begin(), f.values().end()));
  CHECK(cdfs_from_json(json{{"cdfs", {j, j}}}).size() == 2);
}

TEST_CASE("model json round-trip") {
  const AuctionModel m({PiecewiseCdf::uniform(), BoundedDensityModel::from_knots({0.0, 1.0}, {0.5, 1.5})},
                       ModelMetadata{1.0, 0.5, 1.5, std::nullopt, std::nullopt}, {}, "mixed");
  const AuctionModel back = model_from_json(json::parse(model_to_json(m).dump()));
  CHECK(back.k() == 2);
  CHECK(back.id() == "mixed");
  CHECK(back.metadata().alpha == 0.5);
  CHECK_FALSE(back.metadata().zeta.has_value());
  CHECK(back.bid_dists()[1].as_density() != nullptr);
  CHECK(back.bid_cdf(1, 0.4) == doctest::Approx(m.bid_cdf(1, 0.4)));
  CHECK_THROWS_AS(model_from_json(json{{"bidders", {{{"type", "nope"}}}}}), DomainError);
}

TEST_CASE("reals are formatted with 17 significant digits") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}
