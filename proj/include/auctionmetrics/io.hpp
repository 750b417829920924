#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "auctionmetrics/auction_model.hpp"
#include "auctionmetrics/cdf.hpp"

namespace auctionmetrics {

using json = nlohmann::json;

// CSV sample logs. Bidder indices are 1-based on disk; in partial logs the
// planted bid / reserve is index k + 1. Reals are written with 17 significant
// digits. Malformed rows raise IoError, out-of-range values DomainError, both
// naming the line.

/// Header `y,z`. When k is not given it is the largest index seen.
FpSampleSet parse_fp_samples(std::istream& in, std::optional<std::size_t> k = std::nullopt,
                             const std::string& source = "<stream>");
FpSampleSet read_fp_samples(const std::string& path, std::optional<std::size_t> k = std::nullopt);
void write_fp_samples(std::ostream& out, const FpSampleSet& samples);
void write_fp_samples(const std::string& path, const FpSampleSet& samples);

/// Header `y,w`.
SpSampleSet parse_sp_samples(std::istream& in, std::optional<std::size_t> k = std::nullopt,
                             const std::string& source = "<stream>");
SpSampleSet read_sp_samples(const std::string& path, std::optional<std::size_t> k = std::nullopt);
void write_sp_samples(std::ostream& out, const SpSampleSet& samples);
void write_sp_samples(const std::string& path, const SpSampleSet& samples);

/// Header `r,z` (first-price) or `r,z,q` (second-price, q in {0,1}).
std::vector<PartialFpObservation> parse_partial_fp(std::istream& in, std::size_t k,
                                                   const std::string& source = "<stream>");
std::vector<PartialSpObservation> parse_partial_sp(std::istream& in, std::size_t k,
                                                   const std::string& source = "<stream>");
void write_partial_fp(std::ostream& out, const std::vector<PartialFpObservation>& log);
void write_partial_sp(std::ostream& out, const std::vector<PartialSpObservation>& log);

// JSON.

/// {interpolation, breakpoints, values, is_full_cdf}.
json cdf_to_json(const PiecewiseCdf& cdf);
PiecewiseCdf cdf_from_json(const json& j);
json density_to_json(const PiecewiseFunction& f);

/// A bare list of CDF objects, or an object with a "cdfs" list.
std::vector<PiecewiseCdf> cdfs_from_json(const json& j);
std::vector<PiecewiseCdf> read_cdfs(const std::string& path);

/// {"id", "bidders": [...], "values": [...]?, "metadata": {...}}. A bidder is a
/// CDF object, {"type": "density", "knots", "density"} or {"type": "uniform"}.
json model_to_json(const AuctionModel& model);
AuctionModel model_from_json(const json& j);
AuctionModel read_model(const std::string& path);

json read_json(const std::string& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::string& path, const json& j);

std::string format_real(double x);

}  // namespace auctionmetrics
