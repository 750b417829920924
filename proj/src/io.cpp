#include "auctionmetrics/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "auctionmetrics/errors.hpp"

namespace auctionmetrics {
namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail_io(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw IoError(os.str());
}

[[noreturn]] void fail_domain(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw DomainError(os.str());
}

double parse_real(const std::string& s, const std::string& source, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail_io(source, line, "cannot parse '" + s + "' as a number");
  }
  return v;
}

std::size_t parse_index(const std::string& s, const std::string& source, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail_io(source, line, "cannot parse '" + s + "' as an integer index");
  }
  if (v < 1) fail_domain(source, line, "index " + s + " out of range (indices are 1-based)");
  return static_cast<std::size_t>(v);
}

double parse_unit(const std::string& s, const std::string& source, std::size_t line) {
  const double v = parse_real(s, source, line);
  if (!(v >= 0.0 && v <= 1.0)) fail_domain(source, line, "value " + s + " outside [0,1]");
  return v;
}

// Calls row(fields, line_no) for every non-blank data line after checking the header.
template <class Row>
void read_csv(std::istream& in, const std::vector<std::string>& header, const std::string& source,
              Row&& row) {
  std::string line;
  std::size_t no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        fail_io(source, no, "expected header '" + want + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      fail_io(source, no, "expected " + std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
    }
    row(fields, no);
  }
  if (in.bad()) throw IoError(source + ": read error");
  if (!have_header) fail_io(source, no, "missing header");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

// Returns the checked k; rows hold 1-based indices.
std::size_t settle_k(std::optional<std::size_t> k, std::size_t max_seen,
                     const std::vector<std::size_t>& lines, const std::vector<std::size_t>& idx,
                     const std::string& source) {
  if (!k) return std::max<std::size_t>(max_seen, 2);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (idx[t] > *k) {
      fail_domain(source, lines[t],
                  "bidder index " + std::to_string(idx[t]) + " exceeds k=" + std::to_string(*k));
    }
  }
  return *k;
}

std::string interp_name(Interpolation m) { return m == Interpolation::Step ? "step" : "linear"; }

Interpolation interp_from(const std::string& s) {
  if (s == "step") return Interpolation::Step;
  if (s == "linear") return Interpolation::Linear;
  throw DomainError("unknown interpolation '" + s + "'");
}

std::vector<double> real_list(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw DomainError(std::string("missing array '") + key + "'");
  }
  std::vector<double> out;
  for (const auto& x : j.at(key)) {
    if (!x.is_number()) throw DomainError(std::string("non-numeric entry in '") + key + "'");
    out.push_back(x.get<double>());
  }
  return out;
}

json density_model_to_json(const BoundedDensityModel& m) {
  json j{{"type", "density"},
         {"knots", std::vector<double>(m.knots().begin(), m.knots().end())},
         {"density", std::vector<double>(m.knot_density().begin(), m.knot_density().end())}};
  return j;
}

BoundedDensityModel density_model_from_json(const json& j) {
  return BoundedDensityModel::from_knots(real_list(j, "knots"), real_list(j, "density"));
}

Distribution distribution_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("bidder entry must be an object");
  const std::string type = j.value("type", std::string("cdf"));
  if (type == "uniform") return BoundedDensityModel::uniform();
  if (type == "density") return density_model_from_json(j);
  if (type == "cdf") return cdf_from_json(j);
  throw DomainError("unknown bidder type '" + type + "'");
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

FpSampleSet parse_fp_samples(std::istream& in, std::optional<std::size_t> k,
                             const std::string& source) {
  FpSampleSet s;
  std::vector<std::size_t> lines, idx;
  std::size_t max_seen = 0;
  read_csv(in, {"y", "z"}, source, [&](const std::vector<std::string>& f, std::size_t no) {
    const double y = parse_unit(f[0], source, no);
    const std::size_t z = parse_index(f[1], source, no);
    s.obs.push_back({y, z - 1});
    lines.push_back(no);
    idx.push_back(z);
    max_seen = std::max(max_seen, z);
  });
  s.k = settle_k(k, max_seen, lines, idx, source);
  return s;
}

FpSampleSet read_fp_samples(const std::string& path, std::optional<std::size_t> k) {
  auto f = open_in(path);
  return parse_fp_samples(f, k, path);
}

void write_fp_samples(std::ostream& out, const FpSampleSet& s) {
  out << "y,z\n";
  for (const auto& o : s.obs) out << format_real(o.y) << ',' << o.z + 1 << '\n';
}

void write_fp_samples(const std::string& path, const FpSampleSet& s) {
  auto f = open_out(path);
  write_fp_samples(f, s);
  finish(f, path);
}

SpSampleSet parse_sp_samples(std::istream& in, std::optional<std::size_t> k,
                             const std::string& source) {
  SpSampleSet s;
  std::vector<std::size_t> lines, idx;
  std::size_t max_seen = 0;
  read_csv(in, {"y", "w"}, source, [&](const std::vector<std::string>& f, std::size_t no) {
    const double y = parse_unit(f[0], source, no);
    const std::size_t w = parse_index(f[1], source, no);
    s.obs.push_back({y, w - 1});
    lines.push_back(no);
    idx.push_back(w);
    max_seen = std::max(max_seen, w);
  });
  s.k = settle_k(k, max_seen, lines, idx, source);
  return s;
}

SpSampleSet read_sp_samples(const std::string& path, std::optional<std::size_t> k) {
  auto f = open_in(path);
  return parse_sp_samples(f, k, path);
}

void write_sp_samples(std::ostream& out, const SpSampleSet& s) {
  out << "y,w\n";
  for (const auto& o : s.obs) out << format_real(o.y) << ',' << o.w + 1 << '\n';
}

void write_sp_samples(const std::string& path, const SpSampleSet& s) {
  auto f = open_out(path);
  write_sp_samples(f, s);
  finish(f, path);
}

std::vector<PartialFpObservation> parse_partial_fp(std::istream& in, std::size_t k,
                                                   const std::string& source) {
  std::vector<PartialFpObservation> out;
  read_csv(in, {"r", "z"}, source, [&](const std::vector<std::string>& f, std::size_t no) {
    const double r = parse_unit(f[0], source, no);
    const std::size_t z = parse_index(f[1], source, no);
    if (z > k + 1) fail_domain(source, no, "index " + f[1] + " exceeds k+1");
    out.push_back({r, z - 1});
  });
  return out;
}

std::vector<PartialSpObservation> parse_partial_sp(std::istream& in, std::size_t k,
                                                   const std::string& source) {
  std::vector<PartialSpObservation> out;
  read_csv(in, {"r", "z", "q"}, source, [&](const std::vector<std::string>& f, std::size_t no) {
    const double r = parse_unit(f[0], source, no);
    const std::size_t z = parse_index(f[1], source, no);
    if (z > k + 1) fail_domain(source, no, "index " + f[1] + " exceeds k+1");
    if (f[2] != "0" && f[2] != "1") fail_io(source, no, "q must be 0 or 1");
    out.push_back({r, z - 1, f[2] == "1"});
  });
  return out;
}

void write_partial_fp(std::ostream& out, const std::vector<PartialFpObservation>& log) {
  out << "r,z\n";
  for (const auto& o : log) out << format_real(o.r) << ',' << o.z + 1 << '\n';
}

void write_partial_sp(std::ostream& out, const std::vector<PartialSpObservation>& log) {
  out << "r,z,q\n";
  for (const auto& o : log) out << format_real(o.r) << ',' << o.z + 1 << ',' << (o.q ? 1 : 0) << '\n';
}

json cdf_to_json(const PiecewiseCdf& cdf) {
  return json{{"interpolation", interp_name(cdf.interpolation())},
              {"breakpoints", std::vector<double>(cdf.breakpoints().begin(), cdf.breakpoints().end())},
              {"values", std::vector<double>(cdf.values().begin(), cdf.values().end())},
              {"is_full_cdf", cdf.is_full_cdf()}};
}

PiecewiseCdf cdf_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("CDF entry must be an object");
  const Interpolation m = interp_from(j.value("interpolation", std::string("step")));
  return PiecewiseCdf(real_list(j, "breakpoints"), real_list(j, "values"), m);
}

json density_to_json(const PiecewiseFunction& f) {
  return json{{"interpolation", interp_name(f.interpolation())},
              {"breakpoints", std::vector<double>(f.breakpoints().begin(), f.breakpoints().end())},
              {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

std::vector<PiecewiseCdf> cdfs_from_json(const json& j) {
  const json* list = &j;
  if (j.is_object()) {
    if (!j.contains("cdfs")) throw DomainError("expected a list of CDFs or an object with 'cdfs'");
    list = &j.at("cdfs");
  }
  if (!list->is_array()) throw DomainError("'cdfs' must be an array");
  std::vector<PiecewiseCdf> out;
  for (const auto& c : *list) out.push_back(cdf_from_json(c));
  return out;
}

std::vector<PiecewiseCdf> read_cdfs(const std::string& path) { return cdfs_from_json(read_json(path)); }

json model_to_json(const AuctionModel& model) {
  json bidders = json::array();
  for (const auto& d : model.bid_dists()) {
    if (const auto* m = d.as_density()) {
      bidders.push_back(density_model_to_json(*m));
    } else {
      json c = cdf_to_json(*d.as_piecewise());
      c["type"] = "cdf";
      bidders.push_back(c);
    }
  }
  json meta = json::object();
  const auto& md = model.metadata();
  if (md.lambda) meta["lambda"] = *md.lambda;
  if (md.alpha) meta["alpha"] = *md.alpha;
  if (md.eta) meta["eta"] = *md.eta;
  if (md.lipschitz) meta["lipschitz"] = *md.lipschitz;
  if (md.zeta) meta["zeta"] = *md.zeta;
  json j{{"id", model.id()}, {"k", model.k()}, {"bidders", bidders}, {"metadata", meta}};
  if (model.has_values()) {
    json values = json::array();
    for (const auto& v : model.value_dists()) values.push_back(density_model_to_json(v));
    j["values"] = values;
  }
  return j;
}

AuctionModel model_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("model must be a JSON object");
  if (!j.contains("bidders") || !j.at("bidders").is_array()) {
    throw DomainError("model needs a 'bidders' array");
  }
  std::vector<Distribution> bids;
  for (const auto& b : j.at("bidders")) bids.push_back(distribution_from_json(b));
  if (j.contains("k") && j.at("k").get<std::size_t>() != bids.size()) {
    throw DomainError("model 'k' does not match the number of bidders");
  }
  std::vector<BoundedDensityModel> values;
  if (j.contains("values")) {
    for (const auto& v : j.at("values")) {
      if (v.value("type", std::string("density")) == "uniform") {
        values.push_back(BoundedDensityModel::uniform());
      } else {
        values.push_back(density_model_from_json(v));
      }
    }
  }
  ModelMetadata md;
  if (j.contains("metadata")) {
    const json& m = j.at("metadata");
    auto opt = [&m](const char* key) -> std::optional<double> {
      if (m.contains(key) && !m.at(key).is_null()) return m.at(key).get<double>();
      return std::nullopt;
    };
    md.lambda = opt("lambda");
    md.alpha = opt("alpha");
    md.eta = opt("eta");
    md.lipschitz = opt("lipschitz");
    md.zeta = opt("zeta");
  }
  return AuctionModel(std::move(bids), md, std::move(values), j.value("id", std::string{}));
}

AuctionModel read_model(const std::string& path) { return model_from_json(read_json(path)); }

json read_json(const std::string& path) {
  auto f = open_in(path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
  finish(f, path);
}

}  // namespace auctionmetrics
