#include "koco/harness/stream.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "koco/error.hpp"
#include "koco/rng.hpp"

namespace koco::harness {

namespace {

double label_of(double f) { return f < 0.0 ? -1.0 : 1.0; }

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<LossEvent> generate_stream(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.input_dim == 0) throw InvalidArgument("generate_stream: input_dim must be positive");
  const Index dim = static_cast<Index>(spec.input_dim);
  const double C = spec.clip_c;
  const bool regression = spec.loss == LossFamily::squared;
  CounterRng rng(sub_seed(seed, "stream"));
  std::vector<LossEvent> out;
  out.reserve(spec.horizon);

  switch (spec.generator) {
    case Generator::sixsix_adversary: {
      const Point e1 = DenseVec::Unit(dim, 0);
      for (std::size_t t = 0; t < spec.horizon; ++t) {
        const double s = t % 2 == 0 ? 1.0 : -1.0;
        out.push_back({e1, spec.loss, regression ? s * C : s});
      }
      break;
    }
    case Generator::rkhs_target: {
      if (spec.n_centers == 0) throw InvalidArgument("generate_stream: n_centers must be positive");
      const KernelSpec k = KernelSpec::gaussian(spec.target_bandwidth);
      std::vector<Point> centers(spec.n_centers, DenseVec(dim));
      std::vector<double> weights(spec.n_centers);
      for (std::size_t j = 0; j < spec.n_centers; ++j) {
        for (Index i = 0; i < dim; ++i) centers[j](i) = rng.normal();
        weights[j] = rng.normal();
      }
      for (std::size_t t = 0; t < spec.horizon; ++t) {
        Point x(dim);
        for (Index i = 0; i < dim; ++i) x(i) = rng.normal();
        double f = 0.0;
        for (std::size_t j = 0; j < spec.n_centers; ++j) f += weights[j] * k.eval(centers[j], x);
        const double y = f + (spec.noise_sd > 0.0 ? spec.noise_sd * rng.normal() : 0.0);
        out.push_back({x, spec.loss, regression ? clip_prediction(y, C) : label_of(y)});
      }
      break;
    }
    case Generator::orthogonal_drift: {
      for (std::size_t t = 0; t < spec.horizon; ++t) {
        Point x(dim);
        for (Index i = 0; i < dim; ++i) x(i) = 0.01 * rng.normal();
        x(0) += spec.spread * static_cast<double>(t + 1);
        const double u = 2.0 * rng.uniform() - 1.0;
        out.push_back({x, spec.loss, regression ? u * C : label_of(u)});
      }
      break;
    }
  }
  return out;
}

std::vector<LossEvent> ingest_csv(const std::string& path, LossFamily family, double clip_c) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_commas(line);
  if (header.size() < 2) throw ParseError("need at least one feature column and a target", 1);
  const std::string last = header.back();
  if (last != "target" && last != "label") throw ParseError("last column must be target or label", 1);
  const bool label_col = last == "label";
  const std::size_t m = header.size() - 1;
  for (std::size_t j = 0; j < m; ++j)
    if (header[j] != "f" + std::to_string(j + 1))
      throw ParseError("expected feature column f" + std::to_string(j + 1) + ", got '" + header[j] + "'", 1);

  std::vector<LossEvent> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_commas(line);
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " columns, got " +
                           std::to_string(cells.size()), lineno);
    DenseVec vals(static_cast<Index>(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string& c = cells[j];
      double x = 0.0;
      const char* b = c.data();
      if (!c.empty() && c.front() == '+') ++b;
      const auto [p, ec] = std::from_chars(b, c.data() + c.size(), x);
      if (c.empty() || ec != std::errc() || p != c.data() + c.size() || !std::isfinite(x))
        throw ParseError("column " + header[j] + ": not a finite number '" + c + "'", lineno);
      vals(static_cast<Index>(j)) = x;
    }
    const double y = vals(static_cast<Index>(m));
    if (label_col && y != 1.0 && y != -1.0)
      throw ParseError("label must be +1 or -1, got '" + cells.back() + "'", lineno);
    LossEvent ev{vals.head(static_cast<Index>(m)), family, y};
    try {
      validate_event(ev, clip_c);
    } catch (const TargetOutOfRange& e) {
      throw TargetOutOfRange("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), lineno);
    }
    out.push_back(std::move(ev));
  }
  return out;
}

void emit_csv(const std::string& path, const std::vector<LossEvent>& events) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw InvalidArgument("emit_csv: cannot write " + path);
  const Index m = events.empty() ? 1 : events.front().point.size();
  const bool regression = events.empty() || events.front().family == LossFamily::squared;
  for (Index j = 0; j < m; ++j) std::fprintf(f.get(), "f%ld,", static_cast<long>(j + 1));
  std::fprintf(f.get(), "%s\n", regression ? "target" : "label");
  for (const LossEvent& ev : events) {
    if (ev.point.size() != m) throw DimensionMismatch("emit_csv: point dimension changed");
    for (Index j = 0; j < m; ++j) std::fprintf(f.get(), "%.17g,", ev.point(j));
    std::fprintf(f.get(), "%.17g\n", ev.target);
  }
}

std::vector<LossEvent> load_stream(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.source == StreamSource::synthetic) return generate_stream(cfg.synthetic, seed);
  std::vector<LossEvent> ev = ingest_csv(cfg.csv_path, cfg.loss, cfg.clip_c);
  if (cfg.horizon > 0) {
    if (ev.size() < cfg.horizon)
      throw ConfigError("stream: " + cfg.csv_path + " has " + std::to_string(ev.size()) +
                        " rows, horizon is " + std::to_string(cfg.horizon));
    ev.resize(cfg.horizon);
  }
  if (ev.empty()) throw ConfigError("stream: " + cfg.csv_path + " has no rows");
  return ev;
}

}  // namespace koco::harness
