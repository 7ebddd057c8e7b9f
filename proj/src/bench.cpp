// Copyright 2026 The hetconv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hetconv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <new>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hetconv/datagen.hpp"
#include "hetconv/error.hpp"

namespace hetconv {

namespace {

constexpr double kDoublingMinRatio = 1.8;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<ScalePoint> dblp_scales() {
  return {{800, 6183, 21308},     {1500, 9799, 38384},    {2500, 13935, 59578},
          {4000, 18785, 84356},   {5500, 22969, 106171},  {7000, 26327, 125894},
          {10000, 31775, 147777}, {14475, 37791, 170794}};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("fit_line: need at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

void summarize(BenchReport& r) {
  std::vector<double> xs, ys;
  for (const auto& s : r.scales) {
    if (!s.ok) continue;
    xs.push_back(static_cast<double>(s.size()));
    ys.push_back(s.median_seconds);
  }
  r.fit = xs.size() >= 2 ? fit_line(xs, ys) : LinearFit{};
  r.max_consecutive_ratio = 0.0;
  r.max_doubling_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    r.max_consecutive_ratio = std::max(r.max_consecutive_ratio, ys[i + 1] / ys[i]);
  }
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = i + 1; j < ys.size(); ++j) {
      const double s = xs[j] / xs[i];
      if (s < kDoublingMinRatio) continue;
      const double d = std::pow(ys[j] / ys[i], std::log(2.0) / std::log(s));
      r.max_doubling_ratio = std::max(r.max_doubling_ratio, d);
    }
  }
}

BenchReport run_scaling(std::span<const ScalePoint> scales, const TrainConfig& cfg,
                        int repeats, std::uint64_t seed, const BenchProgress& progress) {
  if (scales.size() < 5) throw ConfigError("run_scaling: need at least 5 scales");
  if (repeats < 3) throw ConfigError("run_scaling: need at least 3 repeats");
  for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
    if (scales[i + 1].objects + scales[i + 1].links <= scales[i].objects + scales[i].links) {
      throw ConfigError("run_scaling: scales must be strictly increasing in objects + links");
    }
  }
  cfg.validate();
  BenchReport report;
  report.repeats = repeats;
  report.threads = num_threads();
  for (const auto& sp : scales) {
    ScaleResult res;
    res.requested = sp;
    try {
      HinGraph g = generate(scale_spec(sp.authors, sp.objects, sp.links, seed));
      assign_splits(g, 20.0, seed);
      res.objects = g.total_objects();
      res.links = g.total_links();
      auto train = split_rows(g, "train");
      Rng root(cfg.seed);
      Rng init_rng = root.split(1);
      ModelParams params = init_params(g.schema, shape_for(g, cfg), init_rng);
      PreparedGraph pg(g);
      AdamState adam;
      Rng drop = root.split(2);
      for (int e = 0; e <= repeats; ++e) {
        const auto start = std::chrono::steady_clock::now();
        train_step(params, pg, train, cfg, adam, drop);
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (e > 0) res.samples.push_back(sec);
      }
      res.median_seconds = median(res.samples);
      double mean = 0.0;
      for (double v : res.samples) mean += v;
      mean /= static_cast<double>(res.samples.size());
      double var = 0.0;
      for (double v : res.samples) var += (v - mean) * (v - mean);
      res.mean_seconds = mean;
      res.std_seconds = std::sqrt(var / static_cast<double>(res.samples.size() - 1));
    } catch (const std::bad_alloc&) {
      res.ok = false;
      res.failure = "out of memory";
    } catch (const Error& e) {
      res.ok = false;
      res.failure = e.what();
    }
    report.scales.push_back(res);
    if (progress) progress(res);
    if (!res.ok) {
      report.note = "sweep stopped at scale (" + std::to_string(sp.authors) + ", " +
                    std::to_string(sp.objects) + ", " + std::to_string(sp.links) +
                    "): " + res.failure;
      break;
    }
  }
  summarize(report);
  return report;
}

std::string bench_report_json(const BenchReport& r) {
  nlohmann::json j;
  j["repeats"] = r.repeats;
  j["threads"] = r.threads;
  j["scales"] = nlohmann::json::array();
  for (const auto& s : r.scales) {
    nlohmann::json sj = {{"requested",
                          {{"authors", s.requested.authors},
                           {"objects", s.requested.objects},
                           {"links", s.requested.links}}},
                         {"objects", s.objects},
                         {"links", s.links},
                         {"samples", s.samples},
                         {"median_seconds", s.median_seconds},
                         {"mean_seconds", s.mean_seconds},
                         {"std_seconds", s.std_seconds},
                         {"ok", s.ok}};
    if (!s.ok) sj["failure"] = s.failure;
    j["scales"].push_back(sj);
  }
  j["fit"] = {{"slope", r.fit.slope}, {"intercept", r.fit.intercept}, {"r2", r.fit.r2}};
  j["max_consecutive_ratio"] = r.max_consecutive_ratio;
  j["max_doubling_ratio"] = r.max_doubling_ratio;
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump(2) + "\n";
}

std::string bench_report_table(const BenchReport& r) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%8s %9s %9s %10s %12s %12s\n", "authors", "objects",
                "links", "obj+links", "median_s", "std_s");
  os << line;
  for (const auto& s : r.scales) {
    if (!s.ok) {
      std::snprintf(line, sizeof line, "%8ld %9s %9s %10s  FAILED: %s\n", s.requested.authors,
                    "-", "-", "-", s.failure.c_str());
    } else {
      std::snprintf(line, sizeof line, "%8ld %9ld %9ld %10ld %12.5f %12.5f\n",
                    s.requested.authors, s.objects, s.links, s.size(), s.median_seconds,
                    s.std_seconds);
    }
    os << line;
  }
  std::snprintf(line, sizeof line,
                "fit: t = %.4g * n + %.4g  (R^2 = %.4f)\nmax consecutive ratio %.3f, "
                "max doubling ratio %.3f, threads %d, repeats %d\n",
                r.fit.slope, r.fit.intercept, r.fit.r2, r.max_consecutive_ratio,
                r.max_doubling_ratio, r.threads, r.repeats);
  os << line;
  if (!r.note.empty()) os << "note: " << r.note << "\n";
  return os.str();
}

std::string bench_report_csv(const BenchReport& r) {
  std::ostringstream os;
  os << "authors,objects,links,size,median_seconds,mean_seconds,std_seconds,ok\n";
  os.precision(9);
  for (const auto& s : r.scales) {
    os << s.requested.authors << ',' << s.objects << ',' << s.links << ',' << s.size() << ','
       << s.median_seconds << ',' << s.mean_seconds << ',' << s.std_seconds << ','
       << (s.ok ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace hetconv
