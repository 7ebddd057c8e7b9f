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

#include "hetconv/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "hetconv/error.hpp"

namespace hetconv {

using nlohmann::json;

namespace {

constexpr double kRealPapers = 14328.0;
constexpr double kRealTerms = 8898.0;
constexpr long kVenues = 20;

std::string law_name(DegreeLaw law) {
  return law == DegreeLaw::kUniform ? "uniform" : "power_law";
}

DegreeLaw parse_law(const std::string& s) {
  if (s == "power_law") return DegreeLaw::kPowerLaw;
  if (s == "uniform") return DegreeLaw::kUniform;
  throw ConfigError("unknown degree law '" + s + "' (expected power_law or uniform)");
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

bool adjacent_on_path(const std::vector<std::string>& path, const std::string& a,
                      const std::string& b) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if ((path[i] == a && path[i + 1] == b) || (path[i] == b && path[i + 1] == a)) return true;
  }
  return false;
}

class DegreeSampler {
 public:
  DegreeSampler(DegreeLaw law, double exponent, long lo, long hi) : lo_(lo) {
    cdf_.reserve(static_cast<std::size_t>(hi - lo + 1));
    double acc = 0.0;
    for (long k = lo; k <= hi; ++k) {
      acc += law == DegreeLaw::kUniform ? 1.0 : std::pow(static_cast<double>(std::max(k, 1L)), -exponent);
      cdf_.push_back(acc);
    }
    for (auto& c : cdf_) c /= acc;
  }

  long operator()(Rng& rng) const {
    double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return lo_ + static_cast<long>(it - cdf_.begin());
  }

 private:
  long lo_;
  std::vector<double> cdf_;
};

std::vector<long> sample_degrees(const DegreeSpec& d, long n_dst, long hi, Rng& rng) {
  DegreeSampler sampler(d.law, d.exponent, d.min_degree, hi);
  std::vector<long> deg(static_cast<std::size_t>(n_dst));
  long total = 0;
  for (auto& k : deg) {
    k = sampler(rng);
    total += k;
  }
  if (d.target_links > 0) {
    if (d.target_links < n_dst * d.min_degree || d.target_links > n_dst * hi) {
      throw ConfigError("relation " + d.src + "-" + d.dst + ": " +
                        std::to_string(d.target_links) + " links cannot be realized by " +
                        std::to_string(n_dst) + " objects with degrees in [" +
                        std::to_string(d.min_degree) + ", " + std::to_string(hi) + "]");
    }
    while (total != d.target_links) {
      auto i = static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(n_dst)));
      if (total < d.target_links && deg[i] < hi) {
        ++deg[i];
        ++total;
      } else if (total > d.target_links && deg[i] > d.min_degree) {
        --deg[i];
        --total;
      }
    }
  }
  return deg;
}

// `degree` distinct picks from [0, n). With probability `affinity` a pick is
// drawn from `preferred` instead of the whole range.
std::vector<long> pick_distinct(long degree, long n, const std::vector<long>* preferred,
                                double affinity, Rng& rng) {
  std::vector<long> out;
  std::unordered_set<long> seen;
  long attempts = 0;
  const long budget = 50 * degree + 100;
  while (static_cast<long>(out.size()) < degree && attempts++ < budget) {
    long j;
    if (preferred && !preferred->empty() && rng.bernoulli(affinity)) {
      j = (*preferred)[rng.uniform_int(preferred->size())];
    } else {
      j = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    }
    if (seen.insert(j).second) out.push_back(j);
  }
  if (static_cast<long>(out.size()) < degree) {
    std::vector<long> rest;
    for (long j = 0; j < n; ++j) {
      if (!seen.count(j)) rest.push_back(j);
    }
    shuffle(rest, rng);
    for (std::size_t k = 0; static_cast<long>(out.size()) < degree; ++k) out.push_back(rest[k]);
  }
  return out;
}

}  // namespace

void GenSpec::validate() const {
  for (const auto& t : schema.types()) {
    auto it = counts.find(t);
    if (it == counts.end()) throw ConfigError("no object count for type " + t);
    if (it->second < 1) throw ConfigError("object count for type " + t + " must be positive");
  }
  for (const auto& [t, _] : counts) {
    if (!schema.has_type(t)) throw ConfigError("object count for unknown type " + t);
  }
  std::vector<int> covered(schema.relations().size(), 0);
  for (const auto& d : degrees) {
    auto fwd = schema.relation_index(d.src, d.dst);
    auto rev = schema.relation_index(d.dst, d.src);
    if (!fwd && !rev) {
      throw ConfigError("degree spec " + d.src + "-" + d.dst + " matches no relation");
    }
    if (fwd) ++covered[*fwd];
    if (rev && rev != fwd) ++covered[*rev];
    if (d.min_degree < 0 || d.max_degree < d.min_degree) {
      throw ConfigError("degree spec " + d.src + "-" + d.dst + ": need 0 <= min <= max");
    }
    if (!std::isfinite(d.exponent) || d.exponent < 0) {
      throw ConfigError("degree spec " + d.src + "-" + d.dst + ": exponent must be >= 0");
    }
    if (d.target_links < 0) {
      throw ConfigError("degree spec " + d.src + "-" + d.dst + ": target_links must be >= 0");
    }
  }
  for (std::size_t r = 0; r < covered.size(); ++r) {
    if (covered[r] != 1) {
      throw ConfigError("relation " + schema.relations()[r].name() + " is covered by " +
                        std::to_string(covered[r]) + " degree specs (expected 1)");
    }
  }
  if (!schema.has_type(labeled_type)) throw ConfigError("unknown labeled type " + labeled_type);
  if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
  if (planted_path.size() < 2) throw ConfigError("planted path needs at least two types");
  for (std::size_t i = 0; i + 1 < planted_path.size(); ++i) {
    if (!schema.relation_index(planted_path[i], planted_path[i + 1])) {
      throw ConfigError("planted path hop " + planted_path[i] + "->" + planted_path[i + 1] +
                        " is not a schema relation");
    }
  }
  if (planted_path.back() != labeled_type) {
    throw ConfigError("planted path must end at the labeled type " + labeled_type);
  }
  if (!(affinity >= 0.0 && affinity <= 1.0)) throw ConfigError("affinity must be in [0, 1]");
  if (!(noise >= 0.0 && noise < 1.0)) throw ConfigError("noise must be in [0, 1)");
  if (feature_dim < 1) throw ConfigError("feature_dim must be positive");
}

GenSpec parse_gen_spec(const std::string& json_text) {
  GenSpec spec;
  try {
    json j = json::parse(json_text);
    if (!j.is_object()) throw ConfigError("generator spec must be a JSON object");
    reject_unknown(j,
                   {"types", "relations", "counts", "degrees", "labeled_type", "num_classes",
                    "planted_path", "affinity", "noise", "feature_dim", "informative_features",
                    "seed"},
                   "generator spec");
    if (j.contains("types") != j.contains("relations")) {
      throw ConfigError("generator spec: 'types' and 'relations' go together");
    }
    if (j.contains("types")) {
      std::vector<Relation> rels;
      for (const auto& r : j.at("relations")) {
        rels.push_back({r.at(0).get<std::string>(), r.at(1).get<std::string>()});
      }
      spec.schema = Schema(j.at("types").get<std::vector<std::string>>(), rels);
    }
    if (j.contains("counts")) spec.counts = j.at("counts").get<std::map<std::string, long>>();
    if (j.contains("degrees")) {
      spec.degrees.clear();
      for (const auto& dj : j.at("degrees")) {
        reject_unknown(dj,
                       {"src", "dst", "law", "exponent", "min_degree", "max_degree",
                        "target_links"},
                       "degree spec");
        DegreeSpec d;
        d.src = dj.at("src").get<std::string>();
        d.dst = dj.at("dst").get<std::string>();
        if (dj.contains("law")) d.law = parse_law(dj.at("law").get<std::string>());
        d.exponent = dj.value("exponent", d.exponent);
        d.min_degree = dj.value("min_degree", d.min_degree);
        d.max_degree = dj.value("max_degree", d.max_degree);
        d.target_links = dj.value("target_links", d.target_links);
        spec.degrees.push_back(d);
      }
    }
    spec.labeled_type = j.value("labeled_type", spec.labeled_type);
    spec.num_classes = j.value("num_classes", spec.num_classes);
    if (j.contains("planted_path")) {
      spec.planted_path = j.at("planted_path").get<std::vector<std::string>>();
    }
    spec.affinity = j.value("affinity", spec.affinity);
    spec.noise = j.value("noise", spec.noise);
    spec.feature_dim = j.value("feature_dim", spec.feature_dim);
    spec.informative_features = j.value("informative_features", spec.informative_features);
    spec.seed = j.value("seed", spec.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("generator spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string gen_spec_to_json(const GenSpec& spec) {
  json j;
  j["types"] = spec.schema.types();
  j["relations"] = json::array();
  for (const auto& r : spec.schema.relations()) j["relations"].push_back({r.src, r.dst});
  j["counts"] = spec.counts;
  j["degrees"] = json::array();
  for (const auto& d : spec.degrees) {
    j["degrees"].push_back({{"src", d.src},
                            {"dst", d.dst},
                            {"law", law_name(d.law)},
                            {"exponent", d.exponent},
                            {"min_degree", d.min_degree},
                            {"max_degree", d.max_degree},
                            {"target_links", d.target_links}});
  }
  j["labeled_type"] = spec.labeled_type;
  j["num_classes"] = spec.num_classes;
  j["planted_path"] = spec.planted_path;
  j["affinity"] = spec.affinity;
  j["noise"] = spec.noise;
  j["feature_dim"] = spec.feature_dim;
  j["informative_features"] = spec.informative_features;
  j["seed"] = spec.seed;
  return j.dump(2) + "\n";
}

std::vector<int> planted_vote(const HinGraph& g, const std::vector<std::string>& path,
                              const std::vector<int>& anchor_classes, int num_classes) {
  Matrix mass = Matrix::Zero(static_cast<long>(anchor_classes.size()), num_classes);
  for (std::size_t i = 0; i < anchor_classes.size(); ++i) {
    mass(static_cast<long>(i), anchor_classes[i]) = 1.0;
  }
  for (std::size_t h = 0; h + 1 < path.size(); ++h) {
    SparseAdj a = row_normalize(g.adj(path[h], path[h + 1]));
    if (a.cols() != mass.rows()) {
      throw ShapeError("planted_vote: relation " + path[h] + "->" + path[h + 1] + " has " +
                       std::to_string(a.cols()) + " columns for " +
                       std::to_string(mass.rows()) + " objects");
    }
    Matrix next = Matrix::Zero(a.rows(), num_classes);
    for (long r = 0; r < a.rows(); ++r) {
      auto cols = a.row_cols(r);
      auto vals = a.row_values(r);
      for (std::size_t e = 0; e < cols.size(); ++e) next.row(r) += vals[e] * mass.row(cols[e]);
    }
    mass = std::move(next);
  }
  std::vector<int> out(static_cast<std::size_t>(mass.rows()), -1);
  for (long r = 0; r < mass.rows(); ++r) {
    double best = 0.0;
    for (int c = 0; c < num_classes; ++c) {
      if (mass(r, c) > best) {
        best = mass(r, c);
        out[static_cast<std::size_t>(r)] = c;
      }
    }
  }
  return out;
}

Generated generate_full(const GenSpec& spec) {
  spec.validate();
  const Schema& s = spec.schema;
  const int k = spec.num_classes;
  Rng root(spec.seed);

  // Latent classes for every type on the planted path.
  std::map<std::string, std::vector<int>> latent;
  Rng class_rng = root.split(1);
  for (std::size_t i = 0; i < spec.planted_path.size(); ++i) {
    const auto& t = spec.planted_path[i];
    if (latent.count(t)) continue;
    std::vector<int> c(static_cast<std::size_t>(spec.counts.at(t)));
    for (std::size_t o = 0; o < c.size(); ++o) {
      c[o] = i == 0 ? static_cast<int>(o % static_cast<std::size_t>(k))
                    : static_cast<int>(class_rng.uniform_int(static_cast<std::uint64_t>(k)));
    }
    latent[t] = std::move(c);
  }

  Generated out;
  HinGraph& g = out.graph;
  g.schema = s;
  g.adjacency.resize(s.relations().size());
  for (std::size_t r = 0; r < spec.degrees.size(); ++r) {
    const DegreeSpec& d = spec.degrees[r];
    const long n_src = spec.counts.at(d.src);
    const long n_dst = spec.counts.at(d.dst);
    if (d.min_degree > n_src) {
      throw ConfigError("relation " + d.src + "-" + d.dst + ": min degree " +
                        std::to_string(d.min_degree) + " exceeds the " +
                        std::to_string(n_src) + " objects of type " + d.src);
    }
    const long hi = std::min(d.max_degree, n_src);
    Rng rng = root.split(100 + r);
    auto deg = sample_degrees(d, n_dst, hi, rng);

    const bool planted = adjacent_on_path(spec.planted_path, d.src, d.dst) &&
                         latent.count(d.src) && latent.count(d.dst);
    std::vector<std::vector<long>> pools;
    if (planted) {
      pools.resize(static_cast<std::size_t>(k));
      const auto& ls = latent.at(d.src);
      for (std::size_t j = 0; j < ls.size(); ++j) {
        pools[static_cast<std::size_t>(ls[j])].push_back(static_cast<long>(j));
      }
    }
    std::vector<Triplet> trip;
    for (long i = 0; i < n_dst; ++i) {
      const std::vector<long>* pref =
          planted ? &pools[static_cast<std::size_t>(latent.at(d.dst)[static_cast<std::size_t>(i)])]
                  : nullptr;
      for (long j : pick_distinct(deg[static_cast<std::size_t>(i)], n_src, pref,
                                  planted ? spec.affinity : 0.0, rng)) {
        trip.push_back({i, j, 1.0});
      }
    }
    SparseAdj fwd = SparseAdj::from_triplets(n_dst, n_src, std::move(trip));
    auto fi = s.relation_index(d.src, d.dst);
    auto ri = s.relation_index(d.dst, d.src);
    if (ri && ri != fi) g.adjacency[*ri] = fwd.transpose();
    if (fi) g.adjacency[*fi] = std::move(fwd);
  }

  out.anchor_classes = latent.at(spec.planted_path.front());
  out.clean_labels = planted_vote(g, spec.planted_path, out.anchor_classes, k);
  const auto& own_latent = latent.at(spec.labeled_type);
  std::vector<int> labels = out.clean_labels;
  Rng noise_rng = root.split(2);
  for (std::size_t o = 0; o < labels.size(); ++o) {
    if (labels[o] < 0) labels[o] = own_latent[o];
    out.clean_labels[o] = labels[o];
    if (noise_rng.bernoulli(spec.noise)) {
      int shift = 1 + static_cast<int>(noise_rng.uniform_int(static_cast<std::uint64_t>(k - 1)));
      labels[o] = (labels[o] + shift) % k;
    }
  }

  for (std::size_t t = 0; t < s.types().size(); ++t) {
    const auto& type = s.types()[t];
    Matrix f = random_features(spec.counts.at(type), spec.feature_dim,
                               root.split(1000 + t).key());
    if (spec.informative_features && type == spec.labeled_type) {
      Rng crng = root.split(3);
      Matrix centers = xavier_uniform(k, spec.feature_dim, crng);
      for (long o = 0; o < f.rows(); ++o) f.row(o) += centers.row(labels[static_cast<std::size_t>(o)]);
    }
    g.features.push_back(std::move(f));
  }
  g.labels[spec.labeled_type] = std::move(labels);
  g.class_counts[spec.labeled_type] = k;
  return out;
}

HinGraph generate(const GenSpec& spec) { return generate_full(spec).graph; }

Split make_splits(const std::vector<int>& labels, double train_percent, std::uint64_t seed) {
  if (!(train_percent > 0.0 && train_percent < 100.0)) {
    throw ConfigError("train percentage must be in (0, 100)");
  }
  std::vector<long> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) idx.push_back(static_cast<long>(i));
  }
  const long n = static_cast<long>(idx.size());
  if (n < 3) throw DataError("need at least 3 labeled objects to split, got " + std::to_string(n));
  Rng rng(seed);
  shuffle(idx, rng);
  long n_train = std::llround(static_cast<double>(n) * train_percent / 100.0);
  n_train = std::clamp(n_train, 1L, n - 2);
  const long n_val = (n - n_train) / 2;
  Split s;
  s.train.assign(idx.begin(), idx.begin() + n_train);
  s.val.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
  s.test.assign(idx.begin() + n_train + n_val, idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

void assign_splits(HinGraph& g, double train_percent, std::uint64_t seed) {
  Rng root(seed);
  std::uint64_t stream = 0;
  for (const auto& [type, labels] : g.labels) {
    g.splits[type] = make_splits(labels, train_percent, root.split(stream++).key());
  }
}

Matrix random_features(long n, long dim, std::uint64_t seed) {
  Rng rng(seed);
  return xavier_uniform(n, dim, rng);
}

double power_law_mean(double exponent, long lo, long hi) {
  double num = 0.0, den = 0.0;
  for (long k = std::max(lo, 1L); k <= hi; ++k) {
    double p = std::pow(static_cast<double>(k), -exponent);
    num += p * static_cast<double>(k);
    den += p;
  }
  return den > 0.0 ? num / den : 0.0;
}

double fit_power_law_exponent(double mean, long lo, long hi) {
  double a = 0.0, b = 10.0;
  if (mean >= power_law_mean(a, lo, hi)) return a;
  if (mean <= power_law_mean(b, lo, hi)) return b;
  for (int it = 0; it < 100; ++it) {
    double m = 0.5 * (a + b);
    if (power_law_mean(m, lo, hi) > mean) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

GenSpec scale_spec(long authors, long total_objects, long total_links, std::uint64_t seed) {
  const long rest = total_objects - authors - kVenues;
  if (authors < 1 || rest < 2) throw ConfigError("scale: too few objects for the author count");
  GenSpec spec;
  const long papers = std::lround(static_cast<double>(rest) * kRealPapers / (kRealPapers + kRealTerms));
  const long terms = rest - papers;
  spec.counts = {{"P", papers}, {"A", authors}, {"C", kVenues}, {"T", terms}};
  const long other = total_links - papers;
  if (other < authors + papers) throw ConfigError("scale: too few links for the object counts");
  const long ap = std::lround(0.3 * static_cast<double>(other));
  const long tp = other - ap;
  const long ap_max = std::min(papers, 300L);
  const long tp_max = std::min(terms, 300L);
  spec.degrees = {
      {"C", "P", DegreeLaw::kPowerLaw, 2.5, 1, 1, papers},
      {"P", "A", DegreeLaw::kPowerLaw,
       fit_power_law_exponent(static_cast<double>(ap) / static_cast<double>(authors), 1, ap_max),
       1, ap_max, ap},
      {"T", "P", DegreeLaw::kPowerLaw,
       fit_power_law_exponent(static_cast<double>(tp) / static_cast<double>(papers), 1, tp_max),
       1, tp_max, tp},
  };
  spec.seed = seed;
  return spec;
}

}  // namespace hetconv
