#pragma once

// Independent reference implementations used by the unit and acceptance tests.
// Everything here is written from the definitions by brute force, without
// going through the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "tomd/tensor.hpp"
#include "tomd/tomd.hpp"

namespace oracle {

using tomd::Matrix;
using tomd::Shape;
using tomd::Tensor;

inline Tensor random_tensor(const Shape& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Tensor t(shape);
  for (auto& v : t.data()) v = g(rng);
  return t;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = g(rng);
  return m;
}

// Column-major linear index, computed the slow way.
inline std::size_t linear(const Shape& shape, const std::vector<std::size_t>& idx) {
  std::size_t off = 0, stride = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    off += idx[k] * stride;
    stride *= shape[k];
  }
  return off;
}

// Steps a multi-index odometer-style (first index fastest); false after the last.
inline bool next_index(std::vector<std::size_t>& idx, const Shape& extents) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (++idx[k] < extents[k]) return true;
    idx[k] = 0;
  }
  return false;
}

// Sum over every label assignment of the product of node entries. Labels
// listed in `output` are open and ordered as given.
inline Tensor contract_labels(const std::vector<Tensor>& nodes, const std::vector<std::vector<int>>& labels,
                              const std::vector<int>& output) {
  std::map<int, std::size_t> extent;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (std::size_t a = 0; a < labels[k].size(); ++a) extent[labels[k][a]] = nodes[k].shape()[a];
  std::vector<int> all;
  Shape ext;
  for (auto [l, e] : extent) {
    all.push_back(l);
    ext.push_back(e);
  }
  auto pos = [&](int l) { return static_cast<std::size_t>(std::find(all.begin(), all.end(), l) - all.begin()); };
  Shape out_shape;
  for (int l : output) out_shape.push_back(extent.at(l));
  if (out_shape.empty()) out_shape = {1};
  Tensor out(out_shape);
  std::vector<std::size_t> idx(all.size(), 0);
  do {
    double prod = 1.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      std::vector<std::size_t> sub;
      for (int l : labels[k]) sub.push_back(idx[pos(l)]);
      prod *= nodes[k][linear(nodes[k].shape(), sub)];
    }
    std::vector<std::size_t> o;
    for (int l : output) o.push_back(idx[pos(l)]);
    if (o.empty()) o = {0};
    out[linear(out_shape, o)] += prod;
  } while (!all.empty() && next_index(idx, ext));
  return out;
}

struct LabeledNetwork {
  std::vector<Tensor> nodes;
  std::vector<std::vector<int>> labels;
  std::vector<int> output;
};

// 1..max_nodes nodes, extents 1..max_extent, at most 8 labels in total so the
// brute-force sum stays small. Bonds may join any two distinct nodes (parallel
// bonds and disconnected pieces included); open labels land anywhere.
inline LabeledNetwork random_network(std::mt19937_64& rng, std::size_t max_nodes = 5, std::size_t max_extent = 3) {
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  LabeledNetwork net;
  const std::size_t nn = pick(1, max_nodes);
  std::vector<std::vector<std::pair<int, std::size_t>>> axes(nn);
  int label = 0;
  const std::size_t bonds = nn > 1 ? pick(0, 5) : 0;
  for (std::size_t b = 0; b < bonds; ++b) {
    const std::size_t a = pick(0, nn - 1);
    std::size_t c = pick(0, nn - 2);
    if (c >= a) ++c;
    const std::size_t e = pick(1, max_extent);
    axes[a].push_back({label, e});
    axes[c].push_back({label, e});
    ++label;
  }
  const std::size_t open = pick(0, 8 - bonds > 3 ? 3 : 8 - bonds);
  for (std::size_t o = 0; o < open; ++o) {
    axes[pick(0, nn - 1)].push_back({label, pick(1, max_extent)});
    net.output.push_back(label++);
  }
  for (auto& ax : axes) {
    if (ax.empty() && label < 8) {
      ax.push_back({label, pick(1, max_extent)});
      net.output.push_back(label++);
    } else if (ax.empty()) {
      ax.push_back({label++, 1});  // degenerate open axis of extent 1
      net.output.push_back(label - 1);
    }
    std::shuffle(ax.begin(), ax.end(), rng);
    Shape s;
    std::vector<int> l;
    for (auto [lab, e] : ax) {
      l.push_back(lab);
      s.push_back(e);
    }
    net.nodes.push_back(random_tensor(s, rng));
    net.labels.push_back(l);
  }
  std::shuffle(net.output.begin(), net.output.end(), rng);
  return net;
}

// TOMD core by nested loops over every index of every core.
inline Tensor tomd_core_loops(const tomd::TomdFactors& f) {
  const auto& g1 = f.cores[0];
  const auto& g2 = f.cores[1];
  const auto& g3 = f.cores[2];
  const auto& g4 = f.cores[3];
  const auto& g5 = f.cores[4];
  const std::size_t d4 = g1.shape()[0], r1 = g1.shape()[1], d1 = g1.shape()[2], d5 = g1.shape()[3];
  const std::size_t r2 = g2.shape()[1], d2 = g2.shape()[2];
  const std::size_t r3 = g3.shape()[1], d3 = g3.shape()[2], d6 = g3.shape()[3];
  const std::size_t r4 = g4.shape()[1];
  Tensor out({r1, r2, r3, r4});
  for (std::size_t a = 0; a < r1; ++a)
    for (std::size_t b = 0; b < r2; ++b)
      for (std::size_t c = 0; c < r3; ++c)
        for (std::size_t e = 0; e < r4; ++e) {
          double s = 0;
          for (std::size_t i1 = 0; i1 < d1; ++i1)
            for (std::size_t i2 = 0; i2 < d2; ++i2)
              for (std::size_t i3 = 0; i3 < d3; ++i3)
                for (std::size_t i4 = 0; i4 < d4; ++i4)
                  for (std::size_t i5 = 0; i5 < d5; ++i5)
                    for (std::size_t i6 = 0; i6 < d6; ++i6)
                      s += g1.at({i4, a, i1, i5}) * g2.at({i1, b, i2}) * g3.at({i2, c, i3, i6}) *
                           g4.at({i3, e, i4}) * g5.at({i5, i6});
          out.at({a, b, c, e}) = s;
        }
  return out;
}

// Exact element count of a factor set.
inline std::size_t count_elements(const tomd::TomdFactors& f) {
  std::size_t n = 0;
  for (const auto& c : f.cores) n += c.size();
  for (const auto& u : f.factors) n += static_cast<std::size_t>(u.size());
  return n;
}

// ---- partitions and metric definitions ----

// All set partitions of n items as restricted growth strings.
inline std::vector<std::vector<int>> all_partitions(std::size_t n) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  auto rec = [&](auto&& self, std::size_t i, int maxv) -> void {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
      a[i] = v;
      self(self, i + 1, std::max(maxv, v));
    }
  };
  if (n == 0) return {{}};
  a[0] = 0;
  rec(rec, 1, 0);
  return out;
}

struct Pairs {
  double tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Pairs pairs(const std::vector<int>& p, const std::vector<int>& t) {
  Pairs c;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const bool sp = p[i] == p[j], st = t[i] == t[j];
      if (sp && st) c.tp += 1;
      else if (sp) c.fp += 1;
      else if (st) c.fn += 1;
      else c.tn += 1;
    }
  return c;
}

inline double safe_div(double a, double b) { return b == 0 ? 0.0 : a / b; }

inline double precision(const std::vector<int>& p, const std::vector<int>& t) {
  auto c = pairs(p, t);
  return safe_div(c.tp, c.tp + c.fp);
}
inline double recall(const std::vector<int>& p, const std::vector<int>& t) {
  auto c = pairs(p, t);
  return safe_div(c.tp, c.tp + c.fn);
}
inline double f_score(const std::vector<int>& p, const std::vector<int>& t) {
  const double pr = precision(p, t), re = recall(p, t);
  return safe_div(2 * pr * re, pr + re);
}

inline bool same_partition(const std::vector<int>& p, const std::vector<int>& t) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      if ((p[i] == p[j]) != (t[i] == t[j])) return false;
  return true;
}

// Hubert-Arabie ARI in its pair-count form.
inline double ari(const std::vector<int>& p, const std::vector<int>& t) {
  auto c = pairs(p, t);
  const double num = 2.0 * (c.tp * c.tn - c.fp * c.fn);
  const double den = (c.tp + c.fp) * (c.fp + c.tn) + (c.tp + c.fn) * (c.fn + c.tn);
  if (den == 0) return same_partition(p, t) ? 1.0 : 0.0;
  return num / den;
}

inline std::size_t distinct(const std::vector<int>& v) {
  std::vector<int> s = v;
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

inline double entropy_of(const std::vector<int>& v) {
  std::map<int, double> c;
  for (int x : v) c[x] += 1;
  double h = 0, n = static_cast<double>(v.size());
  for (auto [k, m] : c) h -= (m / n) * std::log(m / n);
  return h;
}

inline double nmi(const std::vector<int>& p, const std::vector<int>& t, bool arithmetic = false) {
  const double n = static_cast<double>(p.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> cp, ct;
  for (std::size_t i = 0; i < p.size(); ++i) {
    joint[{p[i], t[i]}] += 1;
    cp[p[i]] += 1;
    ct[t[i]] += 1;
  }
  double mi = 0;
  for (auto [k, m] : joint) mi += (m / n) * std::log(m * n / (cp[k.first] * ct[k.second]));
  const double hp = entropy_of(p), ht = entropy_of(t);
  const double den = arithmetic ? (hp + ht) / 2 : std::sqrt(hp * ht);
  if (den == 0) return (distinct(p) == 1 && distinct(t) == 1) ? 1.0 : 0.0;
  return mi / den;
}

// Best fraction of matches over every injective relabeling, by enumeration.
inline double acc(const std::vector<int>& p, const std::vector<int>& t) {
  std::map<int, int> pid, tid;
  for (int x : p) pid.emplace(x, static_cast<int>(pid.size()));
  for (int x : t) tid.emplace(x, static_cast<int>(tid.size()));
  const int m = static_cast<int>(std::max(pid.size(), tid.size()));
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hit += perm[static_cast<std::size_t>(pid[p[i]])] == tid[t[i]];
    best = std::max(best, hit);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(p.size());
}

}  // namespace oracle
