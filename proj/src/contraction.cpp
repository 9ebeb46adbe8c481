#include "tomd/contraction.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "tomd/error.hpp"
#include "tomd/kernels.hpp"

namespace tomd {

namespace {

// Intermediate result; unlike Tensor it may have zero axes.
struct Item {
  std::vector<std::size_t> ext;
  std::vector<int> labels;
  std::vector<double> data;
};

std::string ref_string(AxisRef r) {
  return "(node " + std::to_string(r.node) + ", axis " + std::to_string(r.axis) + ")";
}

Item permuted(const Item& it, const std::vector<std::size_t>& perm) {
  bool identity = true;
  for (std::size_t k = 0; k < perm.size(); ++k) identity = identity && perm[k] == k;
  if (identity) return it;
  Item out;
  out.data.resize(it.data.size());
  for (auto p : perm) {
    out.ext.push_back(it.ext[p]);
    out.labels.push_back(it.labels[p]);
  }
  kernels::permute(it.data, it.ext, perm, out.data);
  return out;
}

std::size_t position(const std::vector<int>& labels, int label) {
  return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), label) - labels.begin());
}

// Sums out every label that occurs twice within one item.
Item trace_repeated(Item it) {
  for (;;) {
    std::size_t p = it.labels.size(), q = it.labels.size();
    for (std::size_t a = 0; a < it.labels.size() && p == it.labels.size(); ++a)
      for (std::size_t b = a + 1; b < it.labels.size(); ++b)
        if (it.labels[a] == it.labels[b]) {
          p = a;
          q = b;
          break;
        }
    if (p == it.labels.size()) return it;
    std::vector<std::size_t> perm;
    for (std::size_t k = 0; k < it.labels.size(); ++k)
      if (k != p && k != q) perm.push_back(k);
    perm.push_back(p);
    perm.push_back(q);
    Item moved = permuted(it, perm);
    const std::size_t d = it.ext[p];
    const std::size_t rest = moved.data.size() / (d * d);
    Item out;
    out.ext.assign(moved.ext.begin(), moved.ext.end() - 2);
    out.labels.assign(moved.labels.begin(), moved.labels.end() - 2);
    out.data.assign(rest, 0.0);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t r = 0; r < rest; ++r) out.data[r] += moved.data[r + rest * (k + d * k)];
    it = std::move(out);
  }
}

std::vector<int> shared_labels(const Item& a, const Item& b) {
  std::vector<int> s;
  for (int l : a.labels)
    if (std::find(b.labels.begin(), b.labels.end(), l) != b.labels.end()) s.push_back(l);
  return s;
}

std::size_t result_size(const Item& a, const Item& b, const std::vector<int>& shared) {
  std::size_t n = 1;
  for (std::size_t k = 0; k < a.labels.size(); ++k)
    if (std::find(shared.begin(), shared.end(), a.labels[k]) == shared.end()) n *= a.ext[k];
  for (std::size_t k = 0; k < b.labels.size(); ++k)
    if (std::find(shared.begin(), shared.end(), b.labels[k]) == shared.end()) n *= b.ext[k];
  return n;
}

Item contract_pair(const Item& a, const Item& b) {
  const auto shared = shared_labels(a, b);
  std::vector<std::size_t> perm_a, perm_b;
  std::size_t rows = 1, inner = 1, cols = 1;
  for (std::size_t k = 0; k < a.labels.size(); ++k)
    if (std::find(shared.begin(), shared.end(), a.labels[k]) == shared.end()) {
      perm_a.push_back(k);
      rows *= a.ext[k];
    }
  for (int l : shared) {
    perm_a.push_back(position(a.labels, l));
    perm_b.push_back(position(b.labels, l));
    inner *= a.ext[position(a.labels, l)];
  }
  for (std::size_t k = 0; k < b.labels.size(); ++k)
    if (std::find(shared.begin(), shared.end(), b.labels[k]) == shared.end()) {
      perm_b.push_back(k);
      cols *= b.ext[k];
    }
  const Item pa = permuted(a, perm_a);
  const Item pb = permuted(b, perm_b);

  Item out;
  out.ext.assign(pa.ext.begin(), pa.ext.end() - static_cast<std::ptrdiff_t>(shared.size()));
  out.labels.assign(pa.labels.begin(), pa.labels.end() - static_cast<std::ptrdiff_t>(shared.size()));
  out.ext.insert(out.ext.end(), pb.ext.begin() + static_cast<std::ptrdiff_t>(shared.size()), pb.ext.end());
  out.labels.insert(out.labels.end(), pb.labels.begin() + static_cast<std::ptrdiff_t>(shared.size()),
                    pb.labels.end());
  out.data.resize(rows * cols);
  const auto r = static_cast<Eigen::Index>(rows);
  const auto k = static_cast<Eigen::Index>(inner);
  const auto c = static_cast<Eigen::Index>(cols);
  Eigen::Map<Matrix>(out.data.data(), r, c).noalias() =
      Eigen::Map<const Matrix>(pa.data.data(), r, k) * Eigen::Map<const Matrix>(pb.data.data(), k, c);
  return out;
}

}  // namespace

void validate(const ContractionNetwork& net) {
  if (net.nodes.empty()) throw NetworkError("network has no nodes");
  std::vector<std::vector<int>> uses(net.nodes.size());
  for (std::size_t n = 0; n < net.nodes.size(); ++n) uses[n].assign(net.nodes[n].order(), 0);
  auto use = [&](AxisRef r) {
    if (r.node >= net.nodes.size() || r.axis >= net.nodes[r.node].order())
      throw NetworkError("axis reference " + ref_string(r) + " does not exist");
    ++uses[r.node][r.axis];
  };
  for (const auto& e : net.edges) {
    if (e.a == e.b) throw NetworkError("edge joins axis " + ref_string(e.a) + " to itself");
    use(e.a);
    use(e.b);
    if (net.nodes[e.a.node].shape()[e.a.axis] != net.nodes[e.b.node].shape()[e.b.axis])
      throw ShapeError("bond " + ref_string(e.a) + " - " + ref_string(e.b) +
                       " joins axes of different extent");
  }
  for (const auto& o : net.open_axes) use(o);
  for (std::size_t n = 0; n < uses.size(); ++n)
    for (std::size_t a = 0; a < uses[n].size(); ++a) {
      if (uses[n][a] == 0) throw NetworkError("axis " + ref_string({n, a}) + " is dangling");
      if (uses[n][a] > 1) throw NetworkError("axis " + ref_string({n, a}) + " is used twice");
    }
}

Tensor contract(const ContractionNetwork& net, Schedule schedule) {
  validate(net);
  const int n_edges = static_cast<int>(net.edges.size());
  std::vector<Item> items(net.nodes.size());
  for (std::size_t n = 0; n < net.nodes.size(); ++n) {
    const auto& t = net.nodes[n];
    items[n].ext = t.shape();
    items[n].labels.assign(t.order(), -1);
    items[n].data.assign(t.data().begin(), t.data().end());
  }
  for (int e = 0; e < n_edges; ++e) {
    items[net.edges[e].a.node].labels[net.edges[e].a.axis] = e;
    items[net.edges[e].b.node].labels[net.edges[e].b.axis] = e;
  }
  for (std::size_t k = 0; k < net.open_axes.size(); ++k)
    items[net.open_axes[k].node].labels[net.open_axes[k].axis] = n_edges + static_cast<int>(k);
  for (auto& it : items) it = trace_repeated(std::move(it));

  if (schedule == Schedule::sequential) {
    for (std::size_t n = 1; n < items.size(); ++n) items[0] = contract_pair(items[0], items[n]);
    items.resize(1);
  }
  while (items.size() > 1) {
    std::size_t bi = 0, bj = 1;
    bool best_connected = false;
    std::size_t best_cost = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < items.size(); ++i)
      for (std::size_t j = i + 1; j < items.size(); ++j) {
        const auto shared = shared_labels(items[i], items[j]);
        const bool connected = !shared.empty();
        const std::size_t cost = result_size(items[i], items[j], shared);
        if ((connected && !best_connected) || (connected == best_connected && cost < best_cost)) {
          bi = i;
          bj = j;
          best_connected = connected;
          best_cost = cost;
        }
      }
    items[bi] = contract_pair(items[bi], items[bj]);
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  Item& result = items.front();
  std::vector<std::size_t> perm(net.open_axes.size());
  for (std::size_t k = 0; k < perm.size(); ++k)
    perm[k] = position(result.labels, n_edges + static_cast<int>(k));
  Item ordered = permuted(result, perm);
  if (ordered.ext.empty()) return Tensor({1}, std::move(ordered.data));
  return Tensor(std::move(ordered.ext), std::move(ordered.data));
}

ContractionNetwork network_from_labels(std::vector<Tensor> nodes,
                                       const std::vector<std::vector<int>>& labels,
                                       std::span<const int> output) {
  if (labels.size() != nodes.size()) throw NetworkError("one label list per node is required");
  std::map<int, std::vector<AxisRef>> where;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (labels[n].size() != nodes[n].order())
      throw NetworkError("node " + std::to_string(n) + " has " + std::to_string(nodes[n].order()) +
                         " axes but " + std::to_string(labels[n].size()) + " labels");
    for (std::size_t a = 0; a < labels[n].size(); ++a) where[labels[n][a]].push_back({n, a});
  }
  ContractionNetwork net;
  net.nodes = std::move(nodes);
  for (int l : output) {
    auto it = where.find(l);
    if (it == where.end() || it->second.size() != 1)
      throw NetworkError("output label " + std::to_string(l) + " must occur on exactly one axis");
    net.open_axes.push_back(it->second.front());
  }
  for (const auto& [label, refs] : where) {
    if (refs.size() == 2) {
      net.edges.push_back({refs[0], refs[1]});
    } else if (refs.size() > 2) {
      throw NetworkError("label " + std::to_string(label) + " occurs more than twice");
    } else if (std::find(output.begin(), output.end(), label) == output.end()) {
      throw NetworkError("label " + std::to_string(label) + " is neither bonded nor in the output");
    }
  }
  return net;
}

}  // namespace tomd
