#pragma once

// Clustering evaluation: pair-counting F/P/R, NMI, adjusted Rand, accuracy.
// Labels are arbitrary integers; only the partition matters.

#include <cstddef>
#include <string>
#include <vector>

#include "tomd/tensor.hpp"

namespace tomd {

struct PairCounts {
  double tp = 0, fp = 0, fn = 0, tn = 0;
};

// Rows: predicted clusters, columns: true clusters, each compacted to
// 0.. in increasing label order.
Matrix contingency_table(const std::vector<int>& pred, const std::vector<int>& truth);

PairCounts pair_counts(const std::vector<int>& pred, const std::vector<int>& truth);

struct Prf {
  double f_score = 0, precision = 0, recall = 0;
};
Prf pair_counting_prf(const std::vector<int>& pred, const std::vector<int>& truth);

enum class NmiNorm { geometric, arithmetic };
double nmi(const std::vector<int>& pred, const std::vector<int>& truth, NmiNorm norm = NmiNorm::geometric);

double adjusted_rand(const std::vector<int>& pred, const std::vector<int>& truth);

// Max-weight assignment on a rows x cols weight matrix (rows <= cols or not);
// result[i] is the column matched to row i, or -1.
std::vector<int> max_weight_assignment(const Matrix& weights);

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

struct MetricReport {
  double f_score = 0, precision = 0, recall = 0, nmi = 0, ar = 0, acc = 0;
};

MetricReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth,
                      NmiNorm norm = NmiNorm::geometric);

}  // namespace tomd
