#pragma once

// Brute-force reference computations used by unit and acceptance tests.
// These deliberately avoid the library's code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "ragseg/imaging.hpp"
#include "ragseg/matrix.hpp"

namespace ragseg::oracle {

struct Features {
  double contrast, homogeneity, energy, correlation;
};

// Counts every ordered pair of member pixels whose displacement is one of
// +-(1,0), +-(0,1), +-(1,1), +-(-1,1), then normalizes.
inline std::vector<double> naive_glcm(const GrayImage& g, const std::vector<std::uint8_t>& mask) {
  const int L = g.levels;
  std::vector<double> counts(static_cast<std::size_t>(L) * L, 0.0);
  std::vector<std::pair<int, int>> members;
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x)
      if (mask[static_cast<std::size_t>(y) * g.width + x]) members.push_back({x, y});
  double total = 0.0;
  for (auto [x1, y1] : members) {
    for (auto [x2, y2] : members) {
      const int dx = x2 - x1, dy = y2 - y1;
      const bool hit = (std::abs(dx) == 1 && dy == 0) || (dx == 0 && std::abs(dy) == 1) ||
                       (std::abs(dx) == 1 && std::abs(dy) == 1);
      if (!hit) continue;
      counts[static_cast<std::size_t>(g.at(x1, y1)) * L + g.at(x2, y2)] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) {
    const int b = g.at(members.front().first, members.front().second);
    counts[static_cast<std::size_t>(b) * L + b] = 1.0;
    return counts;
  }
  for (double& c : counts) c /= total;
  return counts;
}

inline Features naive_features(const std::vector<double>& p, int L) {
  auto P = [&](int m, int n) { return p[static_cast<std::size_t>(m) * L + n]; };
  Features f{0, 0, 0, 0};
  double mu_m = 0, mu_n = 0;
  for (int m = 0; m < L; ++m) {
    for (int n = 0; n < L; ++n) {
      f.contrast += (m - n) * (m - n) * P(m, n);
      f.homogeneity += P(m, n) / (1.0 + std::abs(m - n));
      f.energy += P(m, n) * P(m, n);
      mu_m += m * P(m, n);
      mu_n += n * P(m, n);
    }
  }
  double var_m = 0, var_n = 0, cov = 0;
  for (int m = 0; m < L; ++m) {
    for (int n = 0; n < L; ++n) {
      var_m += (m - mu_m) * (m - mu_m) * P(m, n);
      var_n += (n - mu_n) * (n - mu_n) * P(m, n);
      cov += (m - mu_m) * (n - mu_n) * P(m, n);
    }
  }
  const double s = std::sqrt(var_m * var_n);
  f.correlation = s > 0 ? cov / s : 1.0;
  return f;
}

// Every unordered label pair appearing across any 4-adjacent pixel pair.
inline std::set<std::pair<int, int>> brute_adjacency(const LabelMap& lm) {
  std::set<std::pair<int, int>> out;
  const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int y = 0; y < lm.height; ++y) {
    for (int x = 0; x < lm.width; ++x) {
      for (const auto& d : dirs) {
        const int xx = x + d[0], yy = y + d[1];
        if (xx < 0 || yy < 0 || xx >= lm.width || yy >= lm.height) continue;
        const int a = lm.at(x, y), b = lm.at(xx, yy);
        if (a != b) out.insert({std::min(a, b), std::max(a, b)});
      }
    }
  }
  return out;
}

// Mean and population standard deviation of a list.
inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size()))};
}

// softmax(QK^T/sqrt(d) + B) V with a plain triple loop and no max subtraction.
inline Matrix naive_attention(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& b) {
  const std::size_t n = q.rows(), d = q.cols();
  Matrix out(n, v.cols());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n);
    double z = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0;
      for (std::size_t c = 0; c < d; ++c) dot += q(i, c) * k(j, c);
      e[j] = std::exp(dot / std::sqrt(static_cast<double>(d)) + b(i, j));
      z += e[j];
    }
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < v.cols(); ++c) out(i, c) += e[j] / z * v(j, c);
  }
  return out;
}

// mIoU from a full confusion matrix; classes with empty union are skipped.
inline double confusion_miou(const std::vector<int>& pred, const std::vector<int>& gt, int classes, int ignore) {
  std::vector<std::vector<long>> cm(static_cast<std::size_t>(classes), std::vector<long>(classes, 0));
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == ignore) continue;
    ++cm[gt[i]][pred[i]];
  }
  double sum = 0;
  int count = 0;
  for (int c = 0; c < classes; ++c) {
    long tp = cm[c][c], row = 0, col = 0;
    for (int k = 0; k < classes; ++k) {
      row += cm[c][k];
      col += cm[k][c];
    }
    const long uni = row + col - tp;
    if (uni == 0) continue;
    sum += static_cast<double>(tp) / static_cast<double>(uni);
    ++count;
  }
  return count ? sum / count : 0.0;
}

// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0 || vb == 0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace ragseg::oracle
