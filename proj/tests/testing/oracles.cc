//
// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "testing/oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace dpsynth::testing {

Domain RandomDomain(Rng& rng, int max_attributes, int max_size,
                    std::uint64_t max_cells) {
  std::uniform_int_distribution<int> num_attrs(1, max_attributes);
  std::uniform_int_distribution<int> size(2, max_size);
  while (true) {
    std::vector<Attribute> attrs;
    const int d = num_attrs(rng);
    std::uint64_t cells = 1;
    for (int i = 0; i < d; ++i) {
      const int s = size(rng);
      attrs.push_back({"x" + std::to_string(i), s});
      cells *= static_cast<std::uint64_t>(s);
    }
    if (cells <= max_cells) return Domain(std::move(attrs));
  }
}

Dataset RandomDataset(const Domain& domain, std::size_t n, Rng& rng) {
  // Skewed marginals so that answers are not all near uniform.
  std::vector<std::vector<double>> probs;
  for (std::size_t a = 0; a < domain.num_attributes(); ++a) {
    probs.push_back(RandomSimplex(static_cast<std::size_t>(domain.size(a)), rng));
  }
  std::vector<int> values;
  values.reserve(n * domain.num_attributes());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < domain.num_attributes(); ++a) {
      std::discrete_distribution<int> pick(probs[a].begin(), probs[a].end());
      values.push_back(pick(rng));
    }
  }
  return Dataset(domain, std::move(values));
}

MarginalQuery RandomQuery(const Domain& domain, Rng& rng) {
  const int d = static_cast<int>(domain.num_attributes());
  std::uniform_int_distribution<int> order(1, d);
  std::vector<int> attrs(d);
  std::iota(attrs.begin(), attrs.end(), 0);
  std::shuffle(attrs.begin(), attrs.end(), rng);
  attrs.resize(order(rng));
  std::sort(attrs.begin(), attrs.end());
  MarginalQuery q;
  q.features = attrs;
  for (int a : attrs) {
    std::uniform_int_distribution<int> value(0, domain.size(a) - 1);
    q.targets.push_back(value(rng));
  }
  return q;
}

std::vector<double> RandomSimplex(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) sum += (x = e(rng));
  for (auto& x : v) x /= sum;
  return v;
}

bool CellSatisfies(const Domain& domain, std::uint64_t cell, const MarginalQuery& q) {
  // Decode by repeated division from the last attribute.
  std::vector<int> values(domain.num_attributes());
  for (std::size_t a = domain.num_attributes(); a-- > 0;) {
    const auto s = static_cast<std::uint64_t>(domain.size(a));
    values[a] = static_cast<int>(cell % s);
    cell /= s;
  }
  for (std::size_t i = 0; i < q.features.size(); ++i) {
    if (values[static_cast<std::size_t>(q.features[i])] != q.targets[i]) return false;
  }
  return true;
}

double CountHistogramAnswer(const Domain& domain, std::span<const double> mass,
                            const MarginalQuery& q) {
  double total = 0.0;
  for (std::uint64_t c = 0; c < mass.size(); ++c) {
    if (CellSatisfies(domain, c, q)) total += mass[c];
  }
  return total;
}

double CountRecordAnswer(const Dataset& data, const MarginalQuery& q) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rec = data.record(i);
    bool ok = true;
    for (std::size_t j = 0; j < q.features.size(); ++j) {
      ok = ok && rec[static_cast<std::size_t>(q.features[j])] == q.targets[j];
    }
    hits += ok ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double ProductAnswer(const Domain& domain, std::span<const double> rows,
                     std::size_t num_rows, const MarginalQuery& q) {
  const std::size_t width = domain.onehot_width();
  double total = 0.0;
  for (std::size_t r = 0; r < num_rows; ++r) {
    double prod = 1.0;
    std::size_t offset = 0;
    std::size_t next = 0;
    for (std::size_t a = 0; a < domain.num_attributes(); ++a) {
      if (next < q.features.size() && static_cast<std::size_t>(q.features[next]) == a) {
        prod *= rows[r * width + offset + static_cast<std::size_t>(q.targets[next])];
        ++next;
      }
      offset += static_cast<std::size_t>(domain.size(a));
    }
    total += prod;
  }
  return total / static_cast<double>(num_rows);
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

double TotalVariation(std::span<const double> p, std::span<const double> q) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

std::vector<double> ProjectToSimplex(std::span<const double> v) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

std::vector<double> MinimizeLinearPlusNegEntropy(std::span<const double> linear,
                                                 int iterations, double step) {
  const std::size_t n = linear.size();
  std::vector<double> d(n, 1.0 / static_cast<double>(n));
  std::vector<double> trial(n);
  constexpr double kFloor = 1e-15;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      trial[i] = d[i] - step * (linear[i] + 1.0 + std::log(std::max(d[i], kFloor)));
    }
    d = ProjectToSimplex(trial);
  }
  return d;
}

namespace {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
std::vector<double> Solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
    std::swap(b[col], b[pivot]);
    const double diag = a[col * n + col];
    if (std::abs(diag) < 1e-300) throw std::runtime_error("singular system");
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / diag;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
    x[r] = s / a[r * n + r];
  }
  return x;
}

}  // namespace

std::vector<double> MaxEntropyDualSolve(const Domain& domain,
                                        std::span<const Constraint> constraints,
                                        std::span<const double> base,
                                        int max_iterations) {
  const std::size_t cells = base.size();
  const std::size_t m = constraints.size();
  std::vector<std::vector<double>> ind(m, std::vector<double>(cells, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::uint64_t c = 0; c < cells; ++c) {
      ind[i][c] = CellSatisfies(domain, c, constraints[i].query) ? 1.0 : 0.0;
    }
  }
  std::vector<double> lambda(m, 0.0);
  auto distribution = [&](std::span<const double> l) {
    std::vector<double> logits(cells);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cells; ++c) {
      double s = std::log(base[c]);
      for (std::size_t i = 0; i < m; ++i) s += l[i] * ind[i][c];
      logits[c] = s;
      top = std::max(top, s);
    }
    double z = 0.0;
    for (auto& v : logits) z += (v = std::exp(v - top));
    for (auto& v : logits) v /= z;
    return std::pair{logits, top + std::log(z)};
  };
  auto dual = [&](std::span<const double> l) {
    double v = distribution(l).second;
    for (std::size_t i = 0; i < m; ++i) v -= l[i] * constraints[i].target;
    return v;
  };
  for (int it = 0; it < max_iterations; ++it) {
    const auto [p, log_z] = distribution(lambda);
    std::vector<double> grad(m), mean(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t c = 0; c < cells; ++c) mean[i] += p[c] * ind[i][c];
      grad[i] = mean[i] - constraints[i].target;
    }
    double gnorm = 0.0;
    for (double g : grad) gnorm = std::max(gnorm, std::abs(g));
    if (gnorm < 1e-13) break;
    // Hessian is the covariance of the indicators; a small ridge handles
    // duplicated constraints.
    std::vector<double> h(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < cells; ++c) s += p[c] * ind[i][c] * ind[j][c];
        h[i * m + j] = s - mean[i] * mean[j] + (i == j ? 1e-10 : 0.0);
      }
    }
    std::vector<double> neg(m);
    for (std::size_t i = 0; i < m; ++i) neg[i] = -grad[i];
    const std::vector<double> dir = Solve(h, neg);
    const double f0 = dual(lambda);
    double slope = 0.0;
    for (std::size_t i = 0; i < m; ++i) slope += grad[i] * dir[i];
    double t = 1.0;
    std::vector<double> next(m);
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < m; ++i) next[i] = lambda[i] + t * dir[i];
      if (dual(next) <= f0 + 1e-4 * t * slope) break;
    }
    lambda = next;
  }
  return distribution(lambda).first;
}

std::vector<double> CentralDifferences(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double GridSearchMixtureError(const std::vector<std::vector<double>>& answers,
                              std::span<const double> targets, int steps) {
  const std::size_t s = answers.size();
  if (s < 2 || s > 3) throw std::invalid_argument("grid search needs 2 or 3 points");
  double best = std::numeric_limits<double>::infinity();
  auto evaluate = [&](const double* mu) {
    double worst = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < s; ++k) v += mu[k] * answers[k][j];
      worst = std::max(worst, std::abs(targets[j] - v));
    }
    best = std::min(best, worst);
  };
  for (int i = 0; i <= steps; ++i) {
    if (s == 2) {
      const double mu[2] = {static_cast<double>(i) / steps, 1.0 - static_cast<double>(i) / steps};
      evaluate(mu);
      continue;
    }
    for (int j = 0; i + j <= steps; ++j) {
      const double mu[3] = {static_cast<double>(i) / steps, static_cast<double>(j) / steps,
                            static_cast<double>(steps - i - j) / steps};
      evaluate(mu);
    }
  }
  return best;
}

std::size_t ScanArgmin(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

double SignedCostAtCell(const QuerySet& queries, std::span<const std::size_t> signed_idx,
                        std::uint64_t cell) {
  const std::size_t m = queries.size();
  double total = 0.0;
  for (std::size_t s : signed_idx) {
    const bool complement = s >= m;
    const double hit =
        CellSatisfies(queries.domain(), cell, queries.Query(complement ? s - m : s)) ? 1.0
                                                                                      : 0.0;
    total += complement ? 1.0 - hit : hit;
  }
  return total;
}

}  // namespace dpsynth::testing
