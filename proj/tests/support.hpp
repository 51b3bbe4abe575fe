#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ilb/bandit/agents.hpp"
#include "ilb/net/leaky_relu_net.hpp"
#include "ilb/net/maxout_net.hpp"

namespace ilb::test {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ilb_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Straight-line re-implementations used as independent oracles. They read only the raw
// layer parameters and never call the library's forward code.
inline std::vector<double> scalar_affine(const AffineLayer& l, const std::vector<double>& x) {
  std::vector<double> y(static_cast<std::size_t>(l.weight.rows()));
  for (Eigen::Index i = 0; i < l.weight.rows(); ++i) {
    double acc = l.bias(i);
    for (Eigen::Index j = 0; j < l.weight.cols(); ++j) acc += l.weight(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

inline std::vector<double> scalar_leaky_forward(const LeakyReluNet& net, std::vector<double> h) {
  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    h = scalar_affine(layers[k], h);
    if (k + 1 < layers.size())
      for (double& v : h)
        if (v < 0.0) v *= net.alpha();
  }
  return h;
}

inline std::vector<double> scalar_maxout_forward(const MaxoutNet& net, std::vector<double> h) {
  for (const auto& layer : net.hidden()) {
    std::vector<double> best;
    for (const auto& piece : layer.pieces) {
      const auto y = scalar_affine(piece, h);
      if (best.empty()) {
        best = y;
      } else {
        for (std::size_t i = 0; i < y.size(); ++i) best[i] = std::max(best[i], y[i]);
      }
    }
    h = best;
  }
  return scalar_affine(net.output(), h);
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline double max_abs_diff(const std::vector<double>& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b(static_cast<Eigen::Index>(i))));
  return m;
}

// Relative error with a small absolute floor so vanishing gradients do not divide by zero.
inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

struct GradCheck {
  double worst = 0.0;
  int checked = 0;
  int skipped = 0;  // perturbation crossed a kink, derivative undefined there
};

// Active linear region: which side of zero each leaky unit sits on, or which piece wins
// each maxout unit.
inline std::vector<int> region(const LeakyReluNet::Cache& c) {
  std::vector<int> r;
  for (std::size_t k = 0; k + 1 < c.preacts.size(); ++k)
    for (Eigen::Index j = 0; j < c.preacts[k].size(); ++j) r.push_back(c.preacts[k](j) >= 0.0);
  return r;
}

inline std::vector<int> region(const MaxoutNet::Cache& c) {
  std::vector<int> r;
  for (const auto& layer : c.argmax) r.insert(r.end(), layer.begin(), layer.end());
  return r;
}

// Central differences of L(theta) = c . f(x; theta) against the analytic tape, one
// parameter at a time through the mutable parameter views. `forward` evaluates the net
// at the current parameters. Coordinates whose perturbation changes the active linear
// region are skipped.
template <class Net>
GradCheck check_gradients(Net& net, const Vector& x, const Vector& c, double step = 1e-5) {
  typename Net::Cache cache;
  net.forward(x, cache);
  const GradientTape tape = net.backward(cache, c);
  const auto base_region = region(cache);
  auto same_region = [&](const Vector& xx) {
    typename Net::Cache probe;
    std::as_const(net).forward(xx, probe);
    return region(probe) == base_region;
  };
  GradCheck out;
  auto blocks = net.parameter_blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i = 0; i < blocks[b].size(); ++i) {
      // Re-fetch the views: mutable access bumps the version but storage is stable.
      double& p = net.parameter_blocks()[b][i];
      const double saved = p;
      p = saved + step;
      const double up = c.dot(std::as_const(net).forward(x));
      const bool up_ok = same_region(x);
      p = saved - step;
      const double down = c.dot(std::as_const(net).forward(x));
      const bool down_ok = same_region(x);
      p = saved;
      if (!up_ok || !down_ok) {
        ++out.skipped;
        continue;
      }
      const double numeric = (up - down) / (2.0 * step);
      out.worst = std::max(out.worst, relative_error(tape.blocks[b](static_cast<Eigen::Index>(i)), numeric));
      ++out.checked;
    }
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    if (!same_region(xp) || !same_region(xm)) {
      ++out.skipped;
      continue;
    }
    const double numeric = (c.dot(std::as_const(net).forward(xp)) - c.dot(std::as_const(net).forward(xm))) / (2.0 * step);
    out.worst = std::max(out.worst, relative_error(tape.input(i), numeric));
    ++out.checked;
  }
  return out;
}

// Best total weight over all n! assignments.
inline double brute_force_best(const DenseMatrix& w) {
  std::vector<int> perm(static_cast<std::size_t>(w.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1e300;
  do {
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) s += w(i, perm[static_cast<std::size_t>(i)]);
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Plain gradient descent with backtracking, started from the best point of a coarse grid.
inline Vector brute_force_greedy2(const Greedy2State& s, const ArmEstimates& arms) {
  const auto d = s.estimate.size();
  Vector best = Vector::Zero(d);
  double best_f = greedy2_objective(s, arms, best);
  const int n = 21;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    Vector z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = -3.0 + 6.0 * idx[static_cast<std::size_t>(i)] / (n - 1);
    const double f = greedy2_objective(s, arms, z);
    if (f < best_f) {
      best_f = f;
      best = z;
    }
    Eigen::Index k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == d) break;
  }
  for (int it = 0; it < 20000; ++it) {
    Vector g(d);
    const double h = 1e-7;
    for (Eigen::Index i = 0; i < d; ++i) {
      Vector zp = best, zm = best;
      zp(i) += h;
      zm(i) -= h;
      g(i) = (greedy2_objective(s, arms, zp) - greedy2_objective(s, arms, zm)) / (2 * h);
    }
    if (g.norm() < 1e-10) break;
    double step = 1.0;
    while (step > 1e-16) {
      const Vector cand = best - step * g;
      const double f = greedy2_objective(s, arms, cand);
      if (f < best_f) {
        best = cand;
        best_f = f;
        break;
      }
      step *= 0.5;
    }
    if (step <= 1e-16) break;
  }
  return best;
}

}  // namespace ilb::test
