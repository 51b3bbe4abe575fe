#include "ilb/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "ilb/csv.hpp"
#include "ilb/errors.hpp"
#include "ilb/eval/hungarian.hpp"

namespace ilb {

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ConfigError("pearson: size mismatch");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

MccReport mcc(const DenseMatrix& true_latents, const DenseMatrix& estimated_latents) {
  if (true_latents.rows() != estimated_latents.rows()) throw ConfigError("mcc: sample counts differ");
  if (true_latents.cols() != estimated_latents.cols() || true_latents.cols() < 1)
    throw ConfigError("mcc: latent dimensions differ");
  if (true_latents.rows() < 2) throw ConfigError("mcc: need at least 2 samples");
  const auto n = true_latents.rows();
  const auto d = true_latents.cols();

  MccReport rep;
  rep.abs_correlation.resize(d, d);
  rep.zero_variance.assign(static_cast<std::size_t>(d), false);
  const DenseMatrix zt = true_latents.rowwise() - true_latents.colwise().mean();
  const DenseMatrix ze = estimated_latents.rowwise() - estimated_latents.colwise().mean();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double ne = ze.col(i).norm();
    if (!(ne > 0.0)) rep.zero_variance[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double nt = zt.col(j).norm();
      rep.abs_correlation(i, j) = (ne > 0.0 && nt > 0.0) ? std::abs(ze.col(i).dot(zt.col(j)) / (ne * nt)) : 0.0;
    }
  }
  rep.assignment = max_weight_assignment(rep.abs_correlation);
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) total += rep.abs_correlation(i, rep.assignment[static_cast<std::size_t>(i)]);
  rep.mcc_perm = total / static_cast<double>(d);

  // Affine alignment: regress each true coordinate on [estimated, 1].
  DenseMatrix design(n, d + 1);
  design.leftCols(d) = estimated_latents;
  design.col(d).setOnes();
  const auto qr = design.colPivHouseholderQr();
  double sum_r = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const Vector target = true_latents.col(j);
    const double ss_tot = zt.col(j).squaredNorm();
    double r2v = 0.0;
    if (ss_tot > 0.0) {
      const Vector fit = design * qr.solve(target);
      r2v = std::clamp(1.0 - (target - fit).squaredNorm() / ss_tot, 0.0, 1.0);
    }
    rep.affine_r2.push_back(r2v);
    sum_r += std::sqrt(r2v);
  }
  rep.mcc_affine = sum_r / static_cast<double>(d);
  return rep;
}

double r2(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size()) throw ConfigError("r2: size mismatch");
  if (truth.size() < 2) throw ConfigError("r2: need at least 2 samples");
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
    ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
  }
  if (!(ss_tot > 0.0)) throw ConfigError("r2: truth is constant, R^2 undefined");
  return 1.0 - ss_res / ss_tot;
}

const RegretCurve& RegretSummary::curve(const std::string& algorithm) const {
  for (const auto& c : curves)
    if (c.algorithm == algorithm) return c;
  throw ConfigError("no regret curve for algorithm '" + algorithm + "'");
}

RegretSummary aggregate_regret(const std::vector<BanditTrace>& traces) {
  if (traces.empty()) throw ConfigError("aggregate_regret: no traces");
  RegretSummary summary;
  summary.horizon = static_cast<int>(traces.front().steps.size());
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<const BanditTrace*>> groups;
  for (const auto& tr : traces) {
    if (static_cast<int>(tr.steps.size()) != summary.horizon) throw ConfigError("aggregate_regret: mismatched horizons");
    auto [it, inserted] = index.emplace(tr.algorithm, groups.size());
    if (inserted) {
      groups.emplace_back();
      RegretCurve c;
      c.algorithm = tr.algorithm;
      summary.curves.push_back(std::move(c));
    }
    groups[it->second].push_back(&tr);
  }
  const auto T = static_cast<std::size_t>(summary.horizon);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& c = summary.curves[g];
    const auto& members = groups[g];
    const auto n = static_cast<double>(members.size());
    c.instances = static_cast<int>(members.size());
    c.simple_mean.assign(T, 0.0);
    c.simple_se.assign(T, 0.0);
    c.cumulative_mean.assign(T, 0.0);
    c.cumulative_se.assign(T, 0.0);
    c.optimal_rate.assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      double s1 = 0.0, c1 = 0.0, opt = 0.0;
      for (const auto* tr : members) {
        s1 += tr->steps[t].instant_regret;
        c1 += tr->steps[t].cumulative_regret;
        opt += tr->steps[t].optimal ? 1.0 : 0.0;
      }
      const double sm = s1 / n, cm = c1 / n;
      double sv = 0.0, cv = 0.0;
      for (const auto* tr : members) {
        sv += (tr->steps[t].instant_regret - sm) * (tr->steps[t].instant_regret - sm);
        cv += (tr->steps[t].cumulative_regret - cm) * (tr->steps[t].cumulative_regret - cm);
      }
      c.simple_mean[t] = sm;
      c.cumulative_mean[t] = cm;
      c.optimal_rate[t] = opt / n;
      if (members.size() > 1) {
        c.simple_se[t] = std::sqrt(sv / (n - 1.0) / n);
        c.cumulative_se[t] = std::sqrt(cv / (n - 1.0) / n);
      }
    }
  }
  return summary;
}

void write_regret_summary(const std::filesystem::path& path, const RegretSummary& summary) {
  csv::Writer w(path, {"t", "algorithm", "simple_mean", "simple_se", "cum_mean", "cum_se"});
  for (const auto& c : summary.curves)
    for (std::size_t t = 0; t < c.simple_mean.size(); ++t) {
      w.cell(static_cast<int>(t + 1)).cell(c.algorithm).cell(c.simple_mean[t]).cell(c.simple_se[t]);
      w.cell(c.cumulative_mean[t]).cell(c.cumulative_se[t]);
      w.end_row();
    }
  w.close();
}

RegretSummary read_regret_summary(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const auto ct = table.column("t"), ca = table.column("algorithm"), csm = table.column("simple_mean"),
             css = table.column("simple_se"), ccm = table.column("cum_mean"), ccs = table.column("cum_se");
  RegretSummary s;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& name = table.rows[r][ca];
    auto [it, inserted] = index.emplace(name, s.curves.size());
    if (inserted) {
      RegretCurve fresh;
      fresh.algorithm = name;
      s.curves.push_back(std::move(fresh));
    }
    auto& c = s.curves[it->second];
    if (table.integer(r, ct) != static_cast<long long>(c.simple_mean.size() + 1))
      throw IoError(table.source + ": rows of '" + name + "' are not consecutive in t");
    c.simple_mean.push_back(table.number(r, csm));
    c.simple_se.push_back(table.number(r, css));
    c.cumulative_mean.push_back(table.number(r, ccm));
    c.cumulative_se.push_back(table.number(r, ccs));
  }
  if (s.curves.empty()) throw IoError(table.source + ": no rows");
  s.horizon = static_cast<int>(s.curves.front().simple_mean.size());
  for (const auto& c : s.curves)
    if (static_cast<int>(c.simple_mean.size()) != s.horizon) throw IoError(table.source + ": algorithms disagree on horizon");
  return s;
}

BoundValue greedy1_regret_bound(const BoundParams& p) {
  if (!(p.min_gap > 0.0) || !(p.min_gap <= p.max_gap)) throw ConfigError("bound: need 0 < min_gap <= max_gap");
  if (p.arms < 2) throw ConfigError("bound: need at least 2 arms");
  if (!(p.sigma >= 0.0)) throw ConfigError("bound: sigma must be >= 0");
  if (p.sigma == 0.0) return {0.0, true};
  const double denom = std::expm1(p.min_gap * p.min_gap / (4.0 * p.sigma * p.sigma));
  return {2.0 * p.arms * p.max_gap / denom, false};
}

}  // namespace ilb
