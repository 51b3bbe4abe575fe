#include "ilb/lvm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "ilb/errors.hpp"

namespace ilb {

namespace {

void check_options(const ObservationalDataset& data, const TrainingOptions& o) {
  if (o.epochs < 1) throw ConfigError("training.epochs must be >= 1");
  if (!(o.stage1_fraction >= 0.0 && o.stage1_fraction <= 1.0)) throw ConfigError("training.stage1_fraction must lie in [0, 1]");
  if (o.batch_size < 1) throw ConfigError("training.batch must be >= 1");
  if (!(o.holdout_fraction >= 0.0 && o.holdout_fraction < 1.0)) throw ConfigError("training.holdout_fraction must lie in [0, 1)");
  if (o.patience < 1) throw ConfigError("training.patience must be >= 1");
  if (o.hidden_layers < 0) throw ConfigError("training.hidden_layers must be >= 0");
  if (o.hidden_layers > 0 && o.pieces < 2) throw ConfigError("training.pieces must be >= 2");
  if (data.rows() == 0) throw ConfigError("empty dataset");
  if (data.patients < data.dim()) throw ConfigError("need at least d patients to train the LVM");
}

void split_rows(const ObservationalDataset& data, double holdout_fraction, std::vector<std::size_t>& train,
                std::vector<std::size_t>& holdout) {
  int held = static_cast<int>(std::ceil(holdout_fraction * data.steps));
  if (held >= data.steps) held = data.steps - 1;
  for (int q = 0; q < data.patients; ++q)
    for (int t = 0; t < data.steps; ++t) {
      const auto row = static_cast<std::size_t>(q) * static_cast<std::size_t>(data.steps) + static_cast<std::size_t>(t);
      (t >= data.steps - held ? holdout : train).push_back(row);
    }
}

ParamBlocks head_blocks(LvmModel& m) { return {as_span(m.head_weight), as_span(m.head_bias)}; }
ConstParamBlocks head_blocks(const LvmModel& m) { return {as_span(m.head_weight), as_span(m.head_bias)}; }

ParamBlocks all_blocks(LvmModel& m) {
  ParamBlocks b = m.extractor.parameter_blocks();
  b.push_back(as_span(m.head_weight));
  b.push_back(as_span(m.head_bias));
  return b;
}

ConstParamBlocks all_blocks(const LvmModel& m) {
  ConstParamBlocks b = m.extractor.parameter_blocks();
  b.push_back(as_span(m.head_weight));
  b.push_back(as_span(m.head_bias));
  return b;
}

struct Whitening {
  DenseMatrix transform;  // x' = transform * (x - mean)
  Vector mean;
};

Whitening whitening(const DenseMatrix& x) {
  Whitening w;
  w.mean = x.colwise().mean().transpose();
  const DenseMatrix centered = x.rowwise() - w.mean.transpose();
  const DenseMatrix cov = centered.transpose() * centered / static_cast<double>(std::max<Eigen::Index>(x.rows() - 1, 1));
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(cov);
  const double floor = std::max(eig.eigenvalues().maxCoeff(), 1e-300) * 1e-12;
  const Vector scale = eig.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  w.transform = eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
  return w;
}

double sample_loss(const Vector& logits, int label) { return log_sum_exp(logits) - logits(label); }

}  // namespace

ClassificationScore score_classifier(const LvmModel& model, const ObservationalDataset& data,
                                     const std::vector<std::size_t>& rows) {
  ClassificationScore s;
  if (rows.empty()) {
    s.cross_entropy = std::numeric_limits<double>::quiet_NaN();
    s.accuracy = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  std::size_t correct = 0;
  for (auto r : rows) {
    const auto out = classify(model, data.observation(r));
    s.cross_entropy += sample_loss(out.logits, data.label[r]);
    Eigen::Index best = 0;
    out.logits.maxCoeff(&best);
    if (best == data.label[r]) ++correct;
  }
  s.cross_entropy /= static_cast<double>(rows.size());
  s.accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
  return s;
}

ClassificationScore score_classifier(const LvmModel& model, const ObservationalDataset& data) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return score_classifier(model, data, rows);
}

ObservationalDataset shuffle_labels(const ObservationalDataset& data, std::uint64_t seed) {
  ObservationalDataset out = data;
  Rng rng = make_rng(seed, "label.shuffle");
  std::shuffle(out.label.begin(), out.label.end(), rng);
  return out;
}

TrainingResult train_contrastive(const ObservationalDataset& raw, const TrainingOptions& options,
                                 std::uint64_t seed) {
  check_options(raw, options);
  std::optional<Whitening> white;
  std::optional<ObservationalDataset> whitened;
  if (options.whiten_inputs && raw.rows() > 1) {
    white = whitening(raw.x);
    whitened = raw;
    whitened->x = (raw.x.rowwise() - white->mean.transpose()) * white->transform.transpose();
  }
  const ObservationalDataset& data = whitened ? *whitened : raw;
  const auto d = data.dim();
  const auto Q = static_cast<Eigen::Index>(data.patients);
  const Eigen::Index width = options.hidden_width > 0 ? options.hidden_width : d;

  Rng init_rng = make_rng(seed, "training.init");
  Rng shuffle_rng = make_rng(seed, "training.shuffle");

  LvmModel model{MaxoutNet::random(d, width, options.hidden_layers, options.pieces, d, init_rng),
                 DenseMatrix::Zero(Q, d), Vector::Zero(Q), TrainingMetadata{}};
  model.metadata.seed = seed;

  std::vector<std::size_t> train_rows, holdout_rows;
  split_rows(data, options.holdout_fraction, train_rows, holdout_rows);

  const int total = options.epochs;
  const int stage1_epochs = static_cast<int>(std::lround(options.stage1_fraction * total));

  std::vector<EpochLog> log;
  double last_finite = std::numeric_limits<double>::quiet_NaN();

  SgdMomentumState head_state(options.sgd, head_blocks(std::as_const(model)));
  SgdMomentumState full_state(options.sgd, all_blocks(std::as_const(model)));

  std::optional<LvmModel> best;
  double best_holdout = std::numeric_limits<double>::infinity();
  int since_best = 0;

  const std::size_t batch = static_cast<std::size_t>(options.batch_size);
  std::vector<MaxoutNet::Cache> caches(batch);
  DenseMatrix features;  // frozen features for stage 1, rows aligned with data rows

  for (int epoch = 0; epoch < total; ++epoch) {
    const int stage = epoch < stage1_epochs ? 1 : 2;
    auto& state = stage == 1 ? head_state : full_state;
    state.set_epoch(epoch, total);

    if (stage == 1 && features.rows() == 0) {
      features.resize(static_cast<Eigen::Index>(data.rows()), d);
      for (std::size_t r = 0; r < data.rows(); ++r)
        features.row(static_cast<Eigen::Index>(r)) = model.extractor.forward(data.observation(r)).transpose();
    }

    std::shuffle(train_rows.begin(), train_rows.end(), shuffle_rng);
    double epoch_loss = 0.0;

    for (std::size_t start = 0; start < train_rows.size(); start += batch) {
      const std::size_t end = std::min(train_rows.size(), start + batch);
      const double inv_n = 1.0 / static_cast<double>(end - start);
      DenseMatrix g_w = DenseMatrix::Zero(Q, d);
      Vector g_b = Vector::Zero(Q);
      GradientTape ext_tape;
      if (stage == 2) ext_tape = GradientTape::shaped_like(std::as_const(model.extractor).parameter_blocks(), d);
      double batch_loss = 0.0;

      for (std::size_t i = start; i < end; ++i) {
        const auto row = train_rows[i];
        const int label = data.label[row];
        Vector h;
        auto& cache = caches[i - start];
        if (stage == 1) {
          h = features.row(static_cast<Eigen::Index>(row)).transpose();
        } else {
          h = model.extractor.forward(data.observation(row), cache);
        }
        const Vector logits = model.head_weight * h + model.head_bias;
        batch_loss += sample_loss(logits, label);
        Vector dlogits = softmax(logits);
        dlogits(label) -= 1.0;
        g_w.noalias() += dlogits * h.transpose();
        g_b += dlogits;
        if (stage == 2) ext_tape.add(model.extractor.backward(cache, model.head_weight.transpose() * dlogits));
      }

      if (!std::isfinite(batch_loss))
        throw TrainingError("contrastive training diverged (non-finite loss) at epoch " + std::to_string(epoch) +
                                ", stage " + std::to_string(stage),
                            epoch, stage, last_finite);
      epoch_loss += batch_loss;

      GradientTape tape;
      if (stage == 1) {
        tape.blocks = {Eigen::Map<Vector>(g_w.data(), g_w.size()) * inv_n, g_b * inv_n};
        sgd_step(head_blocks(model), tape, state);
      } else {
        tape.blocks = std::move(ext_tape.blocks);
        for (auto& b : tape.blocks) b *= inv_n;
        tape.blocks.push_back(Eigen::Map<Vector>(g_w.data(), g_w.size()) * inv_n);
        tape.blocks.push_back(g_b * inv_n);
        sgd_step(all_blocks(model), tape, state);
      }
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.stage = stage;
    entry.learning_rate = state.learning_rate();
    entry.train_loss = epoch_loss / static_cast<double>(train_rows.size());
    const auto held = score_classifier(model, data, holdout_rows);
    entry.holdout_loss = held.cross_entropy;
    entry.holdout_accuracy = held.accuracy;
    if (!std::isfinite(entry.train_loss))
      throw TrainingError("contrastive training diverged at epoch " + std::to_string(epoch), epoch, stage, last_finite);
    last_finite = entry.train_loss;
    log.push_back(entry);

    if (options.early_stop && stage == 2 && !holdout_rows.empty()) {
      if (held.cross_entropy < best_holdout) {
        best_holdout = held.cross_entropy;
        best = model;
        since_best = 0;
      } else if (++since_best >= options.patience) {
        break;
      }
    }
  }

  if (best) model = std::move(*best);
  if (white) model.extractor.precompose_input(white->transform, -(white->transform * white->mean));

  if (options.center_features) {
    Vector mean = Vector::Zero(d);
    for (std::size_t r = 0; r < raw.rows(); ++r) mean += model.extractor.forward(raw.observation(r));
    mean /= static_cast<double>(raw.rows());
    model.extractor.shift_output(-mean);
    model.head_bias += model.head_weight * mean;
  }

  model.metadata.epochs = static_cast<int>(log.size());
  model.metadata.final_loss = last_finite;
  return TrainingResult{std::move(model), std::move(log)};
}

}  // namespace ilb
