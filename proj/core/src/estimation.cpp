#include "tactile_pack/estimation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tactile_pack/rng.hpp"

namespace tactile_pack {

void ClassifierThresholds::validate() const {
  if (!(t_x > 0.0)) throw std::invalid_argument("t_x must be positive");
  if (!(t_theta > 0.0)) throw std::invalid_argument("t_theta must be positive");
}

void NoiseModel::validate() const {
  if (direction_accuracy < 0.0 || direction_accuracy > 1.0) {
    throw std::invalid_argument("direction_accuracy must be in [0, 1]");
  }
  if (magnitude_half_width_x < 0.0 || magnitude_half_width_theta < 0.0) {
    throw std::invalid_argument("magnitude noise half-widths must be non-negative");
  }
}

DirectionClass classify_direction_truth(const ErrorState& error,
                                        const ClassifierThresholds& thresholds) {
  thresholds.validate();
  SignPair signs;
  if (std::abs(error.dx) > thresholds.t_x) signs.sx = error.dx > 0.0 ? +1 : -1;
  if (std::abs(error.dtheta) > thresholds.t_theta) signs.stheta = error.dtheta > 0.0 ? +1 : -1;
  return signs_to_class(signs);
}

SignPair class_to_signs(DirectionClass cls) {
  switch (cls) {
    case DirectionClass::kNoError: return {0, 0};
    case DirectionClass::kNegX: return {-1, 0};
    case DirectionClass::kPosX: return {+1, 0};
    case DirectionClass::kNegXPosTheta: return {-1, +1};
    case DirectionClass::kNegXNegTheta: return {-1, -1};
    case DirectionClass::kPosXPosTheta: return {+1, +1};
    case DirectionClass::kPosXNegTheta: return {+1, -1};
    case DirectionClass::kNegTheta: return {0, -1};
    case DirectionClass::kPosTheta: return {0, +1};
  }
  throw std::invalid_argument("unknown direction class");
}

DirectionClass signs_to_class(const SignPair& signs) {
  if (signs.sx < -1 || signs.sx > 1 || signs.stheta < -1 || signs.stheta > 1) {
    throw std::invalid_argument("sign components must be -1, 0, or +1");
  }
  if (signs.sx == 0 && signs.stheta == 0) return DirectionClass::kNoError;
  if (signs.sx < 0 && signs.stheta == 0) return DirectionClass::kNegX;
  if (signs.sx > 0 && signs.stheta == 0) return DirectionClass::kPosX;
  if (signs.sx < 0 && signs.stheta > 0) return DirectionClass::kNegXPosTheta;
  if (signs.sx < 0 && signs.stheta < 0) return DirectionClass::kNegXNegTheta;
  if (signs.sx > 0 && signs.stheta > 0) return DirectionClass::kPosXPosTheta;
  if (signs.sx > 0 && signs.stheta < 0) return DirectionClass::kPosXNegTheta;
  if (signs.stheta < 0) return DirectionClass::kNegTheta;
  return DirectionClass::kPosTheta;
}

std::vector<DirectionClass> admissible_confusions(DirectionClass truth) {
  const SignPair t = class_to_signs(truth);
  std::vector<DirectionClass> out;
  for (int c = 0; c < kDirectionClassCount; ++c) {
    const auto cls = static_cast<DirectionClass>(c);
    if (cls == truth) continue;
    const SignPair s = class_to_signs(cls);
    const bool shares = s.sx == t.sx || s.stheta == t.stheta;
    const bool flips_x = t.sx != 0 && s.sx == -t.sx;
    const bool flips_theta = t.stheta != 0 && s.stheta == -t.stheta;
    if (shares && !flips_x && !flips_theta) out.push_back(cls);
  }
  return out;
}

std::pair<DirectionClass, ErrorEstimate> oracle_estimate(const ErrorState& error,
                                                         const ClassifierThresholds& thresholds) {
  ErrorEstimate est;
  est.dx_e = error.dx;
  est.dtheta_e = error.dtheta;
  return {classify_direction_truth(error, thresholds), est};
}

std::pair<DirectionClass, ErrorEstimate> noisy_estimate(const ErrorState& error,
                                                        const NoiseModel& model,
                                                        const ClassifierThresholds& thresholds,
                                                        uint64_t rng_seed) {
  model.validate();
  const DirectionClass truth = classify_direction_truth(error, thresholds);
  Rng rng(mix_seed(rng_seed, 0x1c0ffee1ULL));

  DirectionClass drawn = truth;
  if (rng.uniform01() >= model.direction_accuracy) {
    const auto neighbours = admissible_confusions(truth);
    if (!neighbours.empty()) {
      drawn = neighbours[rng.uniform_index(neighbours.size())];
    }
  }

  ErrorEstimate est;
  est.dx_e = error.dx + rng.uniform(-model.magnitude_half_width_x, model.magnitude_half_width_x);
  est.dtheta_e = error.dtheta +
                 rng.uniform(-model.magnitude_half_width_theta, model.magnitude_half_width_theta);
  return {drawn, est};
}

namespace {

inline constexpr int kStatsPerSensorFrame = 7;

void field_stats(const MarkerField& f, double* out) {
  const size_t n = f.shear_x.size();
  double sum_sx = 0.0;
  double sum_sz = 0.0;
  double sum_abs = 0.0;
  double sum_p = 0.0;
  double peak_p = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sum_sx += f.shear_x[i];
    sum_sz += f.shear_z[i];
    sum_abs += std::hypot(f.shear_x[i], f.shear_z[i]);
    sum_p += f.pressure[i];
    if (std::abs(f.pressure[i]) > std::abs(peak_p)) peak_p = f.pressure[i];
  }
  const double inv = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  const double mean_sx = sum_sx * inv;
  out[0] = mean_sx;
  out[1] = sum_sz * inv;
  out[2] = sum_abs * inv;
  out[3] = sum_p * inv;
  out[4] = peak_p;
  out[5] = sum_p;
  // Side-corrected pressure: the pad pressure sign depends on which edge the
  // object rests on; multiplying by the shear-x sign removes that dependency
  // and leaves a channel whose sign follows the rotation error alone.
  const double side = mean_sx > 0.0 ? 1.0 : (mean_sx < 0.0 ? -1.0 : 0.0);
  out[6] = side * sum_p;
}

}  // namespace

int feature_dimension(const SensorLayout& layout) {
  (void)layout;
  return kStatsPerSensorFrame * 2 * (kTactileFrames + 1);
}

std::string feature_convention() {
  return "per frame (1..8) per sensor (A,B): mean_shear_x, mean_shear_z, mean_abs_shear, "
         "mean_pressure, peak_pressure, pressure_sum, side_corrected_pressure_sum; "
         "then per sensor the 7 statistics summed over all frames";
}

std::vector<double> extract_features(const TactileSequence& seq) {
  std::vector<double> features(kStatsPerSensorFrame * 2 * (kTactileFrames + 1), 0.0);
  double* out = features.data();
  for (int k = 0; k < kTactileFrames; ++k) {
    field_stats(seq.frames[k].a, out);
    out += kStatsPerSensorFrame;
    field_stats(seq.frames[k].b, out);
    out += kStatsPerSensorFrame;
  }
  // Cumulative block: totals over the 8 difference frames.
  double* const cum_a = out;
  double* const cum_b = out + kStatsPerSensorFrame;
  for (int k = 0; k < kTactileFrames; ++k) {
    const double* frame = features.data() + k * 2 * kStatsPerSensorFrame;
    for (int j = 0; j < kStatsPerSensorFrame; ++j) {
      cum_a[j] += frame[j];
      cum_b[j] += frame[kStatsPerSensorFrame + j];
    }
  }
  return features;
}

namespace {

std::array<double, kDirectionClassCount> softmax(
    const std::array<double, kDirectionClassCount>& scores) {
  double hi = scores[0];
  for (double s : scores) hi = std::max(hi, s);
  std::array<double, kDirectionClassCount> probs{};
  double total = 0.0;
  for (int c = 0; c < kDirectionClassCount; ++c) {
    probs[c] = std::exp(scores[c] - hi);
    total += probs[c];
  }
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace

LinearEstimator fit_linear_estimator(const std::vector<TrainingSample>& samples,
                                     double reg_lambda) {
  if (samples.empty()) throw std::runtime_error("fit requires a non-empty dataset");
  if (reg_lambda < 0.0) throw std::invalid_argument("reg_lambda must be non-negative");
  const int dim = static_cast<int>(samples[0].features.size());
  if (dim <= 0) throw std::runtime_error("fit requires non-empty feature vectors");
  const auto n = static_cast<Eigen::Index>(samples.size());
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<int>(samples[i].features.size()) != dim) {
      throw std::runtime_error("inconsistent feature dimensions in dataset");
    }
    for (int j = 0; j < dim; ++j) x(i, j) = samples[i].features[j];
  }

  // Standardise columns; constant columns are left centred with unit scale.
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::RowVectorXd scale(dim);
  for (int j = 0; j < dim; ++j) {
    const double var = (x.col(j).array() - mean(j)).square().sum() * inv_n;
    scale(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  Eigen::MatrixXd z = (x.rowwise() - mean).array().rowwise() / scale.array();
  const Eigen::MatrixXd gram = (z.transpose() * z) * inv_n;
  if (!gram.allFinite()) throw std::runtime_error("fit produced a non-finite feature matrix");

  // Magnitude head: ridge least squares in closed form.
  Eigen::MatrixXd mag_targets(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    mag_targets(i, 0) = samples[i].dx;
    mag_targets(i, 1) = samples[i].dtheta;
  }
  Eigen::MatrixXd mag_gram = gram;
  mag_gram.diagonal().array() += reg_lambda + 1e-12;
  const Eigen::MatrixXd mag_w =
      Eigen::LDLT<Eigen::MatrixXd>(mag_gram).solve(z.transpose() * mag_targets * inv_n);
  if (!mag_w.allFinite()) throw std::runtime_error("fit produced non-finite magnitude weights");

  // Direction head: multinomial logistic regression by full-batch descent.
  // The standardised features are nearly collinear, so the descent runs in a
  // whitened basis of the feature covariance, where the logistic Hessian is
  // close to a scaled identity and a fixed step converges quickly. Everything
  // is order-deterministic: zero init, fixed step, fixed iteration count.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("feature covariance decomposition failed");
  const double eig_floor = std::max(eig.eigenvalues().maxCoeff(), 1.0) * 1e-12;
  int rank = 0;
  for (int j = 0; j < dim; ++j) {
    if (eig.eigenvalues()(j) > eig_floor) ++rank;
  }
  if (rank == 0) throw std::runtime_error("feature matrix is degenerate (zero covariance)");
  Eigen::MatrixXd whiten(dim, rank);
  int col = 0;
  for (int j = 0; j < dim; ++j) {
    if (eig.eigenvalues()(j) <= eig_floor) continue;
    whiten.col(col++) = eig.eigenvectors().col(j) / std::sqrt(eig.eigenvalues()(j));
  }
  const Eigen::MatrixXd q = z * whiten;  // n x rank, unit covariance

  Eigen::MatrixXd onehot(n, kDirectionClassCount);
  onehot.setZero();
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, static_cast<int>(samples[i].label)) = 1.0;

  constexpr int kLogisticIters = 400;
  constexpr double kStep = 2.0;
  constexpr double kMomentum = 0.9;
  Eigen::MatrixXd w_q = Eigen::MatrixXd::Zero(rank, kDirectionClassCount);
  Eigen::RowVectorXd b_q = Eigen::RowVectorXd::Zero(kDirectionClassCount);
  Eigen::MatrixXd vel_w = Eigen::MatrixXd::Zero(rank, kDirectionClassCount);
  Eigen::RowVectorXd vel_b = Eigen::RowVectorXd::Zero(kDirectionClassCount);
  Eigen::MatrixXd probs(n, kDirectionClassCount);
  for (int iter = 0; iter < kLogisticIters; ++iter) {
    probs = (q * w_q).rowwise() + b_q;
    const Eigen::VectorXd row_max = probs.rowwise().maxCoeff();
    probs.colwise() -= row_max;
    probs = probs.array().exp();
    const Eigen::VectorXd row_sum = probs.rowwise().sum();
    probs.array().colwise() /= row_sum.array();
    const Eigen::MatrixXd residual = (probs - onehot) * inv_n;
    const Eigen::MatrixXd grad_w = q.transpose() * residual + reg_lambda * w_q;
    const Eigen::RowVectorXd grad_b = residual.colwise().sum();
    vel_w = kMomentum * vel_w - kStep * grad_w;
    vel_b = kMomentum * vel_b - kStep * grad_b;
    w_q += vel_w;
    b_q += vel_b;
  }
  const Eigen::MatrixXd cls_w = whiten * w_q;  // back to standardised coordinates
  if (!cls_w.allFinite() || !b_q.allFinite()) {
    throw std::runtime_error("fit produced non-finite class weights");
  }

  // Fold the standardisation back so prediction is a plain affine map.
  LinearEstimator est;
  est.feature_dim = dim;
  est.class_weights.resize(static_cast<size_t>(kDirectionClassCount) * dim);
  est.magnitude_weights.resize(2 * static_cast<size_t>(dim));
  for (int c = 0; c < kDirectionClassCount; ++c) {
    double bias = b_q(c);
    for (int j = 0; j < dim; ++j) {
      const double wj = cls_w(j, c) / scale(j);
      bias -= wj * mean(j);
      est.class_weights[static_cast<size_t>(c) * dim + j] = wj;
    }
    est.class_bias[c] = bias;
  }
  for (int r = 0; r < 2; ++r) {
    double bias = mag_targets.col(r).mean();
    for (int j = 0; j < dim; ++j) {
      const double wj = mag_w(j, r) / scale(j);
      bias -= wj * mean(j);
      est.magnitude_weights[static_cast<size_t>(r) * dim + j] = wj;
    }
    est.magnitude_bias[r] = bias;
  }
  return est;
}

std::pair<DirectionClass, ErrorEstimate> predict(const LinearEstimator& estimator,
                                                 const std::vector<double>& features) {
  if (static_cast<int>(features.size()) != estimator.feature_dim) {
    throw std::invalid_argument("feature vector length does not match estimator");
  }
  std::array<double, kDirectionClassCount> scores{};
  for (int c = 0; c < kDirectionClassCount; ++c) {
    double s = estimator.class_bias[c];
    const double* row = estimator.class_weights.data() +
                        static_cast<size_t>(c) * estimator.feature_dim;
    for (int j = 0; j < estimator.feature_dim; ++j) s += row[j] * features[j];
    scores[c] = s;
  }
  int best = 0;
  for (int c = 1; c < kDirectionClassCount; ++c) {
    if (scores[c] > scores[best]) best = c;
  }

  ErrorEstimate est;
  for (int r = 0; r < 2; ++r) {
    double v = estimator.magnitude_bias[r];
    const double* row = estimator.magnitude_weights.data() +
                        static_cast<size_t>(r) * estimator.feature_dim;
    for (int j = 0; j < estimator.feature_dim; ++j) v += row[j] * features[j];
    if (r == 0) {
      est.dx_e = v;
    } else {
      est.dtheta_e = v;
    }
  }
  est.class_probs = softmax(scores);
  return {static_cast<DirectionClass>(best), est};
}

namespace {

void write_row(std::ostream& out, const double* row, int dim, double bias) {
  char buf[40];
  for (int j = 0; j < dim; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", row[j]);
    out << buf << ' ';
  }
  std::snprintf(buf, sizeof buf, "%.17g", bias);
  out << buf << '\n';
}

}  // namespace

void save_estimator(const LinearEstimator& estimator, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open weights output: " + path);
  out << "# tactile_pack_weights_v1\n";
  out << "feature_dim = " << estimator.feature_dim << "\n";
  out << "classes = " << kDirectionClassCount << "\n";
  for (int c = 0; c < kDirectionClassCount; ++c) {
    write_row(out, estimator.class_weights.data() +
                       static_cast<size_t>(c) * estimator.feature_dim,
              estimator.feature_dim, estimator.class_bias[c]);
  }
  for (int r = 0; r < 2; ++r) {
    write_row(out, estimator.magnitude_weights.data() +
                       static_cast<size_t>(r) * estimator.feature_dim,
              estimator.feature_dim, estimator.magnitude_bias[r]);
  }
  if (!out) throw std::runtime_error("failed writing weights: " + path);
}

LinearEstimator load_estimator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weights file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# tactile_pack_weights_v1") {
    throw std::runtime_error("unrecognised weights header in " + path);
  }
  LinearEstimator est;
  int classes = 0;
  for (int i = 0; i < 2; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated weights file: " + path);
    std::istringstream ss(line);
    std::string key, eq;
    int value = 0;
    if (!(ss >> key >> eq >> value) || eq != "=") {
      throw std::runtime_error("malformed weights header line: " + line);
    }
    if (key == "feature_dim") {
      est.feature_dim = value;
    } else if (key == "classes") {
      classes = value;
    } else {
      throw std::runtime_error("unexpected weights header key: " + key);
    }
  }
  if (est.feature_dim <= 0) throw std::runtime_error("invalid feature_dim in " + path);
  if (classes != kDirectionClassCount) {
    throw std::runtime_error("weights class count mismatch in " + path);
  }

  est.class_weights.resize(static_cast<size_t>(kDirectionClassCount) * est.feature_dim);
  est.magnitude_weights.resize(2 * static_cast<size_t>(est.feature_dim));
  auto read_row = [&](double* row, double* bias) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated weights file: " + path);
    std::istringstream ss(line);
    for (int j = 0; j < est.feature_dim; ++j) {
      if (!(ss >> row[j])) throw std::runtime_error("malformed weights row in " + path);
    }
    if (!(ss >> *bias)) throw std::runtime_error("malformed weights row in " + path);
  };
  for (int c = 0; c < kDirectionClassCount; ++c) {
    read_row(est.class_weights.data() + static_cast<size_t>(c) * est.feature_dim,
             &est.class_bias[c]);
  }
  for (int r = 0; r < 2; ++r) {
    read_row(est.magnitude_weights.data() + static_cast<size_t>(r) * est.feature_dim,
             &est.magnitude_bias[r]);
  }
  return est;
}

}  // namespace tactile_pack
