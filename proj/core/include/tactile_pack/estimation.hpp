#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tactile_pack/geometry.hpp"
#include "tactile_pack/tactile.hpp"

namespace tactile_pack {

// Error-direction taxonomy and the estimators that feed the correction
// controller: a ground-truth oracle, a confusion-structured noisy surrogate,
// and a linear model fitted on synthetic imprints.

struct ClassifierThresholds {
  double t_x = 2.5;      // mm, translation dead zone
  double t_theta = 5.0;  // deg, rotation dead zone

  void validate() const;
};

// Canonical direction classes. The integer values are stable and appear in
// datasets and episode logs.
enum class DirectionClass : int {
  kNoError = 0,
  kNegX = 1,
  kPosX = 2,
  kNegXPosTheta = 3,
  kNegXNegTheta = 4,
  kPosXPosTheta = 5,
  kPosXNegTheta = 6,
  kNegTheta = 7,
  kPosTheta = 8,
};

inline constexpr int kDirectionClassCount = 9;

struct SignPair {
  int sx = 0;      // -1, 0, +1
  int stheta = 0;  // -1, 0, +1
};

struct ErrorEstimate {
  double dx_e = 0.0;      // mm
  double dtheta_e = 0.0;  // deg
  std::optional<std::array<double, kDirectionClassCount>> class_probs;
};

// Accuracy and magnitude-noise description of the emulated direction network.
// Misclassifications draw uniformly from the classes that share at least one
// error sign with the truth and never flip a nonzero sign.
struct NoiseModel {
  double direction_accuracy = 0.744;
  double magnitude_half_width_x = 1.9;      // mm, uniform additive noise
  double magnitude_half_width_theta = 1.9;  // deg

  void validate() const;
};

DirectionClass classify_direction_truth(const ErrorState& error,
                                        const ClassifierThresholds& thresholds);
SignPair class_to_signs(DirectionClass cls);
DirectionClass signs_to_class(const SignPair& signs);

// Classes a noisy draw may land on when the truth is `truth` (truth excluded).
std::vector<DirectionClass> admissible_confusions(DirectionClass truth);

// Perfect direction + magnitude readout of the true error.
std::pair<DirectionClass, ErrorEstimate> oracle_estimate(const ErrorState& error,
                                                         const ClassifierThresholds& thresholds);

// Draws the direction class with the configured accuracy and perturbs the
// magnitudes with uniform noise.
std::pair<DirectionClass, ErrorEstimate> noisy_estimate(const ErrorState& error,
                                                        const NoiseModel& model,
                                                        const ClassifierThresholds& thresholds,
                                                        uint64_t rng_seed);

// Summary statistics of a tactile sequence, one fixed-length vector.
// Layout (documented in detail in feature_convention()):
//   for each frame k = 1..8, for each sensor (A then B):
//     mean shear_x, mean shear_z, mean |shear|, mean pressure,
//     signed peak pressure, pressure sum,
//     pressure sum * sign(mean shear_x)   [side-corrected pressure]
//   then per sensor: the same 7 statistics summed over all 8 frames.
// All components are positively homogeneous of degree 1 in the field values.
std::vector<double> extract_features(const TactileSequence& seq);

int feature_dimension(const SensorLayout& layout);
std::string feature_convention();

struct TrainingSample {
  std::vector<double> features;
  DirectionClass label = DirectionClass::kNoError;
  double dx = 0.0;
  double dtheta = 0.0;
};

// 9-way linear scorer (softmax for probabilities) plus a 2-row linear
// magnitude regressor, both over the same feature vector.
struct LinearEstimator {
  int feature_dim = 0;
  // Row-major [kDirectionClassCount x feature_dim] weights and per-class bias.
  std::vector<double> class_weights;
  std::array<double, kDirectionClassCount> class_bias = {};
  // Row-major [2 x feature_dim] weights and bias; row 0 -> dx, row 1 -> dtheta.
  std::vector<double> magnitude_weights;
  std::array<double, 2> magnitude_bias = {};
};

// Multinomial logistic regression for the direction head (full-batch descent
// in a whitened feature basis, fixed step and iteration count) and ridge
// least squares in closed form for the magnitude head, both on standardised
// features with the standardisation folded back into the stored weights.
// reg_lambda is the L2 strength for both heads. Deterministic for a fixed
// sample order. Throws std::runtime_error on an empty dataset or a
// non-finite solve.
LinearEstimator fit_linear_estimator(const std::vector<TrainingSample>& samples,
                                     double reg_lambda);

std::pair<DirectionClass, ErrorEstimate> predict(const LinearEstimator& estimator,
                                                 const std::vector<double>& features);

void save_estimator(const LinearEstimator& estimator, const std::string& path);
LinearEstimator load_estimator(const std::string& path);

}  // namespace tactile_pack
