#ifndef VTON_PREDICTOR_HPP
#define VTON_PREDICTOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vton/landmarks.hpp"

namespace vton {

/// Outer product C(i,j) = f_a(i) * f_b(j). Throws on length mismatch.
Eigen::MatrixXd correlation_map(const Eigen::VectorXd& f_a, const Eigen::VectorXd& f_b);

struct DenseLayer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd biases;   // out
};

/// Fully-connected landmark regressor. Hidden layers use tanh, the output
/// layer sigmoid, so every predicted coordinate lies strictly in (0,1).
struct PredictorModel {
    std::vector<DenseLayer> layers;

    std::vector<int> dims() const;
    std::size_t parameter_count() const;
};

/// Canonical architecture: the 18x18 correlation of the flattened model and
/// person poses (324 values) concatenated with the 12 flattened garment
/// coordinates feeds 6 hidden layers of 900/800/600/500/250/100 units and a
/// 12-unit output.
inline const std::vector<int> kPredictorDims = {336, 900, 800, 600, 500, 250, 100, 12};

/// Uniform init in +-sqrt(6 / (fan_in + fan_out)), zero biases, seeded.
PredictorModel make_predictor(const std::vector<int>& dims, std::uint64_t seed);

/// Network input: flatten(correlation_map(flatten(model_human),
/// flatten(person_human))) || flatten(model_fashion). All landmarks must be
/// normalized and visible (invisible input landmarks are an error).
Eigen::VectorXd assemble_input(const std::vector<Landmark>& model_human,
                               const std::vector<Landmark>& person_human,
                               const std::vector<Landmark>& model_fashion);

/// Batched forward pass; each column of x is one input vector.
Eigen::MatrixXd forward_raw(const PredictorModel& m, const Eigen::MatrixXd& x);

/// Predicts the 6 garment landmarks on the target pose.
std::vector<Landmark> forward(const PredictorModel& m,
                              const std::vector<Landmark>& model_human,
                              const std::vector<Landmark>& person_human,
                              const std::vector<Landmark>& model_fashion);

/// Sum of squared coordinate differences.
double loss_l2(const std::vector<Landmark>& pred, const std::vector<Landmark>& gt);

struct Gradients {
    std::vector<Eigen::MatrixXd> d_weights;
    std::vector<Eigen::VectorXd> d_biases;
};

/// Mean per-sample L2 loss over the batch columns of (x, y).
double batch_loss(const PredictorModel& m, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Exact reverse-mode gradients of batch_loss with respect to every weight
/// and bias (inputs are treated as constants).
Gradients gradients(const PredictorModel& m, const Eigen::MatrixXd& x,
                    const Eigen::MatrixXd& y);

struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<Eigen::MatrixXd> m_weights, v_weights;
    std::vector<Eigen::VectorXd> m_biases, v_biases;
};

AdamState make_adam_state(const PredictorModel& m, double lr = 0.001);

/// Standard bias-corrected Adam update, applied in place.
void adam_step(PredictorModel& m, const Gradients& g, AdamState& s);

/// One training pair: poses of the same garment seen on two bodies. The
/// garment landmarks observed on the second pose are the regression target.
struct PosePairSample {
    std::vector<Landmark> model_human;    // 9, normalized, visible
    std::vector<Landmark> person_human;   // 9
    std::vector<Landmark> model_fashion;  // 6
    std::vector<Landmark> target_fashion; // 6, ground truth
};

struct TrainConfig {
    int epochs = 316;
    int batch_size = 64;
    double lr = 0.001;
    std::uint64_t seed = 0;
    std::vector<int> dims = kPredictorDims;
    double stop_loss = 0.0;  // > 0: stop once an epoch's mean loss drops below
};

struct TrainResult {
    PredictorModel model;
    std::vector<double> epoch_losses;  // dataset mean L2 loss per epoch
};

/// Seeded minibatch Adam on the mean L2 loss; bit-reproducible for a fixed
/// seed. Throws on an empty dataset or invisible landmarks.
TrainResult train(const std::vector<PosePairSample>& dataset, const TrainConfig& cfg);

/// Versioned JSON model file:
/// {"version": 1, "dims": [...], "layers": [{"w": [row-major], "b": [...]}]}.
/// Loading validates the version and that every layer matches the dims.
std::string serialize_model(const PredictorModel& m);
PredictorModel parse_model(const std::string& bytes);
void save_model(const PredictorModel& m, const std::string& path);
PredictorModel load_model(const std::string& path);

} // namespace vton

#endif
