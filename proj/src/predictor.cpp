#include "vton/predictor.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vton/rng.hpp"

namespace vton {

Eigen::MatrixXd correlation_map(const Eigen::VectorXd& f_a, const Eigen::VectorXd& f_b) {
    if (f_a.size() != f_b.size())
        throw std::invalid_argument("correlation_map: vector length mismatch");
    return f_a * f_b.transpose();
}

std::vector<int> PredictorModel::dims() const {
    std::vector<int> d;
    if (layers.empty()) return d;
    d.push_back(static_cast<int>(layers.front().weights.cols()));
    for (const auto& l : layers) d.push_back(static_cast<int>(l.weights.rows()));
    return d;
}

std::size_t PredictorModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
}

PredictorModel make_predictor(const std::vector<int>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw std::invalid_argument("make_predictor: need at least 2 dims");
    for (int d : dims)
        if (d <= 0) throw std::invalid_argument("make_predictor: dims must be positive");

    std::mt19937_64 eng(seed);
    PredictorModel m;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        DenseLayer layer;
        const int fan_in = dims[i];
        const int fan_out = dims[i + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        layer.weights.resize(fan_out, fan_in);
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
                layer.weights(r, c) = uniform_in(eng, -bound, bound);
        layer.biases = Eigen::VectorXd::Zero(fan_out);
        m.layers.push_back(std::move(layer));
    }
    return m;
}

namespace {

Eigen::VectorXd flatten(const std::vector<Landmark>& lms, const char* what) {
    Eigen::VectorXd v(2 * lms.size());
    for (std::size_t i = 0; i < lms.size(); ++i) {
        if (!lms[i].visible)
            throw std::invalid_argument(std::string(what) + ": invisible landmark at index " +
                                        std::to_string(i));
        v(2 * i) = lms[i].x;
        v(2 * i + 1) = lms[i].y;
    }
    return v;
}

} // namespace

Eigen::VectorXd assemble_input(const std::vector<Landmark>& model_human,
                               const std::vector<Landmark>& person_human,
                               const std::vector<Landmark>& model_fashion) {
    if (model_human.size() != static_cast<std::size_t>(kHumanLandmarkCount) ||
        person_human.size() != static_cast<std::size_t>(kHumanLandmarkCount))
        throw std::invalid_argument("assemble_input: expected 9 human landmarks per pose");
    if (model_fashion.size() != static_cast<std::size_t>(kFashionLandmarkCount))
        throw std::invalid_argument("assemble_input: expected 6 fashion landmarks");

    const Eigen::VectorXd ma = flatten(model_human, "assemble_input(model_human)");
    const Eigen::VectorXd pa = flatten(person_human, "assemble_input(person_human)");
    const Eigen::VectorXd fa = flatten(model_fashion, "assemble_input(model_fashion)");

    const Eigen::MatrixXd corr = correlation_map(ma, pa);
    Eigen::VectorXd x(corr.size() + fa.size());
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < corr.rows(); ++r)  // row-major flatten
        for (Eigen::Index c = 0; c < corr.cols(); ++c) x(k++) = corr(r, c);
    x.tail(fa.size()) = fa;
    return x;
}

Eigen::MatrixXd forward_raw(const PredictorModel& m, const Eigen::MatrixXd& x) {
    if (m.layers.empty()) throw std::invalid_argument("forward: model has no layers");
    if (x.rows() != m.layers.front().weights.cols())
        throw std::invalid_argument("forward: input dimension mismatch");

    Eigen::MatrixXd a = x;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        Eigen::MatrixXd z = (m.layers[l].weights * a).colwise() + m.layers[l].biases;
        if (l + 1 < m.layers.size()) {
            a = z.array().tanh().matrix();
        } else {
            a = (1.0 / (1.0 + (-z.array()).exp())).matrix();
        }
    }
    return a;
}

std::vector<Landmark> forward(const PredictorModel& m,
                              const std::vector<Landmark>& model_human,
                              const std::vector<Landmark>& person_human,
                              const std::vector<Landmark>& model_fashion) {
    const Eigen::VectorXd x = assemble_input(model_human, person_human, model_fashion);
    if (m.layers.back().weights.rows() != 2 * kFashionLandmarkCount)
        throw std::invalid_argument("forward: model output dimension is not 12");
    const Eigen::MatrixXd y = forward_raw(m, x);
    std::vector<Landmark> out(kFashionLandmarkCount);
    for (int i = 0; i < kFashionLandmarkCount; ++i) {
        out[i] = {y(2 * i, 0), y(2 * i + 1, 0), true};
    }
    return out;
}

double loss_l2(const std::vector<Landmark>& pred, const std::vector<Landmark>& gt) {
    if (pred.size() != gt.size()) throw std::invalid_argument("loss_l2: count mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double dx = pred[i].x - gt[i].x;
        const double dy = pred[i].y - gt[i].y;
        s += dx * dx + dy * dy;
    }
    return s;
}

double batch_loss(const PredictorModel& m, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.cols() != y.cols() || x.cols() == 0)
        throw std::invalid_argument("batch_loss: empty batch or column mismatch");
    const Eigen::MatrixXd pred = forward_raw(m, x);
    return (pred - y).squaredNorm() / static_cast<double>(x.cols());
}

Gradients gradients(const PredictorModel& m, const Eigen::MatrixXd& x,
                    const Eigen::MatrixXd& y) {
    if (x.cols() != y.cols() || x.cols() == 0)
        throw std::invalid_argument("gradients: empty batch or column mismatch");
    if (y.rows() != m.layers.back().weights.rows())
        throw std::invalid_argument("gradients: target dimension mismatch");

    const std::size_t num_layers = m.layers.size();
    std::vector<Eigen::MatrixXd> activations(num_layers + 1);
    activations[0] = x;
    for (std::size_t l = 0; l < num_layers; ++l) {
        Eigen::MatrixXd z =
            (m.layers[l].weights * activations[l]).colwise() + m.layers[l].biases;
        activations[l + 1] = (l + 1 < num_layers)
                                 ? Eigen::MatrixXd(z.array().tanh().matrix())
                                 : Eigen::MatrixXd((1.0 / (1.0 + (-z.array()).exp())).matrix());
    }

    Gradients g;
    g.d_weights.resize(num_layers);
    g.d_biases.resize(num_layers);

    const double inv_batch = 1.0 / static_cast<double>(x.cols());
    const Eigen::MatrixXd& out = activations[num_layers];
    // d(mean L2)/d(output), then through the output sigmoid.
    Eigen::MatrixXd delta =
        (2.0 * inv_batch * (out - y).array() * out.array() * (1.0 - out.array())).matrix();

    for (std::size_t l = num_layers; l-- > 0;) {
        g.d_weights[l] = delta * activations[l].transpose();
        g.d_biases[l] = delta.rowwise().sum();
        if (l > 0) {
            const auto& a = activations[l];  // tanh output of the previous layer
            delta = ((m.layers[l].weights.transpose() * delta).array() *
                     (1.0 - a.array().square()))
                        .matrix();
        }
    }
    return g;
}

AdamState make_adam_state(const PredictorModel& m, double lr) {
    AdamState s;
    s.lr = lr;
    for (const auto& layer : m.layers) {
        s.m_weights.push_back(Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()));
        s.v_weights.push_back(Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()));
        s.m_biases.push_back(Eigen::VectorXd::Zero(layer.biases.size()));
        s.v_biases.push_back(Eigen::VectorXd::Zero(layer.biases.size()));
    }
    return s;
}

void adam_step(PredictorModel& m, const Gradients& g, AdamState& s) {
    if (g.d_weights.size() != m.layers.size() || s.m_weights.size() != m.layers.size())
        throw std::invalid_argument("adam_step: shape mismatch");

    s.step += 1;
    const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));

    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        auto update = [&](auto& param, auto& m1, auto& m2, const auto& grad) {
            m1 = s.beta1 * m1 + (1.0 - s.beta1) * grad;
            m2 = (s.beta2 * m2.array() + (1.0 - s.beta2) * grad.array().square()).matrix();
            param.array() -=
                s.lr * (m1.array() / bc1) / ((m2.array() / bc2).sqrt() + s.epsilon);
        };
        update(m.layers[l].weights, s.m_weights[l], s.v_weights[l], g.d_weights[l]);
        update(m.layers[l].biases, s.m_biases[l], s.v_biases[l], g.d_biases[l]);
    }
}

TrainResult train(const std::vector<PosePairSample>& dataset, const TrainConfig& cfg) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    if (cfg.epochs <= 0 || cfg.batch_size <= 0)
        throw std::invalid_argument("train: epochs and batch size must be positive");
    if (cfg.dims.front() != 4 * kHumanLandmarkCount * kHumanLandmarkCount +
                                2 * kFashionLandmarkCount ||
        cfg.dims.back() != 2 * kFashionLandmarkCount)
        throw std::invalid_argument("train: dims must map the assembled input to 12 outputs");

    const auto n = static_cast<Eigen::Index>(dataset.size());
    Eigen::MatrixXd inputs(cfg.dims.front(), n);
    Eigen::MatrixXd targets(cfg.dims.back(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = dataset[i];
        inputs.col(i) = assemble_input(s.model_human, s.person_human, s.model_fashion);
        if (s.target_fashion.size() != static_cast<std::size_t>(kFashionLandmarkCount))
            throw std::invalid_argument("train: expected 6 target fashion landmarks");
        for (int k = 0; k < kFashionLandmarkCount; ++k) {
            if (!s.target_fashion[k].visible)
                throw std::invalid_argument("train: invisible target landmark");
            targets(2 * k, i) = s.target_fashion[k].x;
            targets(2 * k + 1, i) = s.target_fashion[k].y;
        }
    }

    TrainResult result;
    result.model = make_predictor(cfg.dims, mix_seed(cfg.seed, 0));
    AdamState adam = make_adam_state(result.model, cfg.lr);

    std::mt19937_64 shuffle_eng(mix_seed(cfg.seed, 1));
    std::vector<Eigen::Index> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Pinned Fisher-Yates so the visit order depends only on the seed.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(shuffle_eng() % i);
            std::swap(order[i - 1], order[j]);
        }

        double epoch_loss = 0.0;
        for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
            const Eigen::Index count = std::min<Eigen::Index>(cfg.batch_size, n - start);
            Eigen::MatrixXd bx(inputs.rows(), count);
            Eigen::MatrixXd by(targets.rows(), count);
            for (Eigen::Index k = 0; k < count; ++k) {
                bx.col(k) = inputs.col(order[start + k]);
                by.col(k) = targets.col(order[start + k]);
            }
            epoch_loss += batch_loss(result.model, bx, by) * static_cast<double>(count);
            const Gradients g = gradients(result.model, bx, by);
            adam_step(result.model, g, adam);
        }
        epoch_loss /= static_cast<double>(n);
        result.epoch_losses.push_back(epoch_loss);
        if (cfg.stop_loss > 0.0 && epoch_loss < cfg.stop_loss) break;
    }
    return result;
}

std::string serialize_model(const PredictorModel& m) {
    nlohmann::json j;
    j["version"] = 1;
    j["dims"] = m.dims();
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : m.layers) {
        nlohmann::json jl;
        std::vector<double> w;
        w.reserve(layer.weights.size());
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)  // row-major
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) w.push_back(layer.weights(r, c));
        jl["w"] = std::move(w);
        jl["b"] = std::vector<double>(layer.biases.data(), layer.biases.data() + layer.biases.size());
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    return j.dump() + "\n";
}

PredictorModel parse_model(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("model: malformed JSON: ") + e.what());
    }
    if (!j.contains("version") || j["version"].get<int>() != 1)
        throw std::invalid_argument("model: unsupported version");
    const auto dims = j.at("dims").get<std::vector<int>>();
    const auto& layers = j.at("layers");
    if (dims.size() < 2 || !layers.is_array() || layers.size() + 1 != dims.size())
        throw std::invalid_argument("model: dims and layer count disagree");

    PredictorModel m;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto w = layers[l].at("w").get<std::vector<double>>();
        const auto b = layers[l].at("b").get<std::vector<double>>();
        const std::size_t rows = static_cast<std::size_t>(dims[l + 1]);
        const std::size_t cols = static_cast<std::size_t>(dims[l]);
        if (w.size() != rows * cols || b.size() != rows)
            throw std::invalid_argument("model: layer " + std::to_string(l) +
                                        " does not match dims");
        DenseLayer layer;
        layer.weights.resize(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) layer.weights(r, c) = w[r * cols + c];
        layer.biases = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
        m.layers.push_back(std::move(layer));
    }
    return m;
}

void save_model(const PredictorModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << serialize_model(m);
}

PredictorModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

} // namespace vton
