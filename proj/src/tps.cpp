#include "vton/tps.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vton {

double kernel_phi(double r) {
    if (r < 0.0) throw std::invalid_argument("kernel_phi: negative distance");
    if (r == 0.0) return 0.0;
    return r * r * std::log(r);
}

TpsTransform fit_tps(const ControlPairs& pairs, double lambda) {
    const auto n = static_cast<Eigen::Index>(pairs.count());
    if (pairs.source.size() != pairs.target.size())
        throw std::invalid_argument("fit_tps: source/target length mismatch");
    if (n < 3) throw std::invalid_argument("fit_tps: need at least 3 control pairs");
    if (lambda < 0.0) throw std::invalid_argument("fit_tps: lambda must be nonnegative");

    const Eigen::Index dim = n + 3;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            A(i, j) = kernel_phi(distance(pairs.source[i], pairs.source[j]));
        }
        A(i, i) += lambda;
        A(i, n + 0) = 1.0;
        A(i, n + 1) = pairs.source[i].x;
        A(i, n + 2) = pairs.source[i].y;
        A(n + 0, i) = 1.0;
        A(n + 1, i) = pairs.source[i].x;
        A(n + 2, i) = pairs.source[i].y;
    }

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(dim, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        rhs(i, 0) = pairs.target[i].x;
        rhs(i, 1) = pairs.target[i].y;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12)) {
        std::ostringstream msg;
        msg << "fit_tps: singular or ill-conditioned system (rcond = " << rcond
            << ", N = " << n << ", lambda = " << lambda
            << "); check for collinear or duplicate control points";
        throw std::runtime_error(msg.str());
    }
    const Eigen::MatrixXd sol = lu.solve(rhs);

    TpsTransform t;
    t.lambda = lambda;
    t.control_points = pairs.source;
    t.rbf_coeffs = sol.topRows(n);
    t.affine.row(0) = sol.col(0).tail(3).transpose();
    t.affine.row(1) = sol.col(1).tail(3).transpose();
    return t;
}

Vec2 evaluate_tps(const TpsTransform& t, Vec2 p) {
    Eigen::Vector3d poly(1.0, p.x, p.y);
    Eigen::Vector2d out = t.affine * poly;
    const auto n = static_cast<Eigen::Index>(t.control_points.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        const double k = kernel_phi(distance(p, t.control_points[j]));
        out(0) += t.rbf_coeffs(j, 0) * k;
        out(1) += t.rbf_coeffs(j, 1) * k;
    }
    return {out(0), out(1)};
}

double bending_energy(const TpsTransform& t) {
    const auto n = static_cast<Eigen::Index>(t.control_points.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            K(i, j) = kernel_phi(distance(t.control_points[i], t.control_points[j]));
    double e = 0.0;
    for (int d = 0; d < 2; ++d) {
        const Eigen::VectorXd c = t.rbf_coeffs.col(d);
        e += c.dot(K * c);
    }
    return e;
}

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

} // namespace

std::string serialize_tps(const TpsTransform& t) {
    std::string out = "{\"affine\":[";
    for (int r = 0; r < 2; ++r) {
        if (r) out += ',';
        out += '[';
        for (int c = 0; c < 3; ++c) {
            if (c) out += ',';
            out += fmt6(t.affine(r, c));
        }
        out += ']';
    }
    out += "],\"control_points\":[";
    for (std::size_t j = 0; j < t.control_points.size(); ++j) {
        if (j) out += ',';
        out += '[' + fmt6(t.control_points[j].x) + ',' + fmt6(t.control_points[j].y) + ']';
    }
    out += "],\"lambda\":" + fmt6(t.lambda) + ",\"rbf_coeffs\":[";
    for (Eigen::Index j = 0; j < t.rbf_coeffs.rows(); ++j) {
        if (j) out += ',';
        out += '[' + fmt6(t.rbf_coeffs(j, 0)) + ',' + fmt6(t.rbf_coeffs(j, 1)) + ']';
    }
    out += "]}\n";
    return out;
}

TpsTransform parse_tps(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("tps: malformed JSON: ") + e.what());
    }
    TpsTransform t;
    const auto& aff = j.at("affine");
    if (!aff.is_array() || aff.size() != 2 || aff[0].size() != 3 || aff[1].size() != 3)
        throw std::invalid_argument("tps: affine must be a 2x3 matrix");
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) t.affine(r, c) = aff[r][c].get<double>();

    const auto& cps = j.at("control_points");
    const auto& coeffs = j.at("rbf_coeffs");
    if (!cps.is_array() || !coeffs.is_array() || cps.size() != coeffs.size())
        throw std::invalid_argument("tps: control point / coefficient count mismatch");
    const auto n = static_cast<Eigen::Index>(cps.size());
    t.rbf_coeffs.resize(n, 2);
    t.control_points.reserve(cps.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        t.control_points.push_back({cps[i][0].get<double>(), cps[i][1].get<double>()});
        t.rbf_coeffs(i, 0) = coeffs[i][0].get<double>();
        t.rbf_coeffs(i, 1) = coeffs[i][1].get<double>();
    }
    t.lambda = j.at("lambda").get<double>();
    if (t.lambda < 0.0) throw std::invalid_argument("tps: lambda must be nonnegative");
    return t;
}

} // namespace vton
