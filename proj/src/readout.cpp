#include "srnn/readout.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace srnn {

ReadoutModel fit_readout(const std::vector<std::vector<double>>& features,
                         const std::vector<double>& targets, double lambda) {
    if (features.empty())
        throw std::invalid_argument("fit_readout: no training rows");
    if (features.size() != targets.size())
        throw std::invalid_argument("fit_readout: feature/target row mismatch");
    if (lambda < 0.0)
        throw std::invalid_argument("fit_readout: lambda must be >= 0");

    const auto n = static_cast<Eigen::Index>(features.size());
    const auto p = static_cast<Eigen::Index>(features[0].size());

    Eigen::MatrixXd a(n, p + 1); // last column is the bias
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(features[static_cast<size_t>(i)].size()) != p)
            throw std::invalid_argument("fit_readout: ragged feature rows");
        for (Eigen::Index j = 0; j < p; ++j)
            a(i, j) = features[static_cast<size_t>(i)][static_cast<size_t>(j)];
        a(i, p) = 1.0;
        y(i) = targets[static_cast<size_t>(i)];
    }

    Eigen::VectorXd w(p + 1);
    if (lambda == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        if (qr.rank() < p + 1)
            throw std::runtime_error(
                "fit_readout: rank-deficient feature matrix with lambda = 0; "
                "use lambda > 0");
        w = qr.solve(y);
    } else {
        const double feature_scale =
            a.leftCols(p).squaredNorm() / static_cast<double>(std::max<Eigen::Index>(p, 1));
        const double lambda_abs = lambda * std::max(feature_scale, 1e-300);
        Eigen::MatrixXd gram = a.transpose() * a;
        for (Eigen::Index j = 0; j < p; ++j) gram(j, j) += lambda_abs; // bias unpenalized
        w = gram.ldlt().solve(a.transpose() * y);
    }

    ReadoutModel m;
    m.lambda = lambda;
    m.weights.assign(w.data(), w.data() + p);
    m.bias = w(p);
    m.training_rms_residual_hz = std::sqrt((a * w - y).squaredNorm() / static_cast<double>(n));
    return m;
}

double predict(const ReadoutModel& m, std::span<const double> rates) {
    if (rates.size() != m.weights.size())
        throw std::invalid_argument("predict: rate vector length mismatch");
    double out = m.bias;
    for (size_t i = 0; i < rates.size(); ++i) out += m.weights[i] * rates[i];
    return out < 0.0 ? 0.0 : out;
}

void save_readout(const ReadoutModel& m, std::ostream& out) {
    out.precision(17);
    out << "# srnn readout v1\n";
    out << "lambda " << m.lambda << "\n";
    out << "dim " << m.weights.size() << "\n";
    out << "bias " << m.bias << "\n";
    for (double w : m.weights) out << w << '\n';
}

ReadoutModel load_readout(std::istream& in) {
    ReadoutModel m;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# srnn readout", 0) != 0)
        throw std::runtime_error("readout file: missing header");
    size_t dim = 0;
    auto expect = [&](const char* key) -> std::string {
        if (!std::getline(in, line) || line.rfind(key, 0) != 0)
            throw std::runtime_error(std::string("readout file: expected ") + key);
        return line.substr(std::string(key).size() + 1);
    };
    m.lambda = std::stod(expect("lambda"));
    dim = std::stoull(expect("dim"));
    m.bias = std::stod(expect("bias"));
    m.weights.resize(dim);
    for (size_t i = 0; i < dim; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("readout file: truncated weights");
        m.weights[i] = std::stod(line);
    }
    return m;
}

} // namespace srnn
