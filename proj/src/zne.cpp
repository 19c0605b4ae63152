#include "qvzne/zne.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "qvzne/density_sim.hpp"

namespace qvzne {

const LambdaResult *QvRecord::find_lambda(double lambda) const {
    for (const LambdaResult &r : per_lambda) {
        if (std::abs(r.lambda - lambda) < 1e-9) return &r;
    }
    return nullptr;
}

double hop_from_counts(const std::map<std::string, uint64_t> &counts, const HeavySet &heavy) {
    if (counts.empty()) throw std::invalid_argument("hop_from_counts: empty counts");
    uint64_t total = 0, heavy_hits = 0;
    for (const auto &[bits, c] : counts) {
        if (bits.size() != heavy.n) {
            throw std::invalid_argument("hop_from_counts: bitstring width " +
                                        std::to_string(bits.size()) + " does not match n=" +
                                        std::to_string(heavy.n));
        }
        total += c;
        if (heavy.members.count(index_of_bitstring(bits))) heavy_hits += c;
    }
    if (total == 0) throw std::invalid_argument("hop_from_counts: zero total shots");
    return static_cast<double>(heavy_hits) / static_cast<double>(total);
}

double combine_local_ensemble(const std::vector<double> &hops) {
    if (hops.empty()) throw std::invalid_argument("combine_local_ensemble: empty ensemble");
    return mean_of(hops);
}

double mean_of(const std::vector<double> &values) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

ZneEstimate extrapolate(const std::vector<std::pair<double, double>> &points, int order) {
    if (order < 0) throw std::invalid_argument("extrapolate: order must be >= 0");
    std::set<double> distinct;
    for (auto [lambda, hop] : points) {
        if (lambda < 1.0 - 1e-12) throw std::invalid_argument("extrapolate: lambda must be >= 1");
        distinct.insert(lambda);
    }
    if (distinct.size() < static_cast<size_t>(order) + 1) {
        throw std::invalid_argument("extrapolate: need at least order+1 distinct lambdas");
    }

    const Eigen::Index rows = static_cast<Eigen::Index>(points.size());
    const Eigen::Index cols = order + 1;
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        double pw = 1.0;
        for (Eigen::Index j = 0; j < cols; ++j) {
            design(i, j) = pw;
            pw *= points[i].first;
        }
        rhs(i) = points[i].second;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < cols) throw std::invalid_argument("extrapolate: degenerate design matrix");
    Eigen::VectorXd coef = qr.solve(rhs);

    ZneEstimate est;
    est.order = order;
    est.coefficients.assign(coef.data(), coef.data() + coef.size());
    est.intercept = coef(0);
    est.lambdas_used.assign(distinct.begin(), distinct.end());
    const Eigen::VectorXd residual = design * coef - rhs;
    est.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(rows));
    return est;
}

double bootstrap_sigma(const std::vector<double> &hop_vector, size_t resamples, Rng &rng) {
    if (hop_vector.empty()) throw std::invalid_argument("bootstrap_sigma: empty vector");
    if (resamples < 2) throw std::invalid_argument("bootstrap_sigma: need at least 2 resamples");
    std::uniform_int_distribution<size_t> pick(0, hop_vector.size() - 1);
    std::vector<double> means(resamples);
    for (size_t r = 0; r < resamples; ++r) {
        double acc = 0.0;
        for (size_t i = 0; i < hop_vector.size(); ++i) acc += hop_vector[pick(rng)];
        means[r] = acc / static_cast<double>(hop_vector.size());
    }
    const double mu = mean_of(means);
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    return std::sqrt(var / static_cast<double>(resamples - 1));
}

bool evaluate_pass(double mean_hop, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("evaluate_pass: sigma must be >= 0");
    return mean_hop - 2.0 * sigma > 2.0 / 3.0;
}

std::vector<CumulativePoint> cumulative_series(const std::vector<double> &hop_vector,
                                               size_t resamples, uint64_t base_seed) {
    if (hop_vector.empty()) throw std::invalid_argument("cumulative_series: empty vector");
    std::vector<CumulativePoint> series;
    series.reserve(hop_vector.size());
    double running = 0.0;
    std::vector<double> prefix;
    prefix.reserve(hop_vector.size());
    for (size_t i = 0; i < hop_vector.size(); ++i) {
        running += hop_vector[i];
        prefix.push_back(hop_vector[i]);
        double sigma = 0.0;
        if (prefix.size() >= 2) {
            Rng rng(base_seed + i);
            sigma = bootstrap_sigma(prefix, resamples, rng);
        }
        series.push_back({i, running / static_cast<double>(i + 1), 2.0 * sigma});
    }
    return series;
}

}  // namespace qvzne
