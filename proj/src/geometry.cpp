#include "lar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "lar/error.hpp"

namespace lar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double multiplier(int a, int b, int num_labels, double offset) {
    return std::log(static_cast<double>(label_distance(a, b, num_labels)) + offset);
}

// exp terms z_ij = w_ij <p_i, p_j> - 1 and per-anchor softmax weights.
struct ObjectiveTerms {
    Matrix weights;  // w_ij, zero diagonal
    Matrix sigma;    // exp(z_ij) / (1 + sum_k exp(z_ik)), zero diagonal
    double value = 0.0;
};

ObjectiveTerms evaluate(const ClassConfiguration& config, double offset) {
    const int n = config.num_labels();
    ObjectiveTerms t;
    t.weights = Matrix::Zero(n, n);
    t.sigma = Matrix::Zero(n, n);
    const Matrix gram = config.points * config.points.transpose();
    std::vector<double> z(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double shift = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            t.weights(i, j) = multiplier(i, j, n, offset);
            z[static_cast<std::size_t>(j)] = t.weights(i, j) * gram(i, j) - 1.0;
            shift = std::max(shift, z[static_cast<std::size_t>(j)]);
        }
        double denom = std::exp(-shift);
        for (int j = 0; j < n; ++j) {
            if (j != i) denom += std::exp(z[static_cast<std::size_t>(j)] - shift);
        }
        total += shift + std::log(denom);
        for (int j = 0; j < n; ++j) {
            if (j != i) t.sigma(i, j) = std::exp(z[static_cast<std::size_t>(j)] - shift) / denom;
        }
    }
    t.value = total / n;
    return t;
}

double polar_angle(const ClassConfiguration& config, int row) {
    const double a = std::atan2(config.points(row, 1), config.points(row, 0));
    return a < 0.0 ? a + kTwoPi : a;
}

}  // namespace

void ClassConfiguration::validate() const {
    if (points.rows() < 2 || points.cols() < 1) {
        throw Error(ErrorCode::InvalidArgument, "configuration needs at least two labels");
    }
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        if (std::abs(points.row(i).norm() - 1.0) > 1e-9) {
            throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(i) + " is not unit norm");
        }
    }
}

ClassConfiguration uniform_configuration(int num_labels, double phase) {
    ClassConfiguration c;
    c.points.resize(num_labels, 2);
    for (int i = 0; i < num_labels; ++i) {
        const double a = phase + kTwoPi * i / num_labels;
        c.points(i, 0) = std::cos(a);
        c.points(i, 1) = std::sin(a);
    }
    return c;
}

double class_objective(const ClassConfiguration& config, double multiplier_offset) {
    config.validate();
    return evaluate(config, multiplier_offset).value;
}

Matrix class_objective_gradient(const ClassConfiguration& config, double multiplier_offset) {
    config.validate();
    const ObjectiveTerms t = evaluate(config, multiplier_offset);
    const int n = config.num_labels();
    // d/dp_i = (1/L) sum_j (sigma_ij + sigma_ji) w_ij p_j   (w symmetric)
    Matrix coeff(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) coeff(i, j) = (t.sigma(i, j) + t.sigma(j, i)) * t.weights(i, j);
    return coeff * config.points / static_cast<double>(n);
}

ClassConfiguration random_configuration(int num_labels, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ClassConfiguration c;
    c.points.resize(num_labels, dim);
    for (int i = 0; i < num_labels; ++i) {
        double norm = 0.0;
        do {
            for (int d = 0; d < dim; ++d) c.points(i, d) = gauss(rng);
            norm = c.points.row(i).norm();
        } while (norm < 1e-6);
        c.points.row(i) /= norm;
    }
    return c;
}

ClassConfiguration optimize_configuration(int num_labels, int dim, std::uint64_t seed,
                                          const OptimizerOptions& options) {
    if (num_labels < 3) throw Error(ErrorCode::InvalidArgument, "optimization needs L >= 3");
    if (dim < 2) throw Error(ErrorCode::InvalidArgument, "optimization needs D >= 2");
    if (options.steps < 1 || !(options.lr > 0.0) || options.restarts < 1) {
        throw Error(ErrorCode::InvalidArgument, "steps, restarts must be >= 1 and lr > 0");
    }

    std::seed_seq seq{seed, static_cast<std::uint64_t>(num_labels), static_cast<std::uint64_t>(dim)};
    std::mt19937_64 seeder(seq);

    ClassConfiguration best;
    double best_value = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        ClassConfiguration c = random_configuration(num_labels, dim, seeder());
        for (int step = 0; step < options.steps; ++step) {
            const Matrix g = class_objective_gradient(c, options.multiplier_offset);
            for (int i = 0; i < num_labels; ++i) {
                const double radial = g.row(i).dot(c.points.row(i));
                c.points.row(i) -= options.lr * (g.row(i) - radial * c.points.row(i));
                c.points.row(i).normalize();
            }
        }
        const double value = class_objective(c, options.multiplier_offset);
        if (!std::isfinite(value)) {
            throw Error(ErrorCode::NonFinite, "objective diverged in restart " + std::to_string(r));
        }
        if (value < best_value) {
            best_value = value;
            best = c;
        }
    }
    return best;
}

GeometryReport measure_angles(const ClassConfiguration& config, double multiplier_offset) {
    if (config.dim() != 2) {
        throw Error(ErrorCode::DimensionError,
                    "angle measurement needs D = 2, got D = " + std::to_string(config.dim()));
    }
    config.validate();
    const int n = config.num_labels();

    std::vector<double> angle(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) angle[static_cast<std::size_t>(i)] = polar_angle(config, i);

    GeometryReport report;
    report.circular_order.resize(static_cast<std::size_t>(n));
    std::iota(report.circular_order.begin(), report.circular_order.end(), 0);
    std::sort(report.circular_order.begin(), report.circular_order.end(),
              [&](int a, int b) { return angle[static_cast<std::size_t>(a)] < angle[static_cast<std::size_t>(b)]; });

    const double target = kTwoPi / n;
    bool ascending = true;
    bool descending = true;
    for (int k = 0; k < n; ++k) {
        const int here = report.circular_order[static_cast<std::size_t>(k)];
        const int next = report.circular_order[static_cast<std::size_t>((k + 1) % n)];
        double gap = angle[static_cast<std::size_t>(next)] - angle[static_cast<std::size_t>(here)];
        if (k == n - 1) gap += kTwoPi;
        report.angular_gaps.push_back(gap);
        report.max_gap_deviation = std::max(report.max_gap_deviation, std::abs(gap - target));
        ascending = ascending && next == (here + 1) % n;
        descending = descending && here == (next + 1) % n;
    }
    report.ranking_preserved = ascending || descending;
    report.objective_value = class_objective(config, multiplier_offset);
    return report;
}

const char* to_string(InequalityForm form) noexcept {
    switch (form) {
        case InequalityForm::Odd: return "odd";
        case InequalityForm::EvenFull: return "even_full";
        case InequalityForm::EvenReduced: return "even_reduced";
    }
    return "unknown";
}

double EpsilonSpec::resolve(int l) const {
    return fraction_of_uniform ? value * kTwoPi / l : value;
}

std::vector<InequalityRow> perturbation_inequality_check(int l_max, std::span<const EpsilonSpec> epsilons) {
    if (l_max < 3) throw Error(ErrorCode::InvalidArgument, "L_max must be >= 3");
    if (epsilons.empty()) throw Error(ErrorCode::InvalidArgument, "no epsilon values given");

    std::vector<InequalityRow> rows;
    for (int l = 3; l <= l_max; ++l) {
        const double step = kTwoPi / l;
        const int last_j = (l % 2 == 1) ? (l - 1) / 2 : l / 2 - 1;
        for (const EpsilonSpec& spec : epsilons) {
            const double eps = spec.resolve(l);
            if (!(eps > 0.0 && eps < step)) {
                throw Error(ErrorCode::BadEpsilon, "epsilon " + std::to_string(eps) + " outside (0, 2pi/" +
                                                       std::to_string(l) + ")");
            }
            double unperturbed = 0.0;
            double shifted = 0.0;
            for (int j = 1; j <= last_j; ++j) {
                const double w = 2.0 * std::log(static_cast<double>(j));
                unperturbed += 2.0 * w * std::cos(j * step);
                shifted += w * std::cos(j * step - eps) + w * std::cos(j * step + eps);
            }
            if (l % 2 == 1) {
                rows.push_back({l, eps, unperturbed, shifted, unperturbed < shifted, InequalityForm::Odd});
                continue;
            }
            const double half = l / 2.0;
            const double lhs = unperturbed + half * std::cos(std::numbers::pi);
            const double rhs = shifted + half * std::cos(std::numbers::pi - eps);
            rows.push_back({l, eps, lhs, rhs, lhs < rhs, InequalityForm::EvenFull});
            if (l >= 6) {
                rows.push_back({l, eps, unperturbed, shifted, unperturbed < shifted, InequalityForm::EvenReduced});
            }
        }
    }
    return rows;
}

std::pair<double, double> jensen_gap(std::span<const double> angles) {
    if (angles.empty()) throw Error(ErrorCode::InvalidArgument, "jensen_gap needs at least one angle");
    double mean_exp = 0.0;
    double mean_cos = 0.0;
    for (const double a : angles) {
        mean_exp += std::exp(std::cos(a));
        mean_cos += std::cos(a);
    }
    const auto n = static_cast<double>(angles.size());
    return {mean_exp / n, std::exp(mean_cos / n)};
}

int count_configurations_not_beaten(int num_labels, int dim, int samples, std::uint64_t seed,
                                    double multiplier_offset) {
    ClassConfiguration uniform = uniform_configuration(num_labels);
    if (dim > 2) {
        ClassConfiguration lifted;
        lifted.points = Matrix::Zero(num_labels, dim);
        lifted.points.leftCols(2) = uniform.points;
        uniform = lifted;
    }
    const double reference = class_objective(uniform, multiplier_offset);
    std::mt19937_64 seeder(seed);
    int not_beaten = 0;
    for (int s = 0; s < samples; ++s) {
        const ClassConfiguration c = random_configuration(num_labels, dim, seeder());
        if (!(reference < class_objective(c, multiplier_offset))) ++not_beaten;
    }
    return not_beaten;
}

}  // namespace lar
