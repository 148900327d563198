#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lar/losses.hpp"

namespace lar {

/// One unit vector per label; row c belongs to label c.
struct ClassConfiguration {
    Matrix points;

    int num_labels() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }

    /// Throws InvalidArgument unless there are >= 2 rows of unit norm (1e-9).
    void validate() const;
};

struct GeometryReport {
    std::vector<double> angular_gaps;  // radians, in circular order
    std::vector<int> circular_order;   // labels sorted by polar angle
    double max_gap_deviation = 0.0;    // max |gap - 2*pi/L|
    bool ranking_preserved = false;
    double objective_value = 0.0;
};

/// L points at angles phase + 2*pi*c/L, labels in counterclockwise order.
ClassConfiguration uniform_configuration(int num_labels, double phase = 0.0);

/// The per-label LAR objective where each point is its own positive:
///   (1/L) sum_i log(1 + sum_{j != i} exp(log(delta_ij + offset) <p_i, p_j> - 1)).
double class_objective(const ClassConfiguration& config, double multiplier_offset = 0.0);

/// Euclidean gradient of class_objective w.r.t. the point coordinates.
Matrix class_objective_gradient(const ClassConfiguration& config, double multiplier_offset = 0.0);

struct OptimizerOptions {
    int steps = 5000;
    double lr = 0.1;
    int restarts = 10;
    double multiplier_offset = 0.0;
};

/// Projected gradient descent from `restarts` seeded random starts; keeps the
/// lowest-objective result. Throws NonFinite if the objective diverges.
ClassConfiguration optimize_configuration(int num_labels, int dim, std::uint64_t seed,
                                          const OptimizerOptions& options = {});

/// Circle-only angle analysis. Throws DimensionError for dim != 2.
GeometryReport measure_angles(const ClassConfiguration& config, double multiplier_offset = 0.0);

enum class InequalityForm {
    Odd,          // odd l, both sides as written with cos(a - e) + cos(a + e)
    EvenFull,     // even l, including the (l/2) cos(pi) vs (l/2) cos(pi - e) terms
    EvenReduced,  // even l >= 6, with those terms dropped
};

const char* to_string(InequalityForm form) noexcept;

struct InequalityRow {
    int l = 0;
    double epsilon = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    InequalityForm form = InequalityForm::Odd;
};

/// Perturbation epsilon, either absolute (radians) or a fraction of 2*pi/l.
struct EpsilonSpec {
    double value = 0.0;
    bool fraction_of_uniform = false;

    double resolve(int l) const;
};

/// Evaluates the epsilon-shift inequalities for every l in [3, l_max]. Throws
/// BadEpsilon when a resolved epsilon is outside (0, 2*pi/l).
std::vector<InequalityRow> perturbation_inequality_check(int l_max, std::span<const EpsilonSpec> epsilons);

/// (mean of exp(cos t), exp(mean of cos t)). Throws InvalidArgument when empty.
std::pair<double, double> jensen_gap(std::span<const double> angles);

/// Random unit configurations (seeded) whose objective is <= the uniform one.
int count_configurations_not_beaten(int num_labels, int dim, int samples, std::uint64_t seed,
                                    double multiplier_offset = 0.0);

ClassConfiguration random_configuration(int num_labels, int dim, std::uint64_t seed);

}  // namespace lar
