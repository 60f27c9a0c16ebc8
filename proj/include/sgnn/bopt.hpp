#pragma once

// Gaussian-process Bayesian optimisation over a small discrete grid.
//
// Points are addressed by a flat index into the cartesian product of the
// dimensions. Each dimension is mapped to [0, 1] by rank, not by value, so
// grids like {1, 50, 100, 300, 500, 700, 1000} get evenly spaced coordinates.
// The surrogate is an isotropic Matern-5/2 GP whose length scale and signal
// variance are fit by maximum likelihood; acquisition maximises expected
// improvement by scanning every unobserved point.

#include "sgnn/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgnn::bopt {

struct Dimension {
    std::string name;
    std::vector<std::int64_t> values;
};

class SearchSpace {
public:
    SearchSpace() = default;
    explicit SearchSpace(std::vector<Dimension> dims);

    /// paper_to_paper_w x train_to_topic_w x tau x sim_steps; 2450 points.
    static SearchSpace table3();

    std::size_t size() const noexcept { return size_; }
    std::size_t rank() const noexcept { return dims_.size(); }
    const std::vector<Dimension>& dimensions() const noexcept { return dims_; }

    std::vector<std::size_t> unflatten(std::size_t flat) const;
    std::size_t flatten(std::span<const std::size_t> indices) const;
    std::vector<std::int64_t> values_at(std::size_t flat) const;
    std::vector<double> normalized(std::size_t flat) const;

    /// Flat index of an exact value tuple; throws std::out_of_range.
    std::size_t find(std::span<const std::int64_t> values) const;

private:
    std::vector<Dimension> dims_;
    std::size_t size_ = 0;
};

class SpaceExhausted : public std::runtime_error {
public:
    SpaceExhausted() : std::runtime_error("every grid point has already been observed") {}
};

struct Observation {
    std::size_t point = 0;
    std::vector<std::int64_t> values;
    double objective = 0.0;
    bool failed = false;
    bool random = false;       // drawn during the random initial phase
    std::uint64_t seed = 0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct FitOptions {
    double noise_floor = 1e-8;     // nugget relative to the standardised signal
    double min_length_scale = 0.05;
    double max_length_scale = 10.0;
    int grid_points = 40;
    int starts = 3;                // local refinements from the best grid points
};

class GpSurrogate {
public:
    struct Prediction {
        double mean = 0.0;
        double variance = 0.0;
    };

    Prediction predict(std::span<const double> x) const;

    double length_scale() const noexcept { return length_scale_; }
    double signal_variance() const noexcept { return signal_variance_; }
    double noise() const noexcept { return noise_; }
    bool degenerate() const noexcept { return degenerate_; }
    double log_likelihood() const noexcept { return log_likelihood_; }
    double best_observed() const noexcept { return best_; }

private:
    friend GpSurrogate fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                           const FitOptions& options);

    Eigen::MatrixXd x_;
    Eigen::MatrixXd chol_;  // lower Cholesky factor of R + noise*I
    Eigen::VectorXd alpha_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    double length_scale_ = 1.0;
    double signal_variance_ = 1.0;  // in standardised units
    double noise_ = 0.0;
    double log_likelihood_ = 0.0;
    double best_ = 0.0;
    bool degenerate_ = false;
};

double matern52(double distance, double length_scale);

/// Fits the surrogate to >= 2 points. Identical objectives fall back to the
/// prior; duplicate inputs with conflicting outputs are absorbed by the nugget.
GpSurrogate fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                const FitOptions& options = {});

GpSurrogate fit(const std::vector<Observation>& observations, const SearchSpace& space,
                const FitOptions& options = {});

/// EI for maximisation.
double expected_improvement(double mean, double variance, double best);

/// Unobserved point with the largest EI, ties broken by `rng`. Throws
/// SpaceExhausted when nothing is left.
std::size_t acquire(const GpSurrogate& model, const SearchSpace& space, const std::vector<bool>& observed, Rng& rng);

struct OptimizeOptions {
    std::size_t n_init = 5;
    std::size_t n_iter = 10;
    std::uint64_t seed = 0;
    FitOptions fit;
};

struct OptimizeResult {
    std::vector<Observation> history;
    std::vector<double> incumbent;           // best objective after each row
    std::optional<std::size_t> best;         // row index into history
    bool exhausted = false;
};

/// Called with the grid values of a point; throwing marks the evaluation
/// failed (objective 0, never the incumbent).
using Objective = std::function<double(const std::vector<std::int64_t>& values)>;

OptimizeResult optimize(const Objective& objective, const SearchSpace& space, const OptimizeOptions& options = {});

} // namespace sgnn::bopt
