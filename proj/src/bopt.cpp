#include "sgnn/bopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sgnn::bopt {

// ------------------------------------------------------------ search space

SearchSpace::SearchSpace(std::vector<Dimension> dims) : dims_(std::move(dims))
{
    if (dims_.empty()) throw std::invalid_argument("search space needs at least one dimension");
    size_ = 1;
    for (const auto& d : dims_) {
        if (d.values.empty()) throw std::invalid_argument("dimension '" + d.name + "' has no values");
        size_ *= d.values.size();
    }
}

SearchSpace SearchSpace::table3()
{
    const std::vector<std::int64_t> weights{1, 50, 100, 300, 500, 700, 1000};
    std::vector<std::int64_t> steps(10);
    std::iota(steps.begin(), steps.end(), 11);
    return SearchSpace({{"paper_to_paper_w", weights},
                        {"train_to_topic_w", weights},
                        {"tau", {20, 25, 30, 35, 40}},
                        {"sim_steps", steps}});
}

std::vector<std::size_t> SearchSpace::unflatten(std::size_t flat) const
{
    if (flat >= size_) throw std::out_of_range("grid index out of range");
    std::vector<std::size_t> idx(dims_.size());
    for (std::size_t d = dims_.size(); d-- > 0;) {
        idx[d] = flat % dims_[d].values.size();
        flat /= dims_[d].values.size();
    }
    return idx;
}

std::size_t SearchSpace::flatten(std::span<const std::size_t> indices) const
{
    if (indices.size() != dims_.size()) throw std::invalid_argument("index tuple has the wrong rank");
    std::size_t flat = 0;
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        if (indices[d] >= dims_[d].values.size()) throw std::out_of_range("grid coordinate out of range");
        flat = flat * dims_[d].values.size() + indices[d];
    }
    return flat;
}

std::vector<std::int64_t> SearchSpace::values_at(std::size_t flat) const
{
    const auto idx = unflatten(flat);
    std::vector<std::int64_t> out(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) out[d] = dims_[d].values[idx[d]];
    return out;
}

std::vector<double> SearchSpace::normalized(std::size_t flat) const
{
    const auto idx = unflatten(flat);
    std::vector<double> out(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        const auto n = dims_[d].values.size();
        out[d] = n == 1 ? 0.5 : static_cast<double>(idx[d]) / static_cast<double>(n - 1);
    }
    return out;
}

std::size_t SearchSpace::find(std::span<const std::int64_t> values) const
{
    if (values.size() != dims_.size()) throw std::invalid_argument("value tuple has the wrong rank");
    std::vector<std::size_t> idx(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        const auto& vs = dims_[d].values;
        const auto it = std::find(vs.begin(), vs.end(), values[d]);
        if (it == vs.end()) {
            throw std::out_of_range("value " + std::to_string(values[d]) + " is not on the '" + dims_[d].name + "' grid");
        }
        idx[d] = static_cast<std::size_t>(it - vs.begin());
    }
    return flatten(idx);
}

// ---------------------------------------------------------------------- GP

double matern52(double distance, double length_scale)
{
    const double r = std::sqrt(5.0) * distance / length_scale;
    return (1.0 + r + r * r / 3.0) * std::exp(-r);
}

namespace {

double distance(const Eigen::Ref<const Eigen::VectorXd>& a, std::span<const double> b)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[static_cast<std::size_t>(i)];
        s += d * d;
    }
    return std::sqrt(s);
}

struct Candidate {
    double length_scale = 1.0;
    double nll = std::numeric_limits<double>::infinity();
    double noise = 0.0;
    double sigma2 = 1.0;
    Eigen::MatrixXd chol;
    Eigen::VectorXd alpha;
};

// Concentrated negative log likelihood: the signal variance is profiled out.
Candidate evaluate(const Eigen::MatrixXd& x, const Eigen::VectorXd& z, double length_scale, double noise_floor)
{
    const auto n = x.rows();
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double k = matern52((x.row(i) - x.row(j)).norm(), length_scale);
            r(i, j) = k;
            r(j, i) = k;
        }
    }

    Candidate c;
    c.length_scale = length_scale;
    for (double noise = noise_floor; noise < 1.0; noise *= 10.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(r + noise * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() != Eigen::Success) continue;
        const Eigen::MatrixXd l = llt.matrixL();
        if ((l.diagonal().array() <= 0.0).any()) continue;
        c.alpha = llt.solve(z);
        c.sigma2 = std::max(z.dot(c.alpha) / static_cast<double>(n), 1e-300);
        c.nll = 0.5 * static_cast<double>(n) * std::log(c.sigma2) + l.diagonal().array().log().sum();
        c.noise = noise;
        c.chol = l;
        return c;
    }
    return c;
}

} // namespace

GpSurrogate fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y, const FitOptions& options)
{
    if (x.size() < 2 || x.size() != y.size()) throw std::invalid_argument("GP fit needs >= 2 matching (x, y) pairs");
    const auto n = static_cast<Eigen::Index>(x.size());
    const auto dims = static_cast<Eigen::Index>(x.front().size());

    GpSurrogate gp;
    gp.x_.resize(n, dims);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(x[static_cast<std::size_t>(i)].size()) != dims) {
            throw std::invalid_argument("GP inputs have inconsistent dimensionality");
        }
        for (Eigen::Index d = 0; d < dims; ++d) gp.x_(i, d) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
    }

    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    gp.y_mean_ = mean;
    gp.best_ = *std::max_element(y.begin(), y.end());

    if (var <= 1e-24 * std::max(1.0, mean * mean)) {
        gp.degenerate_ = true;
        gp.y_scale_ = 1.0;
        gp.signal_variance_ = 1.0;
        return gp;
    }
    gp.y_scale_ = std::sqrt(var);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = (y[static_cast<std::size_t>(i)] - mean) / gp.y_scale_;

    // Multi-start: coarse log-spaced grid, then golden-section refinement
    // around the best few grid points.
    const double lo = std::log(options.min_length_scale);
    const double hi = std::log(options.max_length_scale);
    const int m = std::max(options.grid_points, 3);
    const double h = (hi - lo) / (m - 1);
    std::vector<Candidate> grid;
    grid.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) grid.push_back(evaluate(gp.x_, z, std::exp(lo + h * i), options.noise_floor));

    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return grid[a].nll < grid[b].nll; });

    Candidate best = grid[static_cast<std::size_t>(order.front())];
    constexpr double kGolden = 0.6180339887498949;
    for (int s = 0; s < std::min(options.starts, m); ++s) {
        const int centre = order[static_cast<std::size_t>(s)];
        double a = lo + h * std::max(centre - 1, 0);
        double b = lo + h * std::min(centre + 1, m - 1);
        double c = b - kGolden * (b - a);
        double d = a + kGolden * (b - a);
        Candidate fc = evaluate(gp.x_, z, std::exp(c), options.noise_floor);
        Candidate fd = evaluate(gp.x_, z, std::exp(d), options.noise_floor);
        for (int it = 0; it < 40 && (b - a) > 1e-6; ++it) {
            if (fc.nll < fd.nll) {
                b = d;
                d = c;
                fd = std::move(fc);
                c = b - kGolden * (b - a);
                fc = evaluate(gp.x_, z, std::exp(c), options.noise_floor);
            } else {
                a = c;
                c = d;
                fc = std::move(fd);
                d = a + kGolden * (b - a);
                fd = evaluate(gp.x_, z, std::exp(d), options.noise_floor);
            }
        }
        for (auto* cand : {&fc, &fd}) {
            if (cand->nll < best.nll) best = std::move(*cand);
        }
    }
    if (!std::isfinite(best.nll)) throw std::runtime_error("GP fit failed: covariance never became positive definite");

    gp.length_scale_ = best.length_scale;
    gp.signal_variance_ = best.sigma2;
    gp.noise_ = best.noise;
    gp.chol_ = std::move(best.chol);
    gp.alpha_ = std::move(best.alpha);
    gp.log_likelihood_ = -best.nll;
    return gp;
}

GpSurrogate fit(const std::vector<Observation>& observations, const SearchSpace& space, const FitOptions& options)
{
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (const auto& o : observations) {
        x.push_back(space.normalized(o.point));
        y.push_back(o.failed ? 0.0 : o.objective);
    }
    return fit(x, y, options);
}

GpSurrogate::Prediction GpSurrogate::predict(std::span<const double> x) const
{
    if (degenerate_) return {y_mean_, y_scale_ * y_scale_ * signal_variance_};
    if (static_cast<Eigen::Index>(x.size()) != x_.cols()) throw std::invalid_argument("prediction point has wrong rank");

    const auto n = x_.rows();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) k[i] = matern52(distance(x_.row(i).transpose(), x), length_scale_);

    const double mean_z = k.dot(alpha_);
    const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
    const double var_z = std::max(0.0, signal_variance_ * (1.0 + noise_ - v.squaredNorm()));
    return {y_mean_ + y_scale_ * mean_z, y_scale_ * y_scale_ * var_z};
}

// --------------------------------------------------------------- acquisition

double expected_improvement(double mean, double variance, double best)
{
    const double improvement = mean - best;
    const double sd = std::sqrt(std::max(variance, 0.0));
    if (sd < 1e-12) return std::max(improvement, 0.0);
    const double z = improvement / sd;
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    return improvement * cdf + sd * pdf;
}

std::size_t acquire(const GpSurrogate& model, const SearchSpace& space, const std::vector<bool>& observed, Rng& rng)
{
    if (observed.size() != space.size()) throw std::invalid_argument("observed mask does not match the space");
    std::vector<std::size_t> best_points;
    double best_ei = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < space.size(); ++p) {
        if (observed[p]) continue;
        const auto pred = model.predict(space.normalized(p));
        const double ei = expected_improvement(pred.mean, pred.variance, model.best_observed());
        const double tol = best_points.empty() ? 0.0 : 1e-12 * std::max(1.0, std::abs(best_ei));
        if (best_points.empty() || ei > best_ei + tol) {
            best_ei = ei;
            best_points.assign(1, p);
        } else if (std::abs(ei - best_ei) <= tol) {
            best_points.push_back(p);
        }
    }
    if (best_points.empty()) throw SpaceExhausted();
    return best_points[rng.below(best_points.size())];
}

// ------------------------------------------------------------------ driver

OptimizeResult optimize(const Objective& objective, const SearchSpace& space, const OptimizeOptions& options)
{
    OptimizeResult result;
    std::vector<bool> observed(space.size(), false);
    std::size_t observed_count = 0;
    Rng rng(derive_seed(options.seed, "bo"));

    auto record = [&](std::size_t point, bool random) {
        Observation o;
        o.point = point;
        o.values = space.values_at(point);
        o.random = random;
        o.seed = options.seed;
        try {
            o.objective = objective(o.values);
            if (!std::isfinite(o.objective)) throw std::runtime_error("non-finite objective");
        } catch (const std::exception&) {
            o.failed = true;
            o.objective = 0.0;
        }
        observed[point] = true;
        ++observed_count;
        result.history.push_back(std::move(o));

        const auto& last = result.history.back();
        if (!last.failed && (!result.best || last.objective > result.history[*result.best].objective)) {
            result.best = result.history.size() - 1;
        }
        result.incumbent.push_back(result.best ? result.history[*result.best].objective : 0.0);
    };

    auto random_unobserved = [&] {
        std::size_t p = rng.below(space.size());
        while (observed[p]) p = rng.below(space.size());
        return p;
    };

    const std::size_t n_init = std::min(options.n_init, space.size());
    for (std::size_t i = 0; i < n_init; ++i) record(random_unobserved(), true);

    for (std::size_t it = 0; it < options.n_iter; ++it) {
        if (observed_count == space.size()) {
            result.exhausted = true;
            break;
        }
        std::size_t next = 0;
        if (result.history.size() < 2) {
            next = random_unobserved();
        } else {
            const auto model = fit(result.history, space, options.fit);
            next = acquire(model, space, observed, rng);
        }
        record(next, false);
    }
    if (observed_count == space.size()) result.exhausted = true;
    return result;
}

} // namespace sgnn::bopt
