#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bregman {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point lies outside the interior of a kernel (or conjugate) domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A parameter or configuration value is invalid.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The envelope is unbounded below at the requested step size.
class NotProxBounded : public Error {
public:
    explicit NotProxBounded(double lambda)
        : Error("not prox-bounded at this lambda (" + std::to_string(lambda) + ")"),
          lambda_(lambda) {}
    double lambda() const noexcept { return lambda_; }

private:
    double lambda_;
};

/// A formula that needs a single-valued prox was handed a multivalued one.
class MultivaluedProx : public Error {
public:
    MultivaluedProx(const std::string& what, std::vector<Vector> minimizers)
        : Error(what), minimizers_(std::move(minimizers)) {}
    const std::vector<Vector>& minimizers() const noexcept { return minimizers_; }

private:
    std::vector<Vector> minimizers_;
};

inline Vector scalar_point(double x) {
    Vector v(1);
    v[0] = x;
    return v;
}

inline Vector make_point(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Neumaier-compensated dot product.
inline double compensated_dot(const Vector& a, const Vector& b) {
    double sum = 0.0;
    double comp = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double term = a[i] * b[i];
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

/// Axis-aligned box [lower, upper] in R^m.
struct Box {
    Vector lower;
    Vector upper;

    Eigen::Index dim() const { return lower.size(); }
    bool contains(const Vector& x) const {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] < lower[i] || x[i] > upper[i]) return false;
        return true;
    }
    Vector clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

inline Box make_box(double lo, double hi, Eigen::Index dim = 1) {
    return Box{Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
}

inline Box make_box(const Vector& lo, const Vector& hi) { return Box{lo, hi}; }

}  // namespace bregman
