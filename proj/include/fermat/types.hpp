#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <cmath>

namespace fermat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A chart point: spatial coordinates x (N-1 components) and coordinate time t.
struct Event {
    Vec x;
    double t = 0.0;

    Event() = default;
    Event(Vec x_, double t_) : x(std::move(x_)), t(t_) {}

    // Full coordinate vector (x_1 .. x_{N-1}, t), matching the tangent layout.
    Vec coords() const {
        Vec c(x.size() + 1);
        c.head(x.size()) = x;
        c(x.size()) = t;
        return c;
    }
    static Event from_coords(const Vec& c) {
        return Event(c.head(c.size() - 1), c(c.size() - 1));
    }
};

// A static observer: the worldline s -> (x_obs, s) with proper-time parameter
// restricted to the open interval t_range.
struct ObserverCurve {
    Vec x_obs;
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();

    bool contains_time(double t) const { return t > t_min && t < t_max; }
};

enum class ErrorCode {
    OutOfDomain,
    NotOnObserver,
    OutsideWorldlineDomain,
    DegenerateCurve,
    DegenerateMetric,
    BasisDegenerate,
    Validation,
    UnknownCatalog,
    NonConvergence,
    Io,
    Parse,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg,
          double param = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(msg), code_(code), param_(param) {}

    ErrorCode code() const { return code_; }
    // Optional scalar payload, e.g. the exit parameter s* of a domain violation.
    double param() const { return param_; }

private:
    ErrorCode code_;
    double param_;
};

} // namespace fermat
