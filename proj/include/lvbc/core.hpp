#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lvbc/error.hpp"

namespace lvbc {

/// Tolerance on the carrying-capacity box [0,1]; larger excursions are errors.
inline constexpr double kBoxTolerance = 1e-12;

/// Competition coefficients of the two-species system. `a` is the pressure
/// species 2 exerts on species 1, `b` the reverse.
///
/// Any positive pair is constructible; operations that need the strong
/// competition regime (b > max(a, 1)) test `strong_competition()` themselves.
class CompetitionParams {
public:
    CompetitionParams(double a, double b) : a_(a), b_(b) {
        if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
            std::ostringstream os;
            os << "competition coefficients must be positive, got a=" << a << ", b=" << b;
            fail(ErrorKind::InvalidArgument, os.str());
        }
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    bool strong_competition() const noexcept { return b_ > std::max(a_, 1.0); }

    /// Reaction terms y1(1 - y1 - a y2) and y2(1 - b y1 - y2).
    double reaction1(double y1, double y2) const noexcept { return y1 * (1.0 - y1 - a_ * y2); }
    double reaction2(double y1, double y2) const noexcept { return y2 * (1.0 - b_ * y1 - y2); }

private:
    double a_;
    double b_;
};

/// Uniform grid of n nodes on [0, L].
class Grid1D {
public:
    Grid1D(double length, std::size_t nodes) : length_(length), n_(nodes) {
        if (!(length > 0.0) || !std::isfinite(length)) {
            fail(ErrorKind::InvalidArgument, "grid length must be positive");
        }
        if (nodes < 3) {
            fail(ErrorKind::InvalidArgument, "grid needs at least 3 nodes, got " + std::to_string(nodes));
        }
        dx_ = length_ / static_cast<double>(n_ - 1);
    }

    double length() const noexcept { return length_; }
    std::size_t size() const noexcept { return n_; }
    double dx() const noexcept { return dx_; }

    /// Abscissa of node i. The last node is pinned to L exactly.
    double x(std::size_t i) const noexcept {
        return i + 1 == n_ ? length_ : static_cast<double>(i) * dx_;
    }

    std::vector<double> nodes() const {
        std::vector<double> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
        return out;
    }

    bool operator==(const Grid1D& other) const noexcept {
        return n_ == other.n_ && length_ == other.length_;
    }

private:
    double length_;
    std::size_t n_;
    double dx_ = 0.0;
};

inline Grid1D make_grid(double length, std::size_t nodes) { return Grid1D(length, nodes); }

/// Density profiles of both species at time t.
struct SpeciesState {
    double t = 0.0;
    std::vector<double> y1;
    std::vector<double> y2;

    std::size_t size() const noexcept { return y1.size(); }

    static SpeciesState constant(const Grid1D& grid, double v1, double v2, double t = 0.0) {
        return SpeciesState{t, std::vector<double>(grid.size(), v1), std::vector<double>(grid.size(), v2)};
    }
};

/// Worst box violation found in a state; value is the signed excess.
struct BoxViolation {
    int species = 0;
    std::size_t node = 0;
    double value = 0.0;
};

inline std::optional<BoxViolation> find_box_violation(const SpeciesState& s, double tol = kBoxTolerance) {
    std::optional<BoxViolation> worst;
    double worst_excess = tol;
    auto scan = [&](const std::vector<double>& y, int species) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double excess = std::max(-y[i], y[i] - 1.0);
            if (!(excess <= worst_excess)) {  // also catches NaN
                worst_excess = std::isnan(excess) ? std::numeric_limits<double>::infinity() : excess;
                worst = BoxViolation{species, i, y[i]};
            }
        }
    };
    scan(s.y1, 1);
    scan(s.y2, 2);
    return worst;
}

/// Throws a stability error on violations above `tol`, otherwise clamps into [0,1].
inline void enforce_box(SpeciesState& s, const Grid1D& grid, double tol = kBoxTolerance) {
    if (auto v = find_box_violation(s, tol)) {
        std::ostringstream os;
        os.precision(12);
        os << "box violated at t=" << s.t << ": y" << v->species << "[" << v->node << "] (x=" << grid.x(v->node)
           << ") = " << v->value;
        fail(ErrorKind::Stability, os.str());
    }
    for (auto* y : {&s.y1, &s.y2}) {
        for (double& v : *y) v = std::clamp(v, 0.0, 1.0);
    }
}

// ---------------------------------------------------------------------------
// Boundary controls

struct DirichletConst {
    double value;
};

/// Piecewise-constant Dirichlet data: values[k] holds on [breakpoints[k], breakpoints[k+1]).
struct DirichletPiecewise {
    std::vector<double> breakpoints;
    std::vector<double> values;

    double at(double t) const {
        auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
        const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - breakpoints.begin()) - 1));
        return values[std::min(k, values.size() - 1)];
    }
};

struct NeumannZero {};

using ChannelControl = std::variant<DirichletConst, DirichletPiecewise, NeumannZero>;

enum class Endpoint { Left = 0, Right = 1 };

/// Boundary data for the four channels (species x endpoint).
class BoundaryControl {
public:
    BoundaryControl() : BoundaryControl(DirichletConst{0.0}, DirichletConst{0.0}, DirichletConst{1.0}, DirichletConst{1.0}) {}

    BoundaryControl(ChannelControl y1_left, ChannelControl y1_right, ChannelControl y2_left, ChannelControl y2_right)
        : channels_{std::move(y1_left), std::move(y1_right), std::move(y2_left), std::move(y2_right)} {
        for (const auto& c : channels_) validate(c);
    }

    /// Same constant pair (u1, u2) at both endpoints.
    static BoundaryControl constant(double u1, double u2) {
        return BoundaryControl(DirichletConst{u1}, DirichletConst{u1}, DirichletConst{u2}, DirichletConst{u2});
    }

    static BoundaryControl neumann() {
        return BoundaryControl(NeumannZero{}, NeumannZero{}, NeumannZero{}, NeumannZero{});
    }

    /// Channel index: 0 = y1 left, 1 = y1 right, 2 = y2 left, 3 = y2 right.
    static constexpr std::size_t channel_index(int species, Endpoint e) {
        return static_cast<std::size_t>((species - 1) * 2 + static_cast<int>(e));
    }

    const ChannelControl& channel(int species, Endpoint e) const { return channels_[channel_index(species, e)]; }
    const std::array<ChannelControl, 4>& channels() const noexcept { return channels_; }

    /// Dirichlet value at time t, or nullopt for a zero-flux channel.
    std::optional<double> value(int species, Endpoint e, double t) const {
        return channel_value(channel(species, e), t);
    }

    static std::optional<double> channel_value(const ChannelControl& c, double t) {
        if (const auto* d = std::get_if<DirichletConst>(&c)) return d->value;
        if (const auto* p = std::get_if<DirichletPiecewise>(&c)) return p->at(t);
        return std::nullopt;
    }

    bool is_neumann(int species, Endpoint e) const {
        return std::holds_alternative<NeumannZero>(channel(species, e));
    }

    /// True when all four channels are constant Dirichlet data equal to (u1, u2).
    bool is_constant(double u1, double u2) const {
        auto eq = [](const ChannelControl& c, double v) {
            const auto* d = std::get_if<DirichletConst>(&c);
            return d != nullptr && d->value == v;
        };
        return eq(channels_[0], u1) && eq(channels_[1], u1) && eq(channels_[2], u2) && eq(channels_[3], u2);
    }

private:
    static void validate(const ChannelControl& c) {
        auto in_box = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (const auto* d = std::get_if<DirichletConst>(&c)) {
            if (!in_box(d->value)) fail(ErrorKind::InvalidArgument, "Dirichlet control outside [0,1]");
        } else if (const auto* p = std::get_if<DirichletPiecewise>(&c)) {
            if (p->breakpoints.empty() || p->breakpoints.size() != p->values.size()) {
                fail(ErrorKind::InvalidArgument, "piecewise control needs one value per breakpoint");
            }
            if (p->breakpoints.front() != 0.0) {
                fail(ErrorKind::InvalidArgument, "piecewise control breakpoints must start at 0");
            }
            for (std::size_t k = 1; k < p->breakpoints.size(); ++k) {
                if (!(p->breakpoints[k] > p->breakpoints[k - 1])) {
                    fail(ErrorKind::InvalidArgument, "piecewise control breakpoints must increase strictly");
                }
            }
            if (!std::all_of(p->values.begin(), p->values.end(), in_box)) {
                fail(ErrorKind::InvalidArgument, "piecewise control value outside [0,1]");
            }
        }
    }

    std::array<ChannelControl, 4> channels_;
};

// ---------------------------------------------------------------------------
// Equilibria of the kinetic system

struct CoexistencePoint {
    double w1;
    double w2;
};

/// Interior equilibrium ((a-1)/(ab-1), (b-1)/(ab-1)); absent when it leaves the box (a < 1).
inline std::optional<CoexistencePoint> coexistence_equilibrium(const CompetitionParams& p) {
    const double det = p.a() * p.b() - 1.0;
    if (det == 0.0) fail(ErrorKind::SingularParameters, "ab = 1: coexistence equilibrium undefined");
    if (p.a() < 1.0) return std::nullopt;
    return CoexistencePoint{(p.a() - 1.0) / det, (p.b() - 1.0) / det};
}

/// Upper end (a-1)/(b-1) of the segment on which the separatrix is given.
inline double separatrix_extent(const CompetitionParams& p) { return (p.a() - 1.0) / (p.b() - 1.0); }

/// Stable manifold of the coexistence saddle: w2 = ((b-1)/(a-1)) w1.
inline double separatrix_value(const CompetitionParams& p, double y) {
    if (!(p.a() > 1.0)) fail(ErrorKind::RegimeViolation, "separatrix requires a > 1");
    if (!(p.b() > 1.0)) fail(ErrorKind::RegimeViolation, "separatrix requires b > 1");
    if (!(y >= 0.0) || y > separatrix_extent(p)) {
        fail(ErrorKind::Domain, "separatrix argument outside [0, (a-1)/(b-1)]");
    }
    return (p.b() - 1.0) / (p.a() - 1.0) * y;
}

}  // namespace lvbc
