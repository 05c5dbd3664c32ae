#pragma once

// Internal MNA representation shared by the solver and the KCL verifier.
// Unknowns: non-ground node voltages, then one branch current per voltage
// source (current into the plus terminal, through the source).

#include "pfdsim/engine.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pfdsim::mna {

inline constexpr int kGround = -1;

struct Fet {
    int d, g, s;
    MosfetParams params;
};

struct Res {
    int a, b;
    double g;
};

struct Cap {
    int a, b;
    double c;
};

struct Src {
    std::string name;
    int plus, minus;
    std::variant<double, PulseSpec> wave;

    [[nodiscard]] double value(double t) const
    {
        if (const double* v = std::get_if<double>(&wave))
            return *v;
        return std::get<PulseSpec>(wave).value(t);
    }
};

struct Circuit {
    std::vector<std::string> node_names;  // non-ground only
    std::vector<Fet> fets;
    std::vector<Res> resistors;
    std::vector<Cap> caps;  // explicit capacitors followed by FET gate caps
    std::vector<Src> sources;

    [[nodiscard]] int num_nodes() const noexcept { return static_cast<int>(node_names.size()); }
    [[nodiscard]] int size() const noexcept { return num_nodes() + static_cast<int>(sources.size()); }
    [[nodiscard]] int node_index(std::string_view name) const;
};

/// Throws InvalidArgument when the netlist has validation violations.
[[nodiscard]] Circuit compile(const Netlist& netlist);

[[nodiscard]] inline double voltage(const Eigen::VectorXd& x, int node) noexcept
{
    return node == kGround ? 0.0 : x[node];
}

/// Residual F (net current leaving each node; constraint error for source
/// rows) plus, per node, the largest single current magnitude flowing into
/// it. Capacitor currents are supplied by the caller.
struct Residual {
    Eigen::VectorXd f;
    Eigen::VectorXd scale;
};

/// Adds every non-capacitor contribution at x to `res` and, when `jac` is
/// non-null, to the Jacobian.
void stamp_static(const Circuit& c, const Eigen::VectorXd& x, double t, double gmin, Residual& res,
                  Eigen::MatrixXd* jac);

/// Adds a current i flowing a -> b through a two-terminal element.
inline void add_branch_current(Residual& res, int a, int b, double i) noexcept
{
    const double m = std::abs(i);
    if (a != kGround) {
        res.f[a] += i;
        res.scale[a] = std::max(res.scale[a], m);
    }
    if (b != kGround) {
        res.f[b] -= i;
        res.scale[b] = std::max(res.scale[b], m);
    }
}

/// Ratio |F| / (abstol + reltol * scale) for node rows; the largest one and
/// its index.
struct WorstRow {
    double ratio = 0.0;
    double residual = 0.0;
    int index = -1;
};
[[nodiscard]] WorstRow worst_node_residual(const Circuit& c, const Residual& res, const SimOptions& opt) noexcept;

} // namespace pfdsim::mna
