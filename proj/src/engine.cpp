#include "pfdsim/engine.hpp"

#include "mna.hpp"
#include "pfdsim/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace pfdsim {

std::string_view to_string(Integrator i) noexcept
{
    return i == Integrator::BackwardEuler ? "backward_euler" : "trapezoidal";
}

Integrator parse_integrator(std::string_view s)
{
    if (s == "backward_euler" || s == "be")
        return Integrator::BackwardEuler;
    if (s == "trapezoidal" || s == "trap")
        return Integrator::Trapezoidal;
    throw InvalidArgument("unknown integrator '" + std::string(s) + "' (expected trapezoidal or backward_euler)");
}

void SimOptions::validate() const
{
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be > 0");
    if (!(t_stop > dt))
        throw InvalidArgument("t_stop must be > dt");
    if (!(reltol > 0.0))
        throw InvalidArgument("reltol must be > 0");
    if (!(abstol_v > 0.0) || !(abstol_i > 0.0))
        throw InvalidArgument("abstol_v and abstol_i must be > 0");
    if (max_newton_iters < 1)
        throw InvalidArgument("max_newton_iters must be >= 1");
    if (!(gmin >= 0.0))
        throw InvalidArgument("gmin must be >= 0");
    if (!(max_node_step > 0.0))
        throw InvalidArgument("max_node_step must be > 0");
    if (max_step_halvings < 0)
        throw InvalidArgument("max_step_halvings must be >= 0");
}

double default_time_step(double fastest_period) noexcept
{
    return std::min(0.5e-12, fastest_period / 2000.0);
}

namespace {

using Eigen::VectorXd;

/// Capacitor companion currents i = geq * v_ab + hist for one step.
struct Companion {
    std::vector<double> geq;
    std::vector<double> hist;
};

class NewtonSolver {
public:
    NewtonSolver(const mna::Circuit& c, const SimOptions& opt)
        : c_(c), opt_(opt), jac_(c.size(), c.size()), res_{VectorXd(c.size()), VectorXd(c.size())}
    {
    }

    struct Outcome {
        bool converged = false;
        mna::WorstRow worst;
    };

    /// Iterates x in place. On success x is a point whose residual met the
    /// tolerance.
    Outcome solve(VectorXd& x, double t, double gmin, const Companion* comp)
    {
        Outcome out;
        const int n = c_.num_nodes();
        for (int it = 0; it < opt_.max_newton_iters; ++it) {
            assemble(x, t, gmin, comp);
            out.worst = mna::worst_node_residual(c_, res_, opt_);
            bool branch_ok = true;
            for (int b = n; b < c_.size(); ++b)
                branch_ok = branch_ok && std::abs(res_.f[b]) <= opt_.abstol_v;
            if (!res_.f.allFinite())
                return out;

            lu_.compute(jac_);
            const VectorXd delta = lu_.solve(-res_.f);
            if (!delta.allFinite())
                return out;

            bool small = true;
            for (int i = 0; i < c_.size() && small; ++i) {
                const double tol = i < n ? opt_.reltol * std::abs(x[i]) + opt_.abstol_v
                                         : opt_.reltol * std::abs(x[i]) + opt_.abstol_i;
                small = std::abs(delta[i]) <= tol;
            }
            if (small && branch_ok && out.worst.ratio <= 1.0) {
                out.converged = true;
                return out;
            }
            for (int i = 0; i < n; ++i)
                x[i] += std::clamp(delta[i], -opt_.max_node_step, opt_.max_node_step);
            for (int i = n; i < c_.size(); ++i)
                x[i] += delta[i];
        }
        assemble(x, t, gmin, comp);
        out.worst = mna::worst_node_residual(c_, res_, opt_);
        return out;
    }

private:
    void assemble(const VectorXd& x, double t, double gmin, const Companion* comp)
    {
        jac_.setZero();
        res_.f.setZero();
        res_.scale.setZero();
        mna::stamp_static(c_, x, t, gmin, res_, &jac_);
        if (!comp)
            return;
        for (std::size_t k = 0; k < c_.caps.size(); ++k) {
            const mna::Cap& cap = c_.caps[k];
            const double g = comp->geq[k];
            mna::add_branch_current(res_, cap.a, cap.b,
                                    g * (mna::voltage(x, cap.a) - mna::voltage(x, cap.b)) + comp->hist[k]);
            if (cap.a != mna::kGround) {
                jac_(cap.a, cap.a) += g;
                if (cap.b != mna::kGround)
                    jac_(cap.a, cap.b) -= g;
            }
            if (cap.b != mna::kGround) {
                jac_(cap.b, cap.b) += g;
                if (cap.a != mna::kGround)
                    jac_(cap.b, cap.a) -= g;
            }
        }
    }

    const mna::Circuit& c_;
    const SimOptions& opt_;
    Eigen::MatrixXd jac_;
    mna::Residual res_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

std::string node_label(const mna::Circuit& c, int index)
{
    return index >= 0 && index < c.num_nodes() ? c.node_names[index] : std::string("?");
}

VectorXd solve_dc(const mna::Circuit& c, const SimOptions& opt, double t)
{
    NewtonSolver newton(c, opt);
    VectorXd x = VectorXd::Zero(c.size());
    auto out = newton.solve(x, t, opt.gmin, nullptr);
    if (out.converged)
        return x;

    // gmin stepping: 1e-3 S, then x0.1 per pass down to the target.
    x.setZero();
    for (double g = 1e-3; g > opt.gmin; g *= 0.1) {
        out = newton.solve(x, t, g, nullptr);
        if (!out.converged)
            break;
    }
    if (out.converged)
        out = newton.solve(x, t, opt.gmin, nullptr);
    if (!out.converged) {
        const std::string node = node_label(c, out.worst.index);
        throw SolverError("DC operating point did not converge after gmin stepping (worst node " + node +
                              ", residual " + text::format_double(out.worst.residual) + " A)",
                          -1.0, node);
    }
    return x;
}

} // namespace

NodeVoltages dc_operating_point(const Netlist& netlist, const SimOptions& options)
{
    options.validate();
    const mna::Circuit c = mna::compile(netlist);
    const VectorXd x = solve_dc(c, options, 0.0);
    NodeVoltages out;
    if (netlist.ground())
        out[*netlist.ground()] = 0.0;
    for (int i = 0; i < c.num_nodes(); ++i)
        out[c.node_names[i]] = x[i];
    return out;
}

// --- transient -----------------------------------------------------------------

class TransientRecorder {
public:
    TransientRecorder(const Netlist& netlist, const mna::Circuit& c)
        : c_(c)
    {
        r_.node_names_ = c.node_names;
        r_.node_values_.resize(c.node_names.size());
        for (const mna::Src& s : c.sources)
            r_.source_names_.push_back(s.name);
        r_.source_values_.resize(c.sources.size());
        if (netlist.probes().empty()) {
            for (std::size_t i = 0; i < c.node_names.size(); ++i) {
                r_.probe_names_.push_back(c.node_names[i]);
                r_.probe_nodes_.push_back(i);
            }
        } else {
            for (const auto& [alias, node] : netlist.probes()) {
                const int idx = c.node_index(node);
                if (idx == mna::kGround)
                    continue;  // a ground probe carries no information
                r_.probe_names_.push_back(alias);
                r_.probe_nodes_.push_back(static_cast<std::size_t>(idx));
            }
        }
        r_.supply_ = netlist.supply();
    }

    void record(double t, const Eigen::VectorXd& x)
    {
        r_.time_.push_back(t);
        const int n = c_.num_nodes();
        for (int i = 0; i < n; ++i)
            r_.node_values_[i].push_back(x[i]);
        // Delivered current is the negative of the branch unknown.
        for (std::size_t k = 0; k < c_.sources.size(); ++k)
            r_.source_values_[k].push_back(-x[n + static_cast<int>(k)]);
    }

    TransientResult take() { return std::move(r_); }

private:
    const mna::Circuit& c_;
    TransientResult r_;
};

namespace {

std::vector<double> time_grid(const mna::Circuit& c, const SimOptions& opt)
{
    struct Point {
        double t;
        bool breakpoint;
    };
    std::vector<Point> pts;
    const auto steps = static_cast<long long>(std::ceil(opt.t_stop / opt.dt - 1e-9));
    for (long long k = 0; k < steps; ++k)
        pts.push_back({static_cast<double>(k) * opt.dt, false});
    pts.push_back({opt.t_stop, true});
    for (const mna::Src& s : c.sources)
        if (const auto* p = std::get_if<PulseSpec>(&s.wave))
            for (double t : p->breakpoints(0.0, opt.t_stop))
                pts.push_back({t, true});
    std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.t < b.t; });

    // Merge points closer than a thousandth of a step, keeping breakpoints.
    const double eps = 1e-3 * opt.dt;
    std::vector<Point> merged;
    for (const Point& p : pts) {
        if (!merged.empty() && p.t - merged.back().t < eps) {
            if (p.breakpoint && !merged.back().breakpoint && merged.size() > 1)
                merged.back() = p;
            continue;
        }
        merged.push_back(p);
    }
    std::vector<double> out;
    out.reserve(merged.size());
    for (const Point& p : merged)
        out.push_back(p.t);
    return out;
}

class Integration {
public:
    Integration(const mna::Circuit& c, const SimOptions& opt, TransientRecorder& rec)
        : c_(c), opt_(opt), rec_(rec), newton_(c, opt), v_prev_(c.caps.size()), i_prev_(c.caps.size(), 0.0)
    {
        comp_.geq.resize(c.caps.size());
        comp_.hist.resize(c.caps.size());
    }

    void start(const Eigen::VectorXd& x0)
    {
        x_ = x0;
        for (std::size_t k = 0; k < c_.caps.size(); ++k)
            v_prev_[k] = cap_voltage(k, x_);
        rec_.record(0.0, x_);
    }

    void advance(double t0, double t1, int depth)
    {
        const double h = t1 - t0;
        const bool trap = opt_.integrator == Integrator::Trapezoidal;
        for (std::size_t k = 0; k < c_.caps.size(); ++k) {
            const double g = (trap ? 2.0 : 1.0) * c_.caps[k].c / h;
            comp_.geq[k] = g;
            comp_.hist[k] = -g * v_prev_[k] - (trap ? i_prev_[k] : 0.0);
        }
        Eigen::VectorXd x = x_;
        const auto out = newton_.solve(x, t1, opt_.gmin, &comp_);
        if (!out.converged) {
            if (depth >= opt_.max_step_halvings) {
                const std::string node = node_label(c_, out.worst.index);
                throw SolverError("transient Newton failed at t=" + text::format_double(t1) +
                                      " s after step halving (worst node " + node + ")",
                                  t1, node);
            }
            const double tm = t0 + 0.5 * h;
            advance(t0, tm, depth + 1);
            advance(tm, t1, depth + 1);
            return;
        }
        x_ = x;
        for (std::size_t k = 0; k < c_.caps.size(); ++k) {
            const double v = cap_voltage(k, x_);
            i_prev_[k] = comp_.geq[k] * v + comp_.hist[k];
            v_prev_[k] = v;
        }
        rec_.record(t1, x_);
    }

private:
    double cap_voltage(std::size_t k, const Eigen::VectorXd& x) const
    {
        return mna::voltage(x, c_.caps[k].a) - mna::voltage(x, c_.caps[k].b);
    }

    const mna::Circuit& c_;
    const SimOptions& opt_;
    TransientRecorder& rec_;
    NewtonSolver newton_;
    Companion comp_;
    Eigen::VectorXd x_;
    std::vector<double> v_prev_;
    std::vector<double> i_prev_;
};

} // namespace

TransientResult transient(const Netlist& netlist, const SimOptions& options)
{
    options.validate();
    const mna::Circuit c = mna::compile(netlist);
    TransientRecorder rec(netlist, c);
    Integration integ(c, options, rec);
    integ.start(solve_dc(c, options, 0.0));
    const std::vector<double> grid = time_grid(c, options);
    for (std::size_t i = 1; i < grid.size(); ++i)
        integ.advance(grid[i - 1], grid[i], 0);
    return rec.take();
}

// --- result access ---------------------------------------------------------------

namespace {

template <class Names>
std::size_t find_name(const Names& names, std::string_view name, const char* what)
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return i;
    throw InvalidArgument(std::string("unknown ") + what + ": " + std::string(name));
}

} // namespace

WaveformView TransientResult::node(std::string_view name) const
{
    return {time_, node_values_[find_name(node_names_, name, "node")]};
}

WaveformView TransientResult::probe(std::string_view alias) const
{
    return {time_, node_values_[probe_nodes_[find_name(probe_names_, alias, "probe")]]};
}

WaveformView TransientResult::source_current(std::string_view name) const
{
    return {time_, source_values_[find_name(source_names_, name, "source")]};
}

WaveformView supply_current(const TransientResult& result)
{
    if (!result.supply_name())
        throw InvalidArgument("no supply source present");
    return result.source_current(*result.supply_name());
}

void write_csv(std::ostream& out, const TransientResult& result)
{
    std::vector<WaveformView> cols;
    out << 't';
    for (const std::string& p : result.probe_names()) {
        out << ',' << p;
        cols.push_back(result.probe(p));
    }
    if (result.supply_name()) {
        out << ",i_vdd";
        cols.push_back(supply_current(result));
    }
    out << '\n';
    for (std::size_t i = 0; i < result.size(); ++i) {
        out << text::format_double(result.time()[i]);
        for (const WaveformView& w : cols)
            out << ',' << text::format_double(w.value[i]);
        out << '\n';
    }
}

KclReport verify_kcl(const Netlist& netlist, const SimOptions& options, const TransientResult& result)
{
    const mna::Circuit c = mna::compile(netlist);
    const int n = c.num_nodes();
    const bool trap = options.integrator == Integrator::Trapezoidal;

    std::vector<WaveformView> nodes;
    for (const std::string& name : c.node_names)
        nodes.push_back(result.node(name));
    std::vector<WaveformView> sources;
    for (const mna::Src& s : c.sources)
        sources.push_back(result.source_current(s.name));

    KclReport rep;
    std::vector<double> i_cap(c.caps.size(), 0.0);
    Eigen::VectorXd x(c.size()), x_prev(c.size());
    mna::Residual res{Eigen::VectorXd(c.size()), Eigen::VectorXd(c.size())};
    const auto& t = result.time();
    for (std::size_t p = 0; p < t.size(); ++p) {
        for (int i = 0; i < n; ++i)
            x[i] = nodes[i].value[p];
        for (std::size_t k = 0; k < sources.size(); ++k)
            x[n + static_cast<int>(k)] = -sources[k].value[p];
        res.f.setZero();
        res.scale.setZero();
        mna::stamp_static(c, x, t[p], options.gmin, res, nullptr);
        if (p > 0) {
            const double h = t[p] - t[p - 1];
            for (std::size_t k = 0; k < c.caps.size(); ++k) {
                const mna::Cap& cap = c.caps[k];
                const double dv = (mna::voltage(x, cap.a) - mna::voltage(x, cap.b)) -
                                  (mna::voltage(x_prev, cap.a) - mna::voltage(x_prev, cap.b));
                i_cap[k] = trap ? 2.0 * cap.c / h * dv - i_cap[k] : cap.c / h * dv;
                mna::add_branch_current(res, cap.a, cap.b, i_cap[k]);
            }
        }
        const mna::WorstRow w = mna::worst_node_residual(c, res, options);
        if (w.ratio > rep.worst_ratio || rep.points_checked == 0) {
            rep.worst_ratio = w.ratio;
            rep.worst_residual = w.residual;
            rep.worst_time = t[p];
            rep.worst_node = node_label(c, w.index);
        }
        ++rep.points_checked;
        x_prev = x;
    }
    return rep;
}

} // namespace pfdsim
