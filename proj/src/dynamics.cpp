#include "nls/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace nls {

void EquationParams::validate() const
{
    if (n < 1 || n > 3) throw InvalidParameter("simulation dimension must be 1, 2 or 3");
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidExponent("power exponent p must be positive");
    if (n >= 3 && p > 4.0 / (n - 2)) throw InvalidExponent("p exceeds the energy-critical 4/(n-2)");
    if (!(gamma > 0.0) || gamma > n || gamma > 4.0)
        throw InvalidExponent("Hartree exponent must satisfy 0 < gamma <= min(n, 4)");
    if (!std::isfinite(lambda1) || !std::isfinite(lambda2))
        throw InvalidParameter("couplings must be finite");
}

std::vector<std::string> EquationParams::scope_notes() const
{
    std::vector<std::string> notes;
    if (n < 3) notes.emplace_back("dimension n < 3 is outside the analyzed range n >= 3");
    if (gamma >= n) notes.emplace_back("gamma = n: Hartree term reduces to a local |u|^2 potential");
    if (lambda1 == 0.0 || lambda2 == 0.0) notes.emplace_back("a coupling is zero");
    return notes;
}

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::completed: return "completed";
    case Termination::guard_tripped: return "guard_tripped";
    case Termination::nonfinite: return "nonfinite";
    }
    return "unknown";
}

void EvolutionConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidParameter("t_end must be >= 0");
    if (cadence < 1) throw InvalidParameter("observer cadence must be >= 1");
    if (!(guard_amplitude > 0.0) || !(guard_gradient_factor > 0.0))
        throw InvalidParameter("guards must be positive");
}

namespace {

/// Strang substeps on raw arrays with cached multipliers.
class SplitStepper {
public:
    SplitStepper(const GridSpec& grid, const EquationParams& params, bool dealias)
        : grid_(grid), params_(params), ctx_(spectral_context(grid)), dealias_(dealias)
    {
    }

    void nonlinear(Eigen::ArrayXcd& u, double tau)
    {
        if (params_.lambda1 == 0.0 && params_.lambda2 == 0.0) return;
        const Eigen::ArrayXd density = u.abs2();
        potential_.setZero(density.size());
        if (params_.lambda1 != 0.0) {
            if (params_.p == 2.0)
                potential_ = params_.lambda1 * density;
            else
                potential_ = params_.lambda1 * density.pow(0.5 * params_.p);
        }
        if (params_.lambda2 != 0.0) {
            ctx_.forward_real(density, half_);
            half_ *= ctx_.riesz_multiplier_half(grid_.dim - params_.gamma, ZeroMode::drop)
                   / static_cast<double>(grid_.size());
            ctx_.backward_real(half_, scratch_real_);
            potential_ += params_.lambda2 * scratch_real_;
        }
        const Eigen::ArrayXd phase = -tau * potential_;
        u *= phase.cos().cast<cplx>() + cplx(0.0, 1.0) * phase.sin().cast<cplx>();
        if (!u.isFinite().all()) throw NonFinite("nonlinear substep produced non-finite values");
        if (dealias_) u = dealias(ComplexField(grid_, u)).values;
    }

    /// Free propagation by h. Returns ||grad u||^2, read off the spectrum.
    double linear(Eigen::ArrayXcd& u, double h)
    {
        if (h != cached_h_) {
            propagator_ = (cplx(0.0, -h) * ctx_.k_squared().cast<cplx>()).exp()
                        / static_cast<double>(grid_.size());
            cached_h_ = h;
        }
        ctx_.forward(u, hat_);
        const double N = static_cast<double>(grid_.size());
        const double grad_sq = (ctx_.k_squared() * hat_.abs2()).sum() * grid_.box_volume() / (N * N);
        hat_ *= propagator_;
        ctx_.backward(hat_, u);
        return grad_sq;
    }

private:
    GridSpec grid_;
    EquationParams params_;
    const SpectralContext& ctx_;
    bool dealias_;
    double cached_h_ = std::numeric_limits<double>::quiet_NaN();
    Eigen::ArrayXcd propagator_;
    Eigen::ArrayXcd hat_;
    Eigen::ArrayXcd half_;
    Eigen::ArrayXd potential_;
    Eigen::ArrayXd scratch_real_;
};

} // namespace

ComplexField nonlinear_phase_step(const ComplexField& u, double dt, const EquationParams& params)
{
    SplitStepper stepper(u.grid, params, false);
    ComplexField out = u;
    stepper.nonlinear(out.values, dt);
    return out;
}

ComplexField linear_step(const ComplexField& u, double dt)
{
    EquationParams free{u.grid.dim, 2.0, 1.0, 0.0, 0.0};
    SplitStepper stepper(u.grid, free, false);
    ComplexField out = u;
    stepper.linear(out.values, dt);
    return out;
}

ComplexField strang_step(const ComplexField& u, double dt, const EquationParams& params)
{
    SplitStepper stepper(u.grid, params, false);
    ComplexField out = u;
    stepper.nonlinear(out.values, 0.5 * dt);
    stepper.linear(out.values, dt);
    stepper.nonlinear(out.values, 0.5 * dt);
    return out;
}

Trajectory evolve(const ComplexField& u0, const EquationParams& params,
                  const EvolutionConfig& config, const std::vector<Observer>& observers)
{
    config.validate();
    if (!u0.all_finite()) throw NonFinite("initial datum is not finite");

    Trajectory traj;
    traj.final_state = u0;
    traj.gradient_norm_initial = h1_seminorm(u0);
    traj.gradient_norm = traj.gradient_norm_initial;
    traj.max_amplitude = std::sqrt(u0.values.abs2().maxCoeff());

    auto notify = [&](double t, const ComplexField& u) {
        traj.sample_times.push_back(t);
        for (const auto& obs : observers) obs(t, u);
    };
    notify(0.0, u0);
    if (config.t_end == 0.0) return traj;

    const long total = std::max(1L, static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9)));
    const double gradient_limit = config.guard_gradient_factor * traj.gradient_norm_initial;

    SplitStepper stepper(u0.grid, params, config.dealias);
    Eigen::ArrayXcd u = u0.values;
    Eigen::ArrayXcd last_good = u;
    double t = 0.0;
    // Half nonlinear substep owed from the previous step; consecutive halves
    // are merged into one rotation since the exact flows compose.
    double pending = 0.0;

    try {
        for (long s = 1; s <= total; ++s) {
            const double h = (s == total) ? config.t_end - (total - 1) * config.dt : config.dt;
            stepper.nonlinear(u, pending + 0.5 * h);
            const double grad_sq = stepper.linear(u, h);
            t = (s == total) ? config.t_end : s * config.dt;
            const double amp = std::sqrt(u.abs2().maxCoeff());
            const double grad = std::sqrt(grad_sq);
            const bool tripped = !(amp <= config.guard_amplitude) || !(grad <= gradient_limit);
            const bool observe = (s % config.cadence == 0) || s == total || tripped;
            if (observe) {
                stepper.nonlinear(u, 0.5 * h);
                pending = 0.0;
            } else {
                pending = 0.5 * h;
            }
            traj.steps = s;
            traj.max_amplitude = amp;
            traj.gradient_norm = grad;
            if (observe) {
                last_good = u;
                traj.t_final = t;
                notify(t, ComplexField(u0.grid, u));
            }
            if (tripped) {
                traj.termination = Termination::guard_tripped;
                break;
            }
        }
    } catch (const NonFinite&) {
        traj.termination = Termination::nonfinite;
        traj.final_state = ComplexField(u0.grid, last_good);
        return traj;
    }
    traj.final_state = ComplexField(u0.grid, std::move(u));
    return traj;
}

ComplexField flow_nonlinearity(const ComplexField& phi, const EquationParams& params, FlowMode mode)
{
    ComplexField out(phi.grid);
    if (mode == FlowMode::power_only) {
        const Eigen::ArrayXd a2 = phi.values.abs2();
        const Eigen::ArrayXd w = (params.p == 2.0) ? a2 : Eigen::ArrayXd(a2.pow(0.5 * params.p));
        out.values = phi.values * w.cast<cplx>();
    } else {
        const RealField v = hartree_potential(phi, params.gamma, ZeroMode::whole_space);
        out.values = phi.values * v.values.cast<cplx>();
    }
    return out;
}

ComplexField gradient_flow_step(const ComplexField& phi, double dtau, const EquationParams& params,
                                double mu, FlowMode mode, std::optional<double> target_mass)
{
    if (!(dtau > 0.0)) throw InvalidParameter("gradient flow step needs dtau > 0");
    const auto& ctx = spectral_context(phi.grid);
    const ComplexField nl = flow_nonlinearity(phi, params, mode);

    Eigen::ArrayXcd phi_hat, nl_hat;
    ctx.forward(phi.values, phi_hat);
    ctx.forward(nl.values, nl_hat);
    const Eigen::ArrayXd L = ctx.k_squared() + mu;
    Eigen::ArrayXd decay(L.size()), gain(L.size());
    for (Eigen::Index i = 0; i < L.size(); ++i) {
        if (std::isinf(dtau)) {
            decay(i) = 0.0;
            gain(i) = 1.0 / L(i);
        } else {
            decay(i) = std::exp(-dtau * L(i));
            gain(i) = (L(i) == 0.0) ? dtau : -std::expm1(-dtau * L(i)) / L(i);
        }
    }
    Eigen::ArrayXcd hat = (phi_hat * decay + nl_hat * gain) / static_cast<double>(phi.grid.size());
    ComplexField out(phi.grid);
    ctx.backward(hat, out.values);
    if (!out.all_finite()) throw NonFinite("gradient flow produced non-finite values");
    if (target_mass) {
        const double m = lp_integral(out, 2.0);
        if (m > 0.0) out.values *= std::sqrt(*target_mass / m);
    }
    return out;
}

} // namespace nls
