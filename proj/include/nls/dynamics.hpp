#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nls/grid.hpp"
#include "nls/spectral.hpp"

namespace nls {

/// Coefficients of i u_t + Lap u = l1 |u|^p u + l2 (|x|^-gamma * |u|^2) u.
struct EquationParams {
    int n = 3;
    double p = 2.0;
    double gamma = 2.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;

    /// Throws InvalidParameter / InvalidExponent when the equation cannot be
    /// simulated: n outside 1..3, p <= 0, p > 4/(n-2) for n >= 3,
    /// gamma outside (0, min(n, 4)].
    void validate() const;

    /// Reasons the parameters fall outside the analyzed range (n >= 3,
    /// gamma < n, nonzero couplings). Empty when fully in range.
    std::vector<std::string> scope_notes() const;
};

enum class Termination { completed, guard_tripped, nonfinite };

std::string to_string(Termination t);

struct EvolutionConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int cadence = 10;
    /// Abort when max |u| exceeds this.
    double guard_amplitude = 1e6;
    /// Abort when ||grad u|| exceeds this multiple of ||grad u0||.
    double guard_gradient_factor = 1e3;
    /// Apply 2/3-rule truncation after every nonlinear substep.
    bool dealias = false;

    void validate() const;
};

/// Receives (t, u) at the configured cadence, synchronously.
using Observer = std::function<void(double, const ComplexField&)>;

struct Trajectory {
    ComplexField final_state;
    Termination termination = Termination::completed;
    double t_final = 0.0;
    long steps = 0;
    /// Times at which observers were invoked.
    std::vector<double> sample_times;
    /// Guard diagnostics at termination.
    double max_amplitude = 0.0;
    double gradient_norm = 0.0;
    double gradient_norm_initial = 0.0;
};

/// u <- u exp(-i dt (l1 |u|^p + l2 V)), V the Hartree potential of u.
/// Exact: both potentials depend on |u| only, which the rotation keeps.
/// Throws NonFinite.
ComplexField nonlinear_phase_step(const ComplexField& u, double dt, const EquationParams& params);

/// Free propagator: u^(k) <- exp(-i |k|^2 dt) u^(k).
ComplexField linear_step(const ComplexField& u, double dt);

/// Half nonlinear, full linear, half nonlinear.
ComplexField strang_step(const ComplexField& u, double dt, const EquationParams& params);

/// Repeated Strang steps to t_end or until a guard trips. Observers see
/// t = 0, every cadence-th step and the final state. A non-finite state
/// ends the run with Termination::nonfinite instead of throwing.
Trajectory evolve(const ComplexField& u0, const EquationParams& params,
                  const EvolutionConfig& config, const std::vector<Observer>& observers = {});

enum class FlowMode { power_only, hartree_only };

/// One step of phi_tau = Lap phi - mu phi + N(phi) with the linear part
/// integrated exactly in Fourier space (exponential Euler):
///   phi^ <- e^{-dtau L} phi^ + (1 - e^{-dtau L}) / L N^,  L = |k|^2 + mu.
/// N(phi) = |phi|^p phi (power_only) or (K * |phi|^2) phi (hartree_only,
/// whole-space zero mode). When target_mass is set the result is rescaled
/// to that L^2 norm squared. Throws NonFinite.
ComplexField gradient_flow_step(const ComplexField& phi, double dtau, const EquationParams& params,
                                double mu, FlowMode mode,
                                std::optional<double> target_mass = std::nullopt);

/// The nonlinearity used by gradient_flow_step.
ComplexField flow_nonlinearity(const ComplexField& phi, const EquationParams& params,
                               FlowMode mode);

} // namespace nls
