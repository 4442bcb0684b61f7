#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nls/grid.hpp"

namespace nls {

/// R solves Lap R + R^{p+1} = mu_R R with mu_R = (4 - (n-2)p) / (np).
/// W solves Lap W + (K * W^2) W = mu_W W with mu_W = (4 - gamma) / gamma,
/// K the Riesz multiplier |k|^-(n-gamma) with the whole-space zero mode.
enum class GroundStateKind { R, W };

std::string to_string(GroundStateKind kind);

/// Eigenvalue fixed by the normalization: mu_R(n, p) or mu_W(gamma).
double ground_state_mu(GroundStateKind kind, int n, double exponent);

/// Radial samples on a uniform r grid starting at r = 0, with slopes, for
/// cubic Hermite interpolation. Zero beyond the last sample.
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> value;
    std::vector<double> slope;

    bool empty() const { return r.empty(); }
    double operator()(double radius) const;
};

struct GroundState {
    GroundStateKind kind = GroundStateKind::R;
    int n = 3;
    /// p for R, gamma for W.
    double exponent = 2.0;
    double mu = 0.0;
    /// Set by the shooting solver.
    RadialProfile profile;
    /// Set by the flow solver, sampled on the rescaled grid.
    std::optional<ComplexField> field;
    double mass = 0.0;      ///< ||G||^2
    double kinetic = 0.0;   ///< ||grad G||^2
    double potential = 0.0; ///< int R^{p+2}, or int (K * W^2) W^2
    /// Relative L^2 Euler-Lagrange residual.
    double residual = 0.0;
    long iterations = 0;
    /// Flow only: max |G| on the box faces over the peak.
    double edge_ratio = 0.0;
    std::string method;
};

/// Constants of the sharp Gagliardo-Nirenberg inequalities
///   ||u||_{p+2}^{p+2} <= C_R ||grad u||^{np/2} ||u||^{(4-(n-2)p)/2},
///   int (K * |u|^2)|u|^2 <= C_W ||grad u||^gamma ||u||^{4-gamma},
/// and the ground-state energies E~(R), E~(W).
struct SharpConstants {
    GroundStateKind kind = GroundStateKind::R;
    int n = 3;
    double exponent = 2.0;
    double C = 0.0;
    double E_tilde = 0.0;
    double mass = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
};

/// Radial shooting for R: bisection on R(0) between profiles that cross zero
/// and profiles that turn upward, adaptive Dormand-Prince integration, and an
/// exact linear tail r^-nu K_nu(sqrt(mu) r) glued where R drops below
/// 1e-4 R(0). Throws InvalidExponent unless n in {1,2,3}, p > 0 and
/// p < 4/(n-2); NoConvergence when no bracket exists in [0.01, 1e4] or the
/// residual exceeds tol.
GroundState shoot_R(int n, double p, double tol = 1e-6);

struct FlowOptions {
    double tol = 1e-10;
    long max_steps = 100000;
    /// Imaginary-time step; infinity gives the fixed-point (Petviashvili
    /// type) iteration phi <- (|k|^2 + omega)^-1 N(phi).
    double dtau = 1.0;
    /// Eigenvalue used during the iteration. 0 selects
    /// min(30, 0.23 N)^2 / L^2: at most 15 decay lengths 1/sqrt(omega) from
    /// center to edge, and at least about 4 samples per decay length.
    double trial_omega = 0.0;
    /// Largest accepted max |Phi| on the box faces relative to the peak.
    /// Besides the physical tail this sees the spectral truncation floor,
    /// which sits near 1e-6 on 96^3 to 128^3 grids.
    double edge_tolerance = 1e-5;
};

/// Ground state on a grid. Iterates the exponential Euler flow at the trial
/// eigenvalue omega, renormalizing every step onto the Nehari manifold
/// ||grad phi||^2 + omega ||phi||^2 = (nonlinear term), then maps the fixed
/// point Phi to the mu normalization by G(x) = a Phi(b x) with
/// b^2 = mu / omega and a^p = b^2 (R) or a^2 = b^{2+n-gamma} (W). The field
/// is returned on the rescaled grid of length L / b.
///
/// Throws InvalidExponent for exponents outside the existence range
/// (W needs 0 < gamma < n), NoConvergence, and BoundaryContamination when
/// |Phi| at the box edge exceeds options.edge_tolerance of its peak.
GroundState flow_ground_state(GroundStateKind kind, int n, double exponent, const GridSpec& grid,
                              const FlowOptions& options = {});

SharpConstants sharp_constants(const GroundState& gs);

/// Relative residuals of the Pohozaev identities satisfied in the mu
/// normalization: ||grad G||^2 = ||G||^2, and int R^{p+2} = 2(p+2)/(np)
/// ||grad R||^2 or int (K * W^2) W^2 = (4/gamma) ||grad W||^2.
struct PohozaevResiduals {
    double kinetic_mass = 0.0;
    double potential = 0.0;
};

PohozaevResiduals pohozaev_residuals(const GroundState& gs);

/// Samples a shooting profile on a grid centered at the origin.
ComplexField to_grid(const GroundState& gs, const GridSpec& grid);

struct GnReport {
    double ratio = 0.0;
    double constant = 0.0;
    double ratio_over_constant = 0.0;
};

/// Gagliardo-Nirenberg quotient of u in the inequality matching gs.kind;
/// Hartree energies use the whole-space zero mode. Throws DegenerateInput
/// when u has zero mass or zero gradient.
GnReport gn_check(const ComplexField& u, const SharpConstants& constants);
GnReport gn_check(const ComplexField& u, const GroundState& gs);

double gn_ratio(const ComplexField& u, GroundStateKind kind, double exponent);

} // namespace nls
