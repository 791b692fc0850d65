#ifndef SCREENLAB_HELMHOLTZ_HPP
#define SCREENLAB_HELMHOLTZ_HPP

#include <string>
#include <vector>

#include "screenlab/perforated.hpp"

namespace screenlab
{

// Smallest eigenfrequency of −Δ on the box: all-Dirichlet for DirichletScreen, Neumann
// on the top face and Dirichlet elsewhere for NeumannScreen.
double reference_eigenfrequency(const Box3 &inner, ScreenMode mode);

struct ScatterSpec
{
  double L = 2.0;  // half-size of the truncation box, centred on the centre of Ω
  Box3 inner = default_omega();
  PatchLayout layout{PlateShape::disk(1.0), 0.0, 1.0, {0.0, 2.0, 0.0, 2.0}};
  ScreenMode mode = ScreenMode::NeumannScreen;
  ScalarSource F;
  double h = 0.0;  // fine spacing on Γ₁
  GridOptions grid = screen_grid_defaults();
};

Box3 truncation_box(const ScatterSpec &spec);

// Grid resolving wavenumbers up to k_max: every spacing is at most one tenth of the
// wavelength 2π/k_max. The faces of the truncation box absorb.
PreparedGrid scatter_grid(const ScatterSpec &spec, double k_max);

// Solves (Δ + k²)u = F with the screen conditions and ∂u/∂n − iku = 0 on the truncation
// faces. Throws NonConvergence<Complex> (carrying the best iterate) when BiCGSTAB stalls.
ComplexField solve_helmholtz(const ScatterSpec &spec, const PreparedGrid &grid, Complex k,
                             double tol = 1e-8);

struct ResonanceScan
{
  std::vector<double> k;
  std::vector<double> amplitude;  // ‖u‖_{L₂(Ω)}, NaN where the solve failed
  std::vector<bool> failed;
  double peak_k = 0.0;     // sample with the largest amplitude
  double peak_fit = 0.0;   // vertex of the three-point Lorentzian fit
  double half_width = 0.0; // fitted half-width at half maximum of amplitude²
  bool resolved = false;   // false: "insufficient resolution", peak_fit = peak_k
  std::string note;
};

// k_values must be increasing and positive.
ResonanceScan response_scan(const ScatterSpec &spec, const PreparedGrid &grid,
                            const std::vector<double> &k_values);

struct PoleEstimate
{
  Complex tau;
  double k0 = 0.0;
  std::size_t iterations = 0;
  // |1/ℓ(u)| at the last solved iterate relative to the starting guess, ℓ(u) = ⟨F, u⟩.
  double residual = 0.0;
  // ‖u‖_{L₂(Ω)} at the starting guess over ‖u‖ at the last solved iterate.
  double amplitude_ratio = 0.0;
};

// Secant iteration for a zero of g(k) = 1/⟨F, u_k⟩ starting from k0_guess; stops once the
// next step is below 1e-8·|k| and returns that step's target. Throws
// SolverError "pole too deep" when an iterate leaves Im k ≥ −0.5, and after 40 steps
// without convergence.
PoleEstimate locate_pole(const ScatterSpec &spec, const PreparedGrid &grid, Complex k0_guess);

}  // namespace screenlab

#endif  // SCREENLAB_HELMHOLTZ_HPP
