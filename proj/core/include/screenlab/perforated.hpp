#ifndef SCREENLAB_PERFORATED_HPP
#define SCREENLAB_PERFORATED_HPP

#include <string>
#include <vector>

#include "screenlab/homogenization.hpp"

namespace screenlab
{

// DirichletScreen: u = 0 on the patches, the rest of Γ₁ is open.
// NeumannScreen: ∂u/∂x₃ = 0 on both sides of the screen, the patches are the open windows.
enum class ScreenMode
{
  DirichletScreen,
  NeumannScreen,
};

ScreenMode parse_screen_mode(const std::string &name);  // "dirichlet" | "neumann"
std::string to_string(ScreenMode m);
ProblemKind problem_kind(ScreenMode m);

// Ω̃ = (−1,3)² × (−2,1).
Box3 default_outer();

// Grading for the two-domain grids: fine within δ/2 of the plane, ×1.2 growth up to 1/8.
// Errors at ε = 1/3, δ = ε² move by 0.3% against the homogenization defaults.
inline GridOptions screen_grid_defaults() { return {0.5, 1.2, 0.125}; }

struct TransmissionSpec
{
  Box3 outer = default_outer();
  Box3 inner = default_omega();
  PatchLayout layout{PlateShape::disk(1.0), 0.0, 1.0, {0.0, 2.0, 0.0, 2.0}};
  ScreenMode mode = ScreenMode::NeumannScreen;
  ScalarSource F;
  double h = 0.0;  // fine spacing on the interface plane
  GridOptions grid = screen_grid_defaults();
};

// Tensor grid of Ω̃ (or its quarter): spacing h on Γ₁ and within fine_depth·δ of the
// plane x₃ = 0, graded elsewhere. The walls of Ω are grid planes.
PreparedGrid transmission_grid(const TransmissionSpec &spec);

// The same construction for any pair of boxes; the faces of `outer` get outer_role and
// z_max caps every graded spacing. Also used by the scattering solver.
PreparedGrid screen_grid(const Box3 &outer, const Box3 &inner, const PatchLayout &layout,
                         const ScalarSource &F, double h, const GridOptions &options,
                         FaceRole outer_role);

//
// A field on Ω̃ with the screen conditions built in. Split nodes on the screen carry
// upper and lower values; windows are single valued.
//
struct TwoDomainField
{
  GridField field;
  Box3 inner;
  Box3 outer;

  double inner_l2() const { return field.l2_norm(inner); }
  // Norm over Ω̃ \ Ω̄.
  double outer_l2() const;
  double jump_norm() const { return field.jump_norm(); }
  // ‖u‖ on Γ₁ seen from inside Ω.
  double screen_trace() const;
};

TwoDomainField solve_screened(const TransmissionSpec &spec);
TwoDomainField solve_screened(const TransmissionSpec &spec, const PreparedGrid &grid);

// Limit pair on the same grid: for DirichletScreen all of Γ₁ is Dirichlet, for
// NeumannScreen all of Γ₁ is a two-sided Neumann screen. One solve of the resulting
// block-diagonal system gives u₀ in Ω and ũ₀ in Ω̃ \ Ω̄.
TwoDomainField solve_decoupled_limit(const TransmissionSpec &spec, const PreparedGrid &grid);
TwoDomainField solve_decoupled_limit(const TransmissionSpec &spec);

// Discrete fluxes through the windows of a NeumannScreen solution. Summing the window
// rows gives leaving_inner + source = entering_outer + rim, where source is the
// production −∫F over the window control volumes and rim the flux into the edge of Γ₁.
struct WindowFlux
{
  double leaving_inner = 0.0;
  double entering_outer = 0.0;
  double source = 0.0;
  double rim = 0.0;
};
WindowFlux window_flux(const TwoDomainField &u, const ScalarSource &F);

// uᵀKu and bᵀu for the system u was solved on (equal for an exact solution).
struct EnergyBalance
{
  double energy = 0.0;
  double work = 0.0;
};
EnergyBalance energy_balance(const TwoDomainField &u, const ScalarSource &F);

struct DecouplingRow
{
  double eps = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double inner_err = 0.0;  // ‖u − u₀‖_{L₂(Ω)} / ‖u₀‖_{L₂(Ω)}
  double outer_err = 0.0;  // same over Ω̃ \ Ω̄ against ũ₀
  // ‖u‖_{L₂(Γ₁)} for DirichletScreen, the jump norm across the screen for NeumannScreen.
  double screen_trace_or_jump = 0.0;
  double limit_jump = 0.0;  // jump of the limit pair across Γ₁ (NeumannScreen)
  double area_fraction = 0.0;
  std::size_t unknowns = 0;
};

struct DecouplingReport
{
  ScreenMode mode = ScreenMode::NeumannScreen;
  Regime regime = Regime::PZero;
  bool exploratory = false;  // regime/mode pair not covered by a decoupling result
  std::vector<DecouplingRow> rows;  // decreasing ε
};

struct DecouplingSpec
{
  ScreenMode mode = ScreenMode::NeumannScreen;
  Regime regime = Regime::PZero;
  double p = 1.0;
  std::vector<double> epsilons;
  PlateShape plate = PlateShape::disk(1.0);
  Box3 outer = default_outer();
  Box3 inner = default_omega();
  ScalarSource F;
  double h_max = 1.0 / 16.0;
  GridOptions grid = screen_grid_defaults();
  bool allow_exploratory = false;
};

// DirichletScreen pairs with δ = ε², NeumannScreen with δ = √ε; other pairs throw
// unless allow_exploratory is set. Every row's grid is checked before the first solve.
void validate_decoupling(const DecouplingSpec &spec);
DecouplingReport decoupling_study(const DecouplingSpec &spec);

}  // namespace screenlab

#endif  // SCREENLAB_PERFORATED_HPP
