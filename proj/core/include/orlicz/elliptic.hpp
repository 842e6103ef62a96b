#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "orlicz/field.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/potential.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Cell-sampled matrix coefficient, stored row-major per component plane
/// (values[(a*dim + b)*size + cell] holds entry (a,b)).  The matrix is not
/// assumed symmetric.
struct MatrixField {
  Grid grid;
  std::vector<double> values;

  double entry(int a, int b, std::size_t cell) const {
    return values[(static_cast<std::size_t>(a) * grid.dim + b) * grid.size() +
                  cell];
  }
  double& entry(int a, int b, std::size_t cell) {
    return values[(static_cast<std::size_t>(a) * grid.dim + b) * grid.size() +
                  cell];
  }
  /// 3x3 container padded with the identity on inactive axes.
  Eigen::Matrix3d at(std::size_t cell) const;
  void set(std::size_t cell, const Eigen::Matrix3d& value);
  void validate() const;

  bool operator==(const MatrixField&) const = default;
};

MatrixField make_matrix_field(
    const Grid& grid, const Eigen::Matrix3d& constant = Eigen::Matrix3d::Identity());

/// Coefficients (A, B, C, V) of the divergence-form operator together with
/// the certificates attached by `certify`: ellipticity bounds of the
/// symmetric part, a sampled modulus of continuity of A, the membership
/// norms demanded by the structural condition on the lower-order terms, and
/// (optionally) local-control constants.
struct CoefficientSet {
  MatrixField A;
  SampledField B;  // vector
  SampledField C;  // vector
  SampledField V;  // scalar

  double m = 0.0;  // min eigenvalue of sym A over cells
  double M = 0.0;  // max |A| (spectral norm) over cells
  std::vector<double> omega_radii;  // sampled modulus of continuity of A
  std::vector<double> omega_values;

  double norm_B_psi = 0.0;    // ||B||_{L^psi}
  double norm_C_d = 0.0;      // ||C||_{L^d}
  double norm_V_gamma = 0.0;  // ||V||_{L^gamma}
  double Lambda = 0.0;        // sum of the three membership norms

  double c0 = 0.0;  // local-control constants when certified (0 = not)
  double k0 = 0.0;
  bool certified = false;

  void validate() const;
};

/// Measures the ellipticity bounds on a random direction net (throws
/// EllipticityError when the symmetric part degenerates), samples the
/// modulus of continuity of A, and records the membership norms of the
/// lower-order coefficients.
CoefficientSet certify(MatrixField A, SampledField B, SampledField C,
                       SampledField V, const YoungFunction& psi,
                       const YoungFunction& gamma, std::uint64_t seed = 2026);

enum class CoefficientCatalog {
  constant_identity,  // A = I, B = C = V = 0
  smooth,             // A = I + eps * smooth, bounded smooth B, C, V
  singular            // smooth A, |x-x0|^{-1/2} drift, |x-x0|^{-1} potential
};

/// Builds one catalog coefficient set on the grid.  The singular kind
/// centers its point singularity at x0, which must not coincide with a cell
/// center (PreconditionError).
CoefficientSet catalog_coefficients(const Grid& grid, CoefficientCatalog kind,
                                    const YoungFunction& psi,
                                    const YoungFunction& gamma,
                                    const std::array<double, 3>& x0,
                                    std::uint64_t seed = 11);

/// -div(A grad u + B u + F) + C.grad u + V u + g = 0 with zero Dirichlet
/// data on the mask boundary; gamma must be the associated space of psi in
/// this dimension.
struct EllipticProblem {
  Grid grid;
  CoefficientSet coeffs;
  SampledField F;  // vector
  SampledField g;  // scalar
  YoungFunction psi;
  YoungFunction gamma;

  void validate() const;
};

/// Complete random instance: catalog coefficients plus seeded smooth data
/// (refinable: the same seed samples the same continuum fields on any grid).
EllipticProblem catalog_problem(const Grid& grid, CoefficientCatalog kind,
                                const YoungFunction& psi,
                                const YoungFunction& gamma,
                                std::uint64_t seed);

struct SolveOptions {
  double rel_tol = 1e-10;
  int max_iter = 20000;
};

/// Solves the discrete weak form.  The principal diagonal part uses a
/// conservative face-flux stencil with odd-reflected ghosts (Dirichlet at
/// the faces to second order); cross and lower-order terms use
/// second-order one-sided/centered differences in nonconservative form, so
/// coefficients entering those terms must be smooth for consistency.
SampledField solve(const EllipticProblem& problem, SolveInfo* info = nullptr,
                   const SolveOptions& opt = {});

/// Lower estimate of the smallest singular value of the assembled system,
/// via a few inverse power iterations on K^T K.  Instances with margin
/// below ~1e-8 sit numerically on the resonance set and should be
/// resampled.
double fredholm_margin(const EllipticProblem& problem, int iterations = 4,
                       std::uint64_t seed = 5, const SolveOptions& opt = {});

struct EstimateReport {
  double lhs = 0.0;                        // ||u||_{W^{1,psi}}
  std::array<double, 3> rhs_terms{0, 0, 0};  // ||u||_{L^1}, ||F||_{L^psi}, ||g||_{L^gamma}
  double ratio = 0.0;                      // lhs / sum(rhs_terms)
  bool degenerate = false;                 // 0/0
  // (cells per axis, ratio) pairs appended by refinement drivers.
  std::vector<std::pair<int, double>> refinement_trace;
};

EstimateReport verify_apriori(const EllipticProblem& problem,
                              const SampledField& u);

struct InteriorReport {
  double lhs = 0.0;       // ||grad u||_{L^2(D)}
  double rhs = 0.0;       // delta0^{-1}||u||_2 + ||F||_2 + ||g||_{2d/(d+2)}
  double delta0 = 0.0;
  double constant = 0.0;  // lhs / rhs
  bool degenerate = false;
};

/// Keeps the cells of `grid` whose center lies at distance >= delta0 from
/// every outside cell center and from the bounding box faces.
Grid interior_mask(const Grid& grid, double delta0);

/// Both sides of the interior L2 gradient estimate on the interior mask D;
/// MaskError when dist(D, boundary) is not larger than two cells.
InteriorReport interior_l2_check(const EllipticProblem& problem,
                                 const SampledField& u, const Grid& D);

/// Cutoff profile: 1 on [0, 5/4], 0 on [7/4, inf), smooth monotone blend
/// between the plateaus.
double cutoff_eta(double s);

/// A_r = (1 - eta_r) A0 + eta_r A with A0 = A at the cell containing x0 and
/// eta_r(x) = eta(|x - x0|/r); lower-order coefficients are multiplied by
/// eta_r.  GeometryError unless the ball of radius 2r about x0 lies inside
/// the grid box.
CoefficientSet modified_coefficients(const CoefficientSet& coeffs, double r,
                                     const std::array<double, 3>& x0);

/// Cells of `grid` whose centers lie inside the ball (intersected with the
/// existing mask).
Grid ball_mask(const Grid& grid, const std::array<double, 3>& x0,
               double radius);

/// The localization operator: quasi-potential of (A_r - A0) grad u + B_r u
/// minus the potential of C_r . grad u + V_r u, both with constant matrix
/// A0 on the ball of radius 2r about x0.  `modified` must come from
/// modified_coefficients with the same (r, x0).
SampledField apply_Kr(const SampledField& u, const CoefficientSet& modified,
                      const YoungFunction& psi, double r,
                      const std::array<double, 3>& x0,
                      SolveInfo* info = nullptr);

/// Data offset of the fixed-point equation: quasi-potential of F minus the
/// potential of g on the same ball.
SampledField kr_offset(const SampledField& F, const SampledField& g,
                       const CoefficientSet& modified, double r,
                       const std::array<double, 3>& x0,
                       SolveInfo* info = nullptr);

struct ContractionReport {
  std::vector<double> r;
  // per-r terms: sup |A - A0|, ||B||_psi * r psi^{-1}(r^{-d}),
  //              ||C||_d,      ||V||_gamma * r psi^{-1}(r^{-d})
  std::vector<std::array<double, 4>> terms;
  std::vector<double> delta;  // sum of the four terms
  double r0 = 0.0;            // first r with delta <= 1/2
  bool r0_found = false;
  double empirical_norm = 0.0;  // operator norm estimate at r0 (or last r)
};

/// Evaluates the four contraction bracket terms by restricted-ball norms
/// for each radius (r_list decreasing); delta(r) is their plain sum (the
/// hidden constant of the underlying estimate is normalized to one).  When
/// estimate_norm is set, additionally sweeps random fields through the
/// localization operator at r0 to estimate its true norm.  PreconditionError
/// when the tail integral of (t/psi)^{1/(d-1)} diverges.
ContractionReport contraction_delta(const CoefficientSet& coeffs,
                                    const YoungFunction& psi,
                                    const YoungFunction& gamma,
                                    const std::vector<double>& r_list,
                                    const std::array<double, 3>& x0,
                                    bool estimate_norm = false,
                                    int norm_draws = 5,
                                    std::uint64_t seed = 77);

struct NeumannReport {
  int iterations = 0;
  std::vector<double> increments;  // scaled-norm increments per iteration
  double rate = 0.0;               // geometric decay estimate
  double mismatch = 0.0;           // relative scaled-norm gap vs direct solve
  double neumann_norm = 0.0;       // scaled norm of the fixed point
  double direct_norm = 0.0;        // scaled norm of the direct solution
  double data_norm = 0.0;          // ||F||_psi + ||g||_gamma on the ball
  double offset_norm = 0.0;        // scaled norm of the data offset z
};

/// Localizes the data with the cutoff, iterates u <- Kr u + z until the
/// scaled-norm increment falls below 1e-9, and compares against the direct
/// localized solve (same discrete system solved monolithically).
/// DivergenceError when increments grow three times in a row.
SampledField neumann_solve(const EllipticProblem& problem,
                           const std::array<double, 3>& x0, double r,
                           NeumannReport* report = nullptr,
                           const SolveOptions& opt = {});

struct LocalControlReport {
  bool holds = false;
  double worst_ratio = 0.0;  // max of lhs^{2/d} / (c0 r^{k0}) over the net
  std::array<double, 3> worst_center{0, 0, 0};
  double worst_r = 0.0;
  double minimal_c0 = 0.0;  // smallest c0 satisfying the net for this k0
};

/// Checks the ball-integral growth condition
/// int_{B_r(x) ^ Omega} (|B|^2 + |C|^2 + |V|)^{d/2} <= (c0 r^{k0})^{d/2}
/// over a net of centers and radii.
LocalControlReport local_control_check(const CoefficientSet& coeffs, double c0,
                                       double k0);

}  // namespace orlicz
