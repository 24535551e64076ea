#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "jps/errors.hpp"

namespace jps {

// Dirichlet sine basis on a d-dimensional box (d = 1..3),
//   phi_k(x) = prod_i sqrt(2/L_i) sin(k_i pi x_i / L_i),  k_i = 1..M_i,
// with eigenvalues lambda_k = sum_i (k_i pi / L_i)^2 of -Laplace.
//
// Quadrature: per axis, the closed trapezoid rule on the uniform nodes
// x_j = j L/(N+1), j = 0..N+1 (N interior nodes, weight L/(N+1) inside and
// half at the ends).  Interior nodes carry the DST-I orthogonality, so
// analysis/synthesis of <= N modes is exact, and pair products of resolved
// modes (sine*sine and cosine*cosine, combined frequency <= 2N+1) integrate
// exactly — L2 inner products and gradient energies of <= N-mode fields are
// quadrature-exact.  Projecting a *product* of fields back onto the sine
// basis is not exact: the product has an infinite sine tail (decay set by
// boundary compatibility, generically cubic) which aliases into the kept
// band from frequency 2(N+1)-M on.  The default N = 2M keeps that
// contamination at the tail's own size; raise quad_interior where a test
// needs it smaller.
//
// Flattening: row-major over (k_1, ..., k_d), axis 0 slowest.  Physical
// arrays run over the full closed node grid with the same convention.
class BoxGrid {
 public:
  BoxGrid(int dims, std::array<double, 3> lengths, std::array<int, 3> modes,
          std::array<int, 3> quad_interior);  // quad entry 0 -> default 2*modes

  static std::shared_ptr<const BoxGrid> make(int dims, std::vector<double> lengths,
                                             std::vector<int> modes,
                                             std::vector<int> quad_interior = {});

  int dims() const { return dims_; }
  double length(int axis) const { return lengths_[axis]; }
  int modes(int axis) const { return modes_[axis]; }
  int quad_interior(int axis) const { return quad_[axis]; }
  int nodes(int axis) const { return quad_[axis] + 2; }

  Eigen::Index num_modes() const { return num_modes_; }
  Eigen::Index num_nodes() const { return num_nodes_; }

  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  double lambda_min() const { return lambda_min_; }

  // Quadrature weights over the full node grid (tensor product, closed rule).
  const Eigen::VectorXd& node_weights() const { return weights_; }
  double integrate(const Eigen::VectorXd& node_values) const;

  double node_coord(int axis, int j) const;  // j in [0, nodes(axis))
  std::array<double, 3> node_point(Eigen::Index flat) const;

  Eigen::VectorXd to_physical(const Eigen::VectorXd& coef) const;
  Eigen::VectorXd to_spectral(const Eigen::VectorXd& node_values) const;
  // d(u)/dx_axis sampled on the node grid (cosine synthesis along `axis`).
  Eigen::VectorXd derivative_values(const Eigen::VectorXd& coef, int axis) const;

  bool operator==(const BoxGrid& o) const;
  bool operator!=(const BoxGrid& o) const { return !(*this == o); }

 private:
  void build();
  Eigen::VectorXd apply_axis(const Eigen::MatrixXd& mx, const Eigen::VectorXd& in,
                             std::array<Eigen::Index, 3> shape, int axis) const;

  int dims_;
  std::array<double, 3> lengths_;
  std::array<int, 3> modes_;
  std::array<int, 3> quad_;
  Eigen::Index num_modes_ = 0, num_nodes_ = 0;
  std::array<Eigen::MatrixXd, 3> synth_;    // nodes x modes, sine
  std::array<Eigen::MatrixXd, 3> dsynth_;   // nodes x modes, (k pi / L) cosine
  std::array<Eigen::MatrixXd, 3> analysis_; // modes x nodes
  Eigen::VectorXd lambda_;
  Eigen::VectorXd weights_;
  double lambda_min_ = 0;
};

// Coefficient vector bound to a grid.  Plain value type; all operations
// below are pure functions returning new fields.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(std::shared_ptr<const BoxGrid> grid);
  SpectralField(std::shared_ptr<const BoxGrid> grid, Eigen::VectorXd coef);

  bool empty() const { return !grid_; }
  const BoxGrid& grid() const { return *grid_; }
  const std::shared_ptr<const BoxGrid>& grid_ptr() const { return grid_; }
  const Eigen::VectorXd& coef() const { return coef_; }
  Eigen::VectorXd& coef() { return coef_; }

  Eigen::VectorXd values() const { return grid_->to_physical(coef_); }

  SpectralField operator+(const SpectralField& o) const;
  SpectralField operator-(const SpectralField& o) const;
  SpectralField operator*(double s) const;

 private:
  std::shared_ptr<const BoxGrid> grid_;
  Eigen::VectorXd coef_;
};

void check_same_grid(const SpectralField& a, const SpectralField& b);

SpectralField laplacian(const SpectralField& u);

// Truncated product of a physical-space multiplier with a field.  The
// multiplier must be sampled on the full node grid of u.
SpectralField pointwise_product(const Eigen::VectorXd& multiplier_values,
                                const SpectralField& u);
SpectralField pointwise_product(const SpectralField& a, const SpectralField& u);

// Project a pointwise function onto the basis by quadrature analysis.
SpectralField project(const std::shared_ptr<const BoxGrid>& grid,
                      const std::function<double(const std::array<double, 3>&)>& f);

// Seminorm of order s in {0,1,2,3}: sqrt(sum lambda^s c^2); s=0 is L2,
// s=1 the gradient seminorm, s=2 the Laplacian seminorm.
double seminorm(const SpectralField& u, int s);
// Full Sobolev norm H^s, s in {0,..,3}: sqrt(sum_{j<=s} lambda^j c^2).
double sobolev_norm(const SpectralField& u, int s);

double linf_norm(const SpectralField& u);

// ||u||_inf / (||u||_H2^(d/4) ||u||_L2^(1-d/4)); 0 for the zero field.
double agmon_ratio(const SpectralField& u);

// CSV round-trip of one field: header "k1,k2,k3,coef", 17 significant digits.
void write_field_csv(std::ostream& os, const SpectralField& u);
SpectralField read_field_csv(std::istream& is, const std::shared_ptr<const BoxGrid>& grid);

}  // namespace jps
