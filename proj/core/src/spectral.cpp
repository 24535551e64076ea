#include "jps/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace jps {

namespace {
constexpr double kPi = std::numbers::pi;
}

BoxGrid::BoxGrid(int dims, std::array<double, 3> lengths, std::array<int, 3> modes,
                 std::array<int, 3> quad_interior)
    : dims_(dims), lengths_(lengths), modes_(modes), quad_(quad_interior) {
  if (dims_ < 1 || dims_ > 3) throw ConfigError("must be 1, 2 or 3", "grid.dims");
  for (int a = 0; a < dims_; ++a) {
    if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a]))
      throw ConfigError("lengths must be finite and > 0", "grid.lengths");
    if (modes_[a] < 1) throw ConfigError("modes must be >= 1", "grid.modes");
    if (quad_[a] == 0) quad_[a] = 2 * modes_[a];
    if (quad_[a] < 2 * modes_[a])
      throw ConfigError("interior quadrature nodes must be >= 2*modes (dealiasing)",
                        "grid.quad");
  }
  for (int a = dims_; a < 3; ++a) {
    lengths_[a] = 1.0;
    modes_[a] = 1;
    quad_[a] = 0;
  }
  build();
}

std::shared_ptr<const BoxGrid> BoxGrid::make(int dims, std::vector<double> lengths,
                                             std::vector<int> modes,
                                             std::vector<int> quad_interior) {
  if (static_cast<int>(lengths.size()) != dims)
    throw ConfigError("needs one entry per dimension", "grid.lengths");
  if (static_cast<int>(modes.size()) != dims)
    throw ConfigError("needs one entry per dimension", "grid.modes");
  if (!quad_interior.empty() && static_cast<int>(quad_interior.size()) != dims)
    throw ConfigError("needs one entry per dimension when given", "grid.quad");
  std::array<double, 3> L{1, 1, 1};
  std::array<int, 3> M{1, 1, 1};
  std::array<int, 3> Q{0, 0, 0};
  for (int a = 0; a < dims; ++a) {
    L[a] = lengths[a];
    M[a] = modes[a];
    Q[a] = quad_interior.empty() ? 0 : quad_interior[a];
  }
  return std::make_shared<const BoxGrid>(dims, L, M, Q);
}

void BoxGrid::build() {
  num_modes_ = 1;
  num_nodes_ = 1;
  for (int a = 0; a < dims_; ++a) {
    num_modes_ *= modes_[a];
    num_nodes_ *= quad_[a] + 2;
  }

  for (int a = 0; a < dims_; ++a) {
    const int M = modes_[a];
    const int N = quad_[a];
    const int Q = N + 2;
    const double L = lengths_[a];
    const double hx = L / (N + 1);
    const double norm = std::sqrt(2.0 / L);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(Q, M);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(Q, M);
    for (int j = 0; j < Q; ++j) {
      const double x = j * hx;
      for (int k = 0; k < M; ++k) {
        const double kk = (k + 1) * kPi / L;
        S(j, k) = norm * std::sin(kk * x);
        D(j, k) = norm * kk * std::cos(kk * x);
      }
    }
    Eigen::VectorXd w = Eigen::VectorXd::Constant(Q, hx);
    w(0) *= 0.5;
    w(Q - 1) *= 0.5;
    synth_[a] = S;
    dsynth_[a] = D;
    analysis_[a] = (S.array().colwise() * w.array()).matrix().transpose();
  }

  // Tensor-product weights and eigenvalues, row-major flattening.
  weights_.resize(num_nodes_);
  {
    std::array<Eigen::Index, 3> shape{nodes(0), dims_ > 1 ? nodes(1) : 1,
                                      dims_ > 2 ? nodes(2) : 1};
    Eigen::Index idx = 0;
    for (Eigen::Index j0 = 0; j0 < shape[0]; ++j0)
      for (Eigen::Index j1 = 0; j1 < shape[1]; ++j1)
        for (Eigen::Index j2 = 0; j2 < shape[2]; ++j2, ++idx) {
          double w = lengths_[0] / (quad_[0] + 1);
          w = (j0 == 0 || j0 == shape[0] - 1) ? w * 0.5 : w;
          if (dims_ > 1) {
            double w1 = lengths_[1] / (quad_[1] + 1);
            w *= (j1 == 0 || j1 == shape[1] - 1) ? w1 * 0.5 : w1;
          }
          if (dims_ > 2) {
            double w2 = lengths_[2] / (quad_[2] + 1);
            w *= (j2 == 0 || j2 == shape[2] - 1) ? w2 * 0.5 : w2;
          }
          weights_(idx) = w;
        }
  }

  lambda_.resize(num_modes_);
  {
    std::array<Eigen::Index, 3> shape{modes_[0], dims_ > 1 ? modes_[1] : 1,
                                      dims_ > 2 ? modes_[2] : 1};
    Eigen::Index idx = 0;
    for (Eigen::Index k0 = 0; k0 < shape[0]; ++k0)
      for (Eigen::Index k1 = 0; k1 < shape[1]; ++k1)
        for (Eigen::Index k2 = 0; k2 < shape[2]; ++k2, ++idx) {
          double lam = std::pow((k0 + 1) * kPi / lengths_[0], 2);
          if (dims_ > 1) lam += std::pow((k1 + 1) * kPi / lengths_[1], 2);
          if (dims_ > 2) lam += std::pow((k2 + 1) * kPi / lengths_[2], 2);
          lambda_(idx) = lam;
        }
  }
  lambda_min_ = lambda_.minCoeff();
}

double BoxGrid::integrate(const Eigen::VectorXd& node_values) const {
  if (node_values.size() != num_nodes_)
    throw GridMismatch("integrate: node array has wrong size");
  return weights_.dot(node_values);
}

double BoxGrid::node_coord(int axis, int j) const {
  return j * lengths_[axis] / (quad_[axis] + 1);
}

std::array<double, 3> BoxGrid::node_point(Eigen::Index flat) const {
  std::array<Eigen::Index, 3> shape{nodes(0), dims_ > 1 ? nodes(1) : 1,
                                    dims_ > 2 ? nodes(2) : 1};
  std::array<double, 3> x{0, 0, 0};
  Eigen::Index rem = flat;
  const Eigen::Index j2 = rem % shape[2];
  rem /= shape[2];
  const Eigen::Index j1 = rem % shape[1];
  rem /= shape[1];
  const Eigen::Index j0 = rem;
  x[0] = node_coord(0, static_cast<int>(j0));
  if (dims_ > 1) x[1] = node_coord(1, static_cast<int>(j1));
  if (dims_ > 2) x[2] = node_coord(2, static_cast<int>(j2));
  return x;
}

Eigen::VectorXd BoxGrid::apply_axis(const Eigen::MatrixXd& mx, const Eigen::VectorXd& in,
                                    std::array<Eigen::Index, 3> shape, int axis) const {
  const Eigen::Index rows = mx.rows();
  const Eigen::Index mid = shape[axis];
  Eigen::Index outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= shape[a];
  for (int a = axis + 1; a < 3; ++a) inner *= shape[a];

  Eigen::VectorXd out(outer * rows * inner);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (Eigen::Index o = 0; o < outer; ++o) {
    Eigen::Map<const RowMat> blk(in.data() + o * mid * inner, mid, inner);
    Eigen::Map<RowMat> res(out.data() + o * rows * inner, rows, inner);
    res.noalias() = mx * blk;
  }
  return out;
}

Eigen::VectorXd BoxGrid::to_physical(const Eigen::VectorXd& coef) const {
  if (coef.size() != num_modes_) throw GridMismatch("to_physical: wrong coefficient count");
  std::array<Eigen::Index, 3> shape{modes_[0], dims_ > 1 ? modes_[1] : 1,
                                    dims_ > 2 ? modes_[2] : 1};
  Eigen::VectorXd v = coef;
  for (int a = 0; a < dims_; ++a) {
    v = apply_axis(synth_[a], v, shape, a);
    shape[a] = nodes(a);
  }
  return v;
}

Eigen::VectorXd BoxGrid::to_spectral(const Eigen::VectorXd& node_values) const {
  if (node_values.size() != num_nodes_) throw GridMismatch("to_spectral: wrong node count");
  std::array<Eigen::Index, 3> shape{nodes(0), dims_ > 1 ? nodes(1) : 1,
                                    dims_ > 2 ? nodes(2) : 1};
  Eigen::VectorXd v = node_values;
  for (int a = 0; a < dims_; ++a) {
    v = apply_axis(analysis_[a], v, shape, a);
    shape[a] = modes_[a];
  }
  return v;
}

Eigen::VectorXd BoxGrid::derivative_values(const Eigen::VectorXd& coef, int axis) const {
  if (coef.size() != num_modes_)
    throw GridMismatch("derivative_values: wrong coefficient count");
  if (axis < 0 || axis >= dims_) throw GridMismatch("derivative_values: bad axis");
  std::array<Eigen::Index, 3> shape{modes_[0], dims_ > 1 ? modes_[1] : 1,
                                    dims_ > 2 ? modes_[2] : 1};
  Eigen::VectorXd v = coef;
  for (int a = 0; a < dims_; ++a) {
    v = apply_axis(a == axis ? dsynth_[a] : synth_[a], v, shape, a);
    shape[a] = nodes(a);
  }
  return v;
}

bool BoxGrid::operator==(const BoxGrid& o) const {
  if (dims_ != o.dims_) return false;
  for (int a = 0; a < dims_; ++a)
    if (lengths_[a] != o.lengths_[a] || modes_[a] != o.modes_[a] || quad_[a] != o.quad_[a])
      return false;
  return true;
}

SpectralField::SpectralField(std::shared_ptr<const BoxGrid> grid)
    : grid_(std::move(grid)), coef_(Eigen::VectorXd::Zero(grid_->num_modes())) {}

SpectralField::SpectralField(std::shared_ptr<const BoxGrid> grid, Eigen::VectorXd coef)
    : grid_(std::move(grid)), coef_(std::move(coef)) {
  if (coef_.size() != grid_->num_modes())
    throw GridMismatch("SpectralField: coefficient count does not match grid");
}

void check_same_grid(const SpectralField& a, const SpectralField& b) {
  if (a.empty() || b.empty()) throw GridMismatch("operation on empty field");
  if (a.grid_ptr().get() == b.grid_ptr().get()) return;
  if (a.grid() != b.grid()) throw GridMismatch("fields live on different grids");
}

SpectralField SpectralField::operator+(const SpectralField& o) const {
  check_same_grid(*this, o);
  return SpectralField(grid_, coef_ + o.coef_);
}

SpectralField SpectralField::operator-(const SpectralField& o) const {
  check_same_grid(*this, o);
  return SpectralField(grid_, coef_ - o.coef_);
}

SpectralField SpectralField::operator*(double s) const {
  return SpectralField(grid_, coef_ * s);
}

SpectralField laplacian(const SpectralField& u) {
  if (u.empty()) throw GridMismatch("laplacian of empty field");
  return SpectralField(u.grid_ptr(),
                       (-u.grid().eigenvalues().array() * u.coef().array()).matrix());
}

SpectralField pointwise_product(const Eigen::VectorXd& multiplier_values,
                                const SpectralField& u) {
  if (u.empty()) throw GridMismatch("product with empty field");
  if (multiplier_values.size() != u.grid().num_nodes())
    throw GridMismatch("multiplier sampled on a different node grid");
  Eigen::VectorXd prod = u.values().cwiseProduct(multiplier_values);
  return SpectralField(u.grid_ptr(), u.grid().to_spectral(prod));
}

SpectralField pointwise_product(const SpectralField& a, const SpectralField& u) {
  check_same_grid(a, u);
  return pointwise_product(a.values(), u);
}

SpectralField project(const std::shared_ptr<const BoxGrid>& grid,
                      const std::function<double(const std::array<double, 3>&)>& f) {
  Eigen::VectorXd v(grid->num_nodes());
  for (Eigen::Index i = 0; i < grid->num_nodes(); ++i) v(i) = f(grid->node_point(i));
  return SpectralField(grid, grid->to_spectral(v));
}

double seminorm(const SpectralField& u, int s) {
  if (u.empty()) throw GridMismatch("seminorm of empty field");
  if (s < 0 || s > 3) throw ConfigError("seminorm order must be in 0..3");
  const auto& lam = u.grid().eigenvalues().array();
  const auto c2 = u.coef().array().square();
  double v = 0;
  switch (s) {
    case 0: v = c2.sum(); break;
    case 1: v = (lam * c2).sum(); break;
    case 2: v = (lam.square() * c2).sum(); break;
    case 3: v = (lam.cube() * c2).sum(); break;
  }
  return std::sqrt(v);
}

double sobolev_norm(const SpectralField& u, int s) {
  if (s < 0 || s > 3) throw ConfigError("sobolev order must be in 0..3");
  double acc = 0;
  for (int j = 0; j <= s; ++j) {
    const double sj = seminorm(u, j);
    acc += sj * sj;
  }
  return std::sqrt(acc);
}

double linf_norm(const SpectralField& u) {
  if (u.empty()) throw GridMismatch("linf_norm of empty field");
  return u.values().cwiseAbs().maxCoeff();
}

double agmon_ratio(const SpectralField& u) {
  const double l2 = seminorm(u, 0);
  if (l2 == 0.0) return 0.0;
  const double h2 = sobolev_norm(u, 2);
  const double e = u.grid().dims() / 4.0;
  return linf_norm(u) / (std::pow(h2, e) * std::pow(l2, 1.0 - e));
}

void write_field_csv(std::ostream& os, const SpectralField& u) {
  os << "k1,k2,k3,coef\n";
  const auto& g = u.grid();
  const Eigen::Index m1 = g.dims() > 1 ? g.modes(1) : 1;
  const Eigen::Index m2 = g.dims() > 2 ? g.modes(2) : 1;
  char buf[64];
  Eigen::Index idx = 0;
  for (Eigen::Index k0 = 1; k0 <= g.modes(0); ++k0)
    for (Eigen::Index k1 = 1; k1 <= m1; ++k1)
      for (Eigen::Index k2 = 1; k2 <= m2; ++k2, ++idx) {
        std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%.17g\n",
                      static_cast<long long>(k0), static_cast<long long>(k1),
                      static_cast<long long>(k2), u.coef()(idx));
        os << buf;
      }
}

SpectralField read_field_csv(std::istream& is, const std::shared_ptr<const BoxGrid>& grid) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("k1,k2,k3,coef", 0) != 0)
    throw ConfigError("field csv: missing header");
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(grid->num_modes());
  const Eigen::Index m1 = grid->dims() > 1 ? grid->modes(1) : 1;
  const Eigen::Index m2 = grid->dims() > 2 ? grid->modes(2) : 1;
  Eigen::Index count = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    long long k0 = 0, k1 = 0, k2 = 0;
    double c = 0;
    if (std::sscanf(line.c_str(), "%lld,%lld,%lld,%lg", &k0, &k1, &k2, &c) != 4)
      throw ConfigError("field csv: malformed line: " + line);
    if (k0 < 1 || k0 > grid->modes(0) || k1 < 1 || k1 > m1 || k2 < 1 || k2 > m2)
      throw GridMismatch("field csv: mode index outside grid");
    coef((k0 - 1) * m1 * m2 + (k1 - 1) * m2 + (k2 - 1)) = c;
    ++count;
  }
  if (count != grid->num_modes()) throw GridMismatch("field csv: wrong number of rows");
  return SpectralField(grid, std::move(coef));
}

}  // namespace jps
