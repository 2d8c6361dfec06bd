#include "qilab/map.hpp"

#include "qilab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qilab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kUnitTolerance = 1e-12;

bool same_vector(const Point& a, const Point& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

void require_dim(int dim) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
}

void require_finite(const Point& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be finite");
}

void require_axis(int dim, int axis) {
  if (axis < 0 || axis >= dim) {
    std::ostringstream os;
    os << "axis index " << axis << " out of range for dimension " << dim;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

Point eval_gadget(const node::BallGadget& g, const Point& x) {
  const double nx = x.norm();
  const auto& norms = g.center_norms;
  // A ball k can only contain x if | |x| - |c_k| | <= r_k <= max_radius.
  auto lo = std::lower_bound(norms.begin(), norms.end(), nx - g.max_radius);
  auto hi = std::upper_bound(norms.begin(), norms.end(), nx + g.max_radius);
  for (auto it = lo; it != hi; ++it) {
    const std::size_t k = g.order[static_cast<std::size_t>(it - norms.begin())];
    const Point& c = g.data.centers[k];
    const double r = g.data.radii[k];
    const double dist = (x - c).norm();
    if (dist <= r) {
      Point y = x;
      y[g.data.axis] += g.data.drift_fraction * r * std::max(0.0, 1.0 - dist / r);
      return y;
    }
  }
  return x;
}

Point eval_clamp(const node::Clamp& c, const Point& x) {
  const double nx = x.norm();
  if (nx < c.R0) return x;
  Point fx = evaluate(c.inner, x);
  Point d = fx - x;
  const double nd = d.norm();
  const double cap = c.C * std::pow(nx, c.alpha);
  if (nd <= cap) return fx;
  Point y = x + (cap / nd) * d;
  if ((y - x).norm() <= cap) return y;
  // Rounding x + v can push the stored displacement past the cap; aim below it
  // by a bound on that rounding so the represented map honours the cap.
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (nx + cap);
  if (cap <= slack) return x;
  return x + ((cap - slack) / nd) * d;
}

}  // namespace

void GadgetData::validate() const {
  if (centers.size() != radii.size()) {
    throw Error(ErrorCode::InvalidArgument, "gadget centers and radii differ in length");
  }
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || !std::isfinite(radii[k])) {
      throw Error(ErrorCode::InvalidArgument, "gadget radii must be positive and finite");
    }
    if (k > 0 && !(radii[k] > radii[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "gadget radii must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (i == j) continue;
      const double dist = (centers[i] - centers[j]).norm();
      if (dist <= radii[j]) {
        throw Error(ErrorCode::InvalidArgument, "gadget center lies inside another ball");
      }
      if (i < j && dist <= radii[i] + radii[j]) {
        throw Error(ErrorCode::InvalidArgument, "gadget balls are not pairwise disjoint");
      }
    }
  }
}

bool GadgetData::operator==(const GadgetData& other) const {
  if (centers.size() != other.centers.size()) return false;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (!same_vector(centers[k], other.centers[k])) return false;
  }
  return radii == other.radii && drift_fraction == other.drift_fraction && axis == other.axis;
}

Map Map::identity(int dim) {
  require_dim(dim);
  return Map(dim, std::make_shared<const Node>(node::Identity{}));
}

Map Map::translation(Point v) {
  require_dim(static_cast<int>(v.size()));
  require_finite(v, "translation vector");
  const int dim = static_cast<int>(v.size());
  return Map(dim, std::make_shared<const Node>(node::Translation{std::move(v)}));
}

Map Map::dilation(int dim, double lambda) {
  require_dim(dim);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "dilation factor must be positive");
  }
  return Map(dim, std::make_shared<const Node>(node::Dilation{lambda}));
}

Map Map::affine(Matrix A, Point b) {
  const int dim = static_cast<int>(b.size());
  require_dim(dim);
  if (A.rows() != dim || A.cols() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "affine matrix must be n x n with n = |b|");
  }
  if (!A.allFinite()) throw Error(ErrorCode::InvalidArgument, "affine matrix must be finite");
  require_finite(b, "affine offset");
  return Map(dim, std::make_shared<const Node>(node::Affine{std::move(A), std::move(b)}));
}

Map Map::block_rotation(int dim, double theta, int first, int second) {
  require_dim(dim);
  if (dim < 2) throw Error(ErrorCode::UnsupportedDimension, "block rotation needs n >= 2");
  require_axis(dim, first);
  require_axis(dim, second);
  if (first == second) throw Error(ErrorCode::InvalidArgument, "rotation plane axes must differ");
  if (!std::isfinite(theta)) throw Error(ErrorCode::InvalidArgument, "rotation angle must be finite");
  return Map(dim, std::make_shared<const Node>(node::BlockRotation{theta, first, second}));
}

Map Map::reflection(int dim) {
  require_dim(dim);
  return Map(dim, std::make_shared<const Node>(node::Reflection{}));
}

Map Map::log_drift(double A, Point v) {
  const int dim = static_cast<int>(v.size());
  require_dim(dim);
  require_finite(v, "drift direction");
  if (!std::isfinite(A)) throw Error(ErrorCode::InvalidArgument, "drift amplitude must be finite");
  if (std::abs(v.norm() - 1.0) > kUnitTolerance) {
    throw Error(ErrorCode::InvalidArgument, "log-drift direction must be a unit vector");
  }
  return Map(dim, std::make_shared<const Node>(node::LogDrift{A, std::move(v)}));
}

Map Map::linear_over_log(int dim) {
  require_dim(dim);
  return Map(dim, std::make_shared<const Node>(node::LinearOverLog{}));
}

Map Map::polar_exp(int dim) {
  if (dim != 2) throw Error(ErrorCode::UnsupportedDimension, "polar exponential map is defined for n = 2 only");
  return Map(dim, std::make_shared<const Node>(node::PolarExp{}));
}

Map Map::gadget(int dim, GadgetData data) {
  require_dim(dim);
  require_axis(dim, data.axis);
  for (const auto& c : data.centers) {
    if (c.size() != dim) throw Error(ErrorCode::DimensionMismatch, "gadget center dimension");
    require_finite(c, "gadget center");
  }
  data.validate();
  node::BallGadget g;
  g.order.resize(data.centers.size());
  std::iota(g.order.begin(), g.order.end(), std::size_t{0});
  std::vector<double> norms(data.centers.size());
  for (std::size_t k = 0; k < norms.size(); ++k) norms[k] = data.centers[k].norm();
  std::stable_sort(g.order.begin(), g.order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });
  g.center_norms.reserve(norms.size());
  for (std::size_t k : g.order) g.center_norms.push_back(norms[k]);
  for (double r : data.radii) g.max_radius = std::max(g.max_radius, r);
  g.data = std::move(data);
  return Map(dim, std::make_shared<const Node>(std::move(g)));
}

Map Map::clamp(Map inner, double alpha, double C, double R0) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "clamp exponent must lie in (0,1)");
  if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorCode::InvalidArgument, "clamp constant C must be positive");
  if (!(R0 > 0.0) || !std::isfinite(R0)) throw Error(ErrorCode::InvalidArgument, "clamp radius R0 must be positive");
  const int dim = inner.dimension();
  auto c = std::make_shared<const node::Clamp>(node::Clamp{std::move(inner), alpha, C, R0});
  return Map(dim, std::make_shared<const Node>(std::move(c)));
}

Map Map::compose(Map outer, Map inner) {
  if (outer.dimension() != inner.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "cannot compose maps of different dimensions");
  }
  const int dim = outer.dimension();
  auto c = std::make_shared<const node::Compose>(node::Compose{std::move(outer), std::move(inner)});
  return Map(dim, std::make_shared<const Node>(std::move(c)));
}

bool Map::operator==(const Map& other) const {
  if (dim_ != other.dim_) return false;
  if (node_ == other.node_) return true;
  if (node_->index() != other.node_->index()) return false;
  return std::visit(
      overloaded{
          [](const node::Identity&) { return true; },
          [&](const node::Translation& a) {
            return same_vector(a.v, std::get<node::Translation>(*other.node_).v);
          },
          [&](const node::Dilation& a) { return a.lambda == std::get<node::Dilation>(*other.node_).lambda; },
          [&](const node::Affine& a) {
            const auto& b = std::get<node::Affine>(*other.node_);
            return same_matrix(a.A, b.A) && same_vector(a.b, b.b);
          },
          [&](const node::BlockRotation& a) {
            const auto& b = std::get<node::BlockRotation>(*other.node_);
            return a.theta == b.theta && a.first == b.first && a.second == b.second;
          },
          [](const node::Reflection&) { return true; },
          [&](const node::LogDrift& a) {
            const auto& b = std::get<node::LogDrift>(*other.node_);
            return a.A == b.A && same_vector(a.v, b.v);
          },
          [](const node::LinearOverLog&) { return true; },
          [](const node::PolarExp&) { return true; },
          [&](const node::BallGadget& a) { return a.data == std::get<node::BallGadget>(*other.node_).data; },
          [&](const std::shared_ptr<const node::Clamp>& a) {
            const auto& b = std::get<std::shared_ptr<const node::Clamp>>(*other.node_);
            return a->alpha == b->alpha && a->C == b->C && a->R0 == b->R0 && a->inner == b->inner;
          },
          [&](const std::shared_ptr<const node::Compose>& a) {
            const auto& b = std::get<std::shared_ptr<const node::Compose>>(*other.node_);
            return a->outer == b->outer && a->inner == b->inner;
          },
      },
      *node_);
}

Point evaluate(const Map& map, const Point& x) {
  if (x.size() != map.dimension()) {
    std::ostringstream os;
    os << "point has dimension " << x.size() << ", map has dimension " << map.dimension();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  return std::visit(
      overloaded{
          [&](const node::Identity&) -> Point { return x; },
          [&](const node::Translation& t) -> Point { return x + t.v; },
          [&](const node::Dilation& d) -> Point { return d.lambda * x; },
          [&](const node::Affine& a) -> Point { return a.A * x + a.b; },
          [&](const node::BlockRotation& r) -> Point {
            const double c = std::cos(r.theta);
            const double s = std::sin(r.theta);
            Point y = x;
            y[r.first] = c * x[r.first] - s * x[r.second];
            y[r.second] = s * x[r.first] + c * x[r.second];
            return y;
          },
          [&](const node::Reflection&) -> Point { return -x; },
          [&](const node::LogDrift& l) -> Point { return x + (l.A * std::log1p(x.norm())) * l.v; },
          [&](const node::LinearOverLog&) -> Point { return x + x / std::log(2.0 + x.norm()); },
          [&](const node::PolarExp&) -> Point {
            // (r, θ) ↦ (e^{sin θ} r, θ); sin θ = x₂/|x|, and the origin is fixed.
            const double nx = x.norm();
            if (nx == 0.0) return x;
            return std::exp(x[1] / nx) * x;
          },
          [&](const node::BallGadget& g) -> Point { return eval_gadget(g, x); },
          [&](const std::shared_ptr<const node::Clamp>& c) -> Point { return eval_clamp(*c, x); },
          [&](const std::shared_ptr<const node::Compose>& c) -> Point {
            return evaluate(c->outer, evaluate(c->inner, x));
          },
      },
      map.node());
}

Map compose(const Map& outer, const Map& inner) { return Map::compose(outer, inner); }

Map power(const Map& map, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative powers need exact_inverse");
  if (k == 0) return Map::identity(map.dimension());
  Map result = map;
  for (int i = 1; i < k; ++i) result = Map::compose(map, result);
  return result;
}

Map exact_inverse(const Map& map) {
  const int dim = map.dimension();
  return std::visit(
      overloaded{
          [&](const node::Identity&) { return map; },
          [&](const node::Translation& t) { return Map::translation(-t.v); },
          [&](const node::Dilation& d) { return Map::dilation(dim, 1.0 / d.lambda); },
          [&](const node::Affine& a) {
            Eigen::FullPivLU<Matrix> lu(a.A);
            if (!lu.isInvertible()) {
              throw Error(ErrorCode::NotExactlyInvertible, "affine matrix is singular");
            }
            Matrix inv = lu.inverse();
            Point b = -(inv * a.b);
            return Map::affine(std::move(inv), std::move(b));
          },
          [&](const node::BlockRotation& r) { return Map::block_rotation(dim, -r.theta, r.first, r.second); },
          [&](const node::Reflection&) { return map; },
          [&](const std::shared_ptr<const node::Compose>& c) {
            return Map::compose(exact_inverse(c->inner), exact_inverse(c->outer));
          },
          [&](const auto&) -> Map {
            throw Error(ErrorCode::NotExactlyInvertible,
                        "only the affine family has a structural inverse; use certificate-level bounds");
          },
      },
      map.node());
}

double displacement(const Map& map, const Point& x) { return (evaluate(map, x) - x).norm(); }

std::optional<std::pair<Matrix, Point>> affine_form(const Map& map) {
  const int n = map.dimension();
  using Form = std::optional<std::pair<Matrix, Point>>;
  return std::visit(
      overloaded{
          [&](const node::Identity&) -> Form { return std::pair{Matrix::Identity(n, n), Point::Zero(n)}; },
          [&](const node::Translation& t) -> Form { return std::pair{Matrix::Identity(n, n), t.v}; },
          [&](const node::Dilation& d) -> Form {
            return std::pair{Matrix(d.lambda * Matrix::Identity(n, n)), Point::Zero(n)};
          },
          [&](const node::Affine& a) -> Form { return std::pair{a.A, a.b}; },
          [&](const node::BlockRotation& r) -> Form {
            Matrix M = Matrix::Identity(n, n);
            const double c = std::cos(r.theta);
            const double s = std::sin(r.theta);
            M(r.first, r.first) = c;
            M(r.first, r.second) = -s;
            M(r.second, r.first) = s;
            M(r.second, r.second) = c;
            return std::pair{M, Point::Zero(n)};
          },
          [&](const node::Reflection&) -> Form {
            return std::pair{Matrix(-Matrix::Identity(n, n)), Point::Zero(n)};
          },
          [&](const std::shared_ptr<const node::Compose>& c) -> Form {
            auto outer = affine_form(c->outer);
            auto inner = affine_form(c->inner);
            if (!outer || !inner) return std::nullopt;
            return std::pair{Matrix(outer->first * inner->first),
                             Point(outer->first * inner->second + outer->second)};
          },
          [](const auto&) -> Form { return std::nullopt; },
      },
      map.node());
}

Point basis_vector(int dim, int axis) {
  require_axis(dim, axis);
  Point e = Point::Zero(dim);
  e[axis] = 1.0;
  return e;
}

std::vector<Point> distinguished_directions(const Map& map) {
  const int n = map.dimension();
  std::vector<Point> out;
  std::visit(
      overloaded{
          [&](const node::BlockRotation& r) {
            Point a = basis_vector(n, r.first);
            Point b = basis_vector(n, r.second);
            out.push_back(a);
            out.push_back(b);
            out.push_back((a + b).normalized());
            out.push_back((a - b).normalized());
          },
          [&](const node::LogDrift& l) {
            out.push_back(l.v);
            out.push_back(-l.v);
          },
          [&](const node::BallGadget& g) {
            for (const auto& c : g.data.centers) {
              if (c.norm() > 0.0) out.push_back(c.normalized());
            }
          },
          [&](const std::shared_ptr<const node::Clamp>& c) { out = distinguished_directions(c->inner); },
          [&](const std::shared_ptr<const node::Compose>& c) {
            out = distinguished_directions(c->outer);
            for (auto& d : distinguished_directions(c->inner)) out.push_back(std::move(d));
          },
          [](const auto&) {},
      },
      map.node());
  return out;
}

}  // namespace qilab
