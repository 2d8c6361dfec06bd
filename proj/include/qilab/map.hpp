#pragma once

// Symbolic self-maps of R^n.
//
// A Map is an immutable expression tree. Composition builds a new node and
// never simplifies, so evaluate(compose(f, g), x) is literally
// evaluate(f, evaluate(g, x)). Nodes are shared between trees; copying a Map
// is a refcount bump.

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qilab {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Data of the ball gadget: on the closed ball B(centers[k], radii[k]) the map
/// is x + drift_fraction * radii[k] * max(0, 1 - |x - c_k| / r_k) * e_axis,
/// i.e. the rescaled inner map h(y) = y + drift_fraction * max(0, 1-|y|) e_axis.
/// Outside every ball it is the identity.
struct GadgetData {
  std::vector<Point> centers;
  std::vector<double> radii;
  double drift_fraction = 0.25;
  int axis = 0;  // zero-based
  std::string provenance;

  /// Throws InvalidArgument unless balls are pairwise disjoint, radii are
  /// strictly increasing and positive, and no center lies in another ball.
  void validate() const;

  bool operator==(const GadgetData& other) const;
};

class Map;

namespace node {

struct Identity {};
struct Translation {
  Point v;
};
struct Dilation {
  double lambda;
};
struct Affine {
  Matrix A;
  Point b;
};
struct BlockRotation {
  double theta;
  int first;   // zero-based axis indices spanning the rotation plane
  int second;
};
struct Reflection {};
struct LogDrift {
  double A;
  Point v;
};
struct LinearOverLog {};
struct PolarExp {};
struct BallGadget {
  GadgetData data;
  std::vector<std::size_t> order;  // ball indices sorted by center norm
  std::vector<double> center_norms;  // sorted, parallel to order
  double max_radius = 0.0;
};
struct Clamp;
struct Compose;

}  // namespace node

class Map {
 public:
  using Node = std::variant<node::Identity, node::Translation, node::Dilation,
                            node::Affine, node::BlockRotation, node::Reflection,
                            node::LogDrift, node::LinearOverLog, node::PolarExp,
                            node::BallGadget, std::shared_ptr<const node::Clamp>,
                            std::shared_ptr<const node::Compose>>;

  static Map identity(int dim);
  static Map translation(Point v);
  static Map dilation(int dim, double lambda);
  static Map affine(Matrix A, Point b);
  static Map block_rotation(int dim, double theta, int first, int second);
  static Map reflection(int dim);
  /// v must have unit norm within 1e-12; it is not normalized for the caller.
  static Map log_drift(double A, Point v);
  static Map linear_over_log(int dim);
  static Map polar_exp(int dim);
  static Map gadget(int dim, GadgetData data);
  static Map clamp(Map inner, double alpha, double C, double R0);
  static Map compose(Map outer, Map inner);

  int dimension() const noexcept { return dim_; }
  const Node& node() const noexcept { return *node_; }

  bool operator==(const Map& other) const;

 private:
  Map(int dim, std::shared_ptr<const Node> node) : dim_(dim), node_(std::move(node)) {}

  int dim_;
  std::shared_ptr<const Node> node_;
};

namespace node {

struct Clamp {
  Map inner;
  double alpha;
  double C;
  double R0;
};

struct Compose {
  Map outer;
  Map inner;
};

}  // namespace node

Point evaluate(const Map& map, const Point& x);

/// outer ∘ inner.
Map compose(const Map& outer, const Map& inner);

/// map composed with itself k times; k = 0 gives the identity.
Map power(const Map& map, int k);

/// Structural inverse for the affine family (identity, translation, dilation,
/// invertible affine, block rotation, reflection and compositions of these).
/// Anything else raises NotExactlyInvertible.
Map exact_inverse(const Map& map);

/// |map(x) - x|.
double displacement(const Map& map, const Point& x);

/// (M, b) with map(x) = Mx + b when the map belongs to the affine family.
std::optional<std::pair<Matrix, Point>> affine_form(const Map& map);

/// Directions a map singles out: rotation planes, drift axes, gadget axes.
/// Unit vectors, possibly repeated.
std::vector<Point> distinguished_directions(const Map& map);

/// Unit basis vector e_axis in R^dim.
Point basis_vector(int dim, int axis);

}  // namespace qilab
