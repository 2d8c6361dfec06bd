#include "qilab/dsl.hpp"

#include "qilab/error.hpp"

#include <cstdio>
#include <sstream>

namespace qilab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, "at " + path + ": " + what);
}

const Json& field(const Json& node, const char* key, const std::string& path) {
  auto it = node.find(key);
  if (it == node.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const Json& node, const char* key, const std::string& path) {
  const Json& v = field(node, key, path);
  if (!v.is_number()) fail(path + "/" + key, "expected a number");
  return v.get<double>();
}

int one_based_axis(const Json& v, int dim, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer axis index");
  const auto axis = v.get<long long>();
  if (axis < 1 || axis > dim) fail(path, "axis index out of range 1.." + std::to_string(dim));
  return static_cast<int>(axis - 1);
}

Matrix matrix_from_json(const Json& j, int dim, const std::string& path) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dim)) {
    fail(path, "expected " + std::to_string(dim) + " rows");
  }
  Matrix A(dim, dim);
  for (int r = 0; r < dim; ++r) A.row(r) = point_from_json(j[r], dim, path + "/" + std::to_string(r)).transpose();
  return A;
}

// Library-level validation errors inside a document are reported as parse
// errors at the node that triggered them.
template <class F>
Map guarded(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(path, e.what());
  }
}

}  // namespace

Json point_to_json(const Point& p) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) arr.push_back(p[i]);
  return arr;
}

Point point_from_json(const Json& j, int dim, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  if (j.size() != static_cast<std::size_t>(dim)) {
    fail(path, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(j.size()));
  }
  Point p(dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number()) fail(path + "/" + std::to_string(i), "expected a number");
    p[i] = j[i].get<double>();
  }
  return p;
}

Json map_to_json(const Map& map) {
  return std::visit(
      overloaded{
          [](const node::Identity&) { return Json{{"op", "identity"}}; },
          [](const node::Translation& t) { return Json{{"op", "translation"}, {"v", point_to_json(t.v)}}; },
          [](const node::Dilation& d) { return Json{{"op", "dilation"}, {"lambda", d.lambda}}; },
          [](const node::Affine& a) {
            Json rows = Json::array();
            for (Eigen::Index r = 0; r < a.A.rows(); ++r) rows.push_back(point_to_json(a.A.row(r).transpose()));
            return Json{{"op", "affine"}, {"A", rows}, {"b", point_to_json(a.b)}};
          },
          [](const node::BlockRotation& r) {
            return Json{{"op", "rotation"}, {"theta", r.theta}, {"plane", {r.first + 1, r.second + 1}}};
          },
          [](const node::Reflection&) { return Json{{"op", "reflection"}}; },
          [](const node::LogDrift& l) { return Json{{"op", "logdrift"}, {"A", l.A}, {"v", point_to_json(l.v)}}; },
          [](const node::LinearOverLog&) { return Json{{"op", "linear_over_log"}}; },
          [](const node::PolarExp&) { return Json{{"op", "polar_exp"}}; },
          [](const node::BallGadget& g) {
            Json centers = Json::array();
            for (const auto& c : g.data.centers) centers.push_back(point_to_json(c));
            Json j{{"op", "gadget"},
                   {"centers", centers},
                   {"radii", g.data.radii},
                   {"drift_fraction", g.data.drift_fraction},
                   {"axis", g.data.axis + 1}};
            if (!g.data.provenance.empty()) j["provenance"] = g.data.provenance;
            return j;
          },
          [](const std::shared_ptr<const node::Clamp>& c) {
            return Json{{"op", "clamp"}, {"inner", map_to_json(c->inner)}, {"alpha", c->alpha}, {"C", c->C}, {"R0", c->R0}};
          },
          [](const std::shared_ptr<const node::Compose>& c) {
            return Json{{"op", "compose"}, {"outer", map_to_json(c->outer)}, {"inner", map_to_json(c->inner)}};
          },
      },
      map.node());
}

Map map_from_json(const Json& node, int dim, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  const Json& op_field = field(node, "op", path);
  if (!op_field.is_string()) fail(path + "/op", "expected a string");
  const std::string op = op_field.get<std::string>();

  return guarded(path, [&]() -> Map {
    if (op == "identity") return Map::identity(dim);
    if (op == "translation") return Map::translation(point_from_json(field(node, "v", path), dim, path + "/v"));
    if (op == "dilation") return Map::dilation(dim, number(node, "lambda", path));
    if (op == "affine") {
      return Map::affine(matrix_from_json(field(node, "A", path), dim, path + "/A"),
                         point_from_json(field(node, "b", path), dim, path + "/b"));
    }
    if (op == "rotation") {
      const Json& plane = field(node, "plane", path);
      if (!plane.is_array() || plane.size() != 2) fail(path + "/plane", "expected two axis indices");
      return Map::block_rotation(dim, number(node, "theta", path), one_based_axis(plane[0], dim, path + "/plane/0"),
                                 one_based_axis(plane[1], dim, path + "/plane/1"));
    }
    if (op == "reflection") return Map::reflection(dim);
    if (op == "logdrift") {
      return Map::log_drift(number(node, "A", path), point_from_json(field(node, "v", path), dim, path + "/v"));
    }
    if (op == "linear_over_log") return Map::linear_over_log(dim);
    if (op == "polar_exp") return Map::polar_exp(dim);
    if (op == "gadget") {
      GadgetData data;
      const Json& centers = field(node, "centers", path);
      if (!centers.is_array()) fail(path + "/centers", "expected an array of points");
      for (std::size_t k = 0; k < centers.size(); ++k) {
        data.centers.push_back(point_from_json(centers[k], dim, path + "/centers/" + std::to_string(k)));
      }
      const Json& radii = field(node, "radii", path);
      if (!radii.is_array()) fail(path + "/radii", "expected an array of numbers");
      for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!radii[k].is_number()) fail(path + "/radii/" + std::to_string(k), "expected a number");
        data.radii.push_back(radii[k].get<double>());
      }
      data.drift_fraction = node.contains("drift_fraction") ? number(node, "drift_fraction", path) : 0.25;
      data.axis = node.contains("axis") ? one_based_axis(node["axis"], dim, path + "/axis") : dim - 1;
      if (node.contains("provenance") && node["provenance"].is_string()) {
        data.provenance = node["provenance"].get<std::string>();
      }
      return Map::gadget(dim, std::move(data));
    }
    if (op == "clamp") {
      return Map::clamp(map_from_json(field(node, "inner", path), dim, path + "/inner"), number(node, "alpha", path),
                        number(node, "C", path), number(node, "R0", path));
    }
    if (op == "compose") {
      return Map::compose(map_from_json(field(node, "outer", path), dim, path + "/outer"),
                          map_from_json(field(node, "inner", path), dim, path + "/inner"));
    }
    fail(path + "/op", "unknown op \"" + op + "\"");
  });
}

Json map_document(const Map& map) { return Json{{"dimension", map.dimension()}, {"map", map_to_json(map)}}; }

Map map_from_document(const Json& doc) {
  if (!doc.is_object()) fail("", "expected a JSON object document");
  const Json& d = field(doc, "dimension", "");
  if (!d.is_number_integer() || d.get<long long>() < 1) fail("/dimension", "expected a positive integer");
  return map_from_json(field(doc, "map", ""), static_cast<int>(d.get<long long>()), "/map");
}

std::string print_map_document(const Map& map) { return map_document(map).dump(); }

Map parse_map_document(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::ostringstream os;
    os << "syntax error at byte " << e.byte << ": " << e.what();
    throw Error(ErrorCode::ParseError, os.str());
  }
  return map_from_document(doc);
}

std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string map_digest(const Map& map) { return digest_hex(print_map_document(map)); }

}  // namespace qilab
