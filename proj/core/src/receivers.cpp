#include "pat/receivers.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pat {

namespace {

using nlohmann::json;

// sin(pi u) with exact zeros at integers.
double sin_pi(double u) {
  const double n = std::nearbyint(u);
  const double s = std::sin(std::numbers::pi * (u - n));
  return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

double sinc_pi(double u) { return u == 0.0 ? 1.0 : sin_pi(u) / (std::numbers::pi * u); }

std::string describe(const Point& p) {
  std::ostringstream os;
  os << "(" << p[0] << ", " << p[1] << ")";
  return os.str();
}

Receiver straight_receiver(const Point& a, const Point& b, int n_nodes, const Point& normal_out) {
  Receiver r;
  r.normal_out = normal_out;
  const int n_el = n_nodes - 1;
  for (int i = 0; i < n_nodes; ++i) {
    const double s = static_cast<double>(i) / n_el;
    r.nodes.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
  }
  const double length = std::hypot(b[0] - a[0], b[1] - a[1]);
  for (int k = 0; k < n_el; ++k) {
    r.elements.push_back({static_cast<std::size_t>(k), static_cast<std::size_t>(k + 1)});
    r.element_lengths.push_back(length / n_el);
  }
  return r;
}

}  // namespace

std::size_t ReceiverArray::node_count() const {
  std::size_t n = 0;
  for (const auto& r : receivers) n += r.nodes.size();
  return n;
}

std::size_t ReceiverArray::element_count() const {
  std::size_t n = 0;
  for (const auto& r : receivers) n += r.elements.size();
  return n;
}

ReceiverArray ReceiverArray::subset(std::size_t first, std::size_t count) const {
  if (first + count > receivers.size()) throw std::out_of_range("receiver subset out of range");
  ReceiverArray out;
  out.on_grid = on_grid;
  out.receivers.assign(receivers.begin() + static_cast<std::ptrdiff_t>(first),
                       receivers.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

ReceiverArray build_circular_array(int n_receivers, double radius, double half_length,
                                   int nodes_per_receiver, Point center) {
  if (n_receivers < 1) throw std::invalid_argument("circular array: need at least one receiver");
  if (!(half_length > 0.0) || !(radius > half_length))
    throw std::invalid_argument("circular array: require radius > half_length > 0");
  if (nodes_per_receiver < 2)
    throw std::invalid_argument("circular array: need at least two nodes per receiver");
  const double arc = 2.0 * std::numbers::pi * radius / n_receivers;
  if (n_receivers > 1 && arc < 2.0 * half_length)
    throw std::invalid_argument("circular array: receivers overlap (arc spacing " +
                                std::to_string(arc) + " < segment length " +
                                std::to_string(2.0 * half_length) + ")");

  ReceiverArray array;
  for (int r = 0; r < n_receivers; ++r) {
    const double theta = 2.0 * std::numbers::pi * r / n_receivers;
    const Point n_out{std::cos(theta), std::sin(theta)};
    const Point tangent{-n_out[1], n_out[0]};
    const Point c{center[0] + radius * n_out[0], center[1] + radius * n_out[1]};
    const Point a{c[0] - half_length * tangent[0], c[1] - half_length * tangent[1]};
    const Point b{c[0] + half_length * tangent[0], c[1] + half_length * tangent[1]};
    array.receivers.push_back(straight_receiver(a, b, nodes_per_receiver, n_out));
  }
  return array;
}

ReceiverArray build_ongrid_lines(const Grid& grid, std::span<const Side> sides, int inset) {
  if (inset < 1) throw std::invalid_argument("on-grid lines: inset must be at least 1");
  const int p = grid.pml_size();
  ReceiverArray array;
  array.on_grid = true;
  for (Side side : sides) {
    // fixed axis and its full-grid index; the other axis runs along the side
    int fixed_axis = 0;
    int fixed_index = 0;
    Point normal{};
    switch (side) {
      case Side::kLeft:
        fixed_axis = 0, fixed_index = p + inset - 1, normal = {-1.0, 0.0};
        break;
      case Side::kRight:
        fixed_axis = 0, fixed_index = p + grid.dim(0) - inset, normal = {1.0, 0.0};
        break;
      case Side::kBottom:
        fixed_axis = 1, fixed_index = p + inset - 1, normal = {0.0, -1.0};
        break;
      case Side::kTop:
        fixed_axis = 1, fixed_index = p + grid.dim(1) - inset, normal = {0.0, 1.0};
        break;
    }
    if (inset > grid.dim(fixed_axis)) throw std::invalid_argument("on-grid lines: inset exceeds grid");
    const int run_axis = 1 - fixed_axis;
    for (int m = 0; m + 1 < grid.dim(run_axis); ++m) {
      Point a{}, b{};
      a[static_cast<std::size_t>(fixed_axis)] = grid.coordinate(fixed_axis, fixed_index);
      b[static_cast<std::size_t>(fixed_axis)] = a[static_cast<std::size_t>(fixed_axis)];
      a[static_cast<std::size_t>(run_axis)] = grid.coordinate(run_axis, p + m);
      b[static_cast<std::size_t>(run_axis)] = grid.coordinate(run_axis, p + m + 1);
      array.receivers.push_back(straight_receiver(a, b, 2, normal));
    }
  }
  return array;
}

std::vector<double> quadrature_weights(const ReceiverArray& array) {
  std::vector<double> w;
  w.reserve(array.node_count());
  for (const auto& r : array.receivers) {
    std::vector<double> local(r.nodes.size(), 0.0);
    for (std::size_t k = 0; k < r.elements.size(); ++k) {
      const double share = r.element_lengths[k] / static_cast<double>(r.elements[k].size());
      for (std::size_t j : r.elements[k]) local.at(j) += share;
    }
    w.insert(w.end(), local.begin(), local.end());
  }
  return w;
}

DeltaKernel delta_kernel(const Point& node, const Grid& grid, double b, double eps) {
  if (!(b > 0.0)) throw std::invalid_argument("delta kernel: bandwidth must be positive");
  if (eps < 0.0) throw std::invalid_argument("delta kernel: threshold must be non-negative");
  const std::size_t n0 = static_cast<std::size_t>(grid.total(0));
  const std::size_t n1 = static_cast<std::size_t>(grid.total(1));
  const double scale = grid.dx() / b;

  std::array<std::vector<double>, kDim> factor;
  std::array<double, kDim> peak{};
  for (int a = 0; a < kDim; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const double centre = grid.index_of(a, node[ua]);
    factor[ua].resize(ua == 0 ? n0 : n1);
    for (std::size_t i = 0; i < factor[ua].size(); ++i) {
      factor[ua][i] = sinc_pi((centre - static_cast<double>(i)) * scale) / b;
      peak[ua] = std::max(peak[ua], std::abs(factor[ua][i]));
    }
  }

  DeltaKernel k;
  k.bandwidth = b;
  k.threshold = eps;
  for (std::size_t i = 0; i < n0; ++i) {
    const double fx = factor[0][i];
    if (std::abs(fx) * peak[1] <= eps) continue;
    for (std::size_t j = 0; j < n1; ++j) {
      const double v = fx * factor[1][j];
      if (std::abs(v) > eps) k.entries.push_back({i * n1 + j, v});
    }
  }
  if (k.entries.empty())
    throw std::invalid_argument("delta kernel: node " + describe(node) +
                                " has no grid support above the threshold");
  return k;
}

DeltaKernel exact_delta(const Point& node, const Grid& grid) {
  std::array<std::size_t, kDim> idx{};
  for (int a = 0; a < kDim; ++a) {
    const double u = grid.index_of(a, node[static_cast<std::size_t>(a)]);
    const double r = std::nearbyint(u);
    if (std::abs(u - r) > 1e-6 || r < 0 || r >= grid.total(a))
      throw std::invalid_argument("exact delta: node " + describe(node) + " is not on a grid point");
    idx[static_cast<std::size_t>(a)] = static_cast<std::size_t>(r);
  }
  DeltaKernel k;
  k.bandwidth = grid.dx();
  k.entries.push_back({idx[0] * static_cast<std::size_t>(grid.total(1)) + idx[1],
                       1.0 / grid.cell_volume()});
  return k;
}

std::vector<DeltaKernel> build_kernels(const ReceiverArray& array, const Grid& grid, double b,
                                       double eps) {
  std::vector<DeltaKernel> kernels;
  kernels.reserve(array.node_count());
  std::size_t j = 0;
  for (const auto& r : array.receivers) {
    for (const auto& node : r.nodes) {
      try {
        kernels.push_back(array.on_grid ? exact_delta(node, grid) : delta_kernel(node, grid, b, eps));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("receiver node " + std::to_string(j) + ": " + e.what());
      }
      ++j;
    }
  }
  return kernels;
}

void write_receiver_array(const ReceiverArray& array, std::ostream& os) {
  json doc;
  doc["format"] = "pat-receivers";
  doc["version"] = 1;
  doc["on_grid"] = array.on_grid;
  doc["receivers"] = json::array();
  for (const auto& r : array.receivers) {
    json jr;
    jr["normal_out"] = r.normal_out;
    jr["nodes"] = r.nodes;
    jr["elements"] = r.elements;
    jr["element_lengths"] = r.element_lengths;
    doc["receivers"].push_back(std::move(jr));
  }
  os << doc.dump(1) << '\n';
}

ReceiverArray read_receiver_array(std::istream& is) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("receiver file: ") + e.what());
  }
  if (doc.value("format", "") != "pat-receivers")
    throw std::runtime_error("receiver file: missing format tag 'pat-receivers'");
  ReceiverArray array;
  array.on_grid = doc.at("on_grid").get<bool>();
  for (const auto& jr : doc.at("receivers")) {
    Receiver r;
    r.normal_out = jr.at("normal_out").get<Point>();
    r.nodes = jr.at("nodes").get<std::vector<Point>>();
    r.elements = jr.at("elements").get<std::vector<std::array<std::size_t, 2>>>();
    r.element_lengths = jr.at("element_lengths").get<std::vector<double>>();
    if (r.elements.size() != r.element_lengths.size())
      throw std::runtime_error("receiver file: element/length count mismatch");
    for (const auto& e : r.elements)
      if (e[0] >= r.nodes.size() || e[1] >= r.nodes.size())
        throw std::runtime_error("receiver file: element references missing node");
    array.receivers.push_back(std::move(r));
  }
  return array;
}

}  // namespace pat
