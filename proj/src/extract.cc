#include "rieszocp/extract.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace rieszocp {

double ControlPolynomial::eval(int i, double t) const {
  const Eigen::VectorXd& c = coefficients.at(i);
  double v = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * t + c(k);
  return v;
}

double ControlPolynomial::eval_clipped(int i, double t, Interval clip, bool* clipped) const {
  const double v = eval(i, t);
  const double w = std::clamp(v, clip.lo, clip.hi);
  if (clipped) *clipped = w != v;
  return w;
}

ControlPolynomial ControlPolynomial::constant(std::vector<double> values, double horizon) {
  ControlPolynomial u;
  u.horizon = horizon;
  for (double v : values) u.coefficients.push_back(Eigen::VectorXd::Constant(1, v));
  return u;
}

std::string ControlPolynomial::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "degree";
  for (int k = 0; k <= degree(); ++k) os << ",c" << k;
  os << "\n";
  for (const Eigen::VectorXd& c : coefficients) {
    os << c.size() - 1;
    for (int k = 0; k < c.size(); ++k) os << "," << c(k);
    os << "\n";
  }
  return os.str();
}

ControlPolynomial ControlPolynomial::from_csv(const std::string& text, double horizon) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("degree", 0) != 0) {
    throw std::invalid_argument("control table: missing header");
  }
  ControlPolynomial u;
  u.horizon = horizon;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(fields, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::invalid_argument("control table: row " + std::to_string(row) + ": not a number: " + cell);
      }
    }
    if (values.size() < 2 || values[0] != static_cast<double>(values.size() - 2)) {
      throw std::invalid_argument("control table: row " + std::to_string(row) + ": degree does not match");
    }
    if (!u.coefficients.empty() && u.coefficients[0].size() != static_cast<Eigen::Index>(values.size() - 1)) {
      throw std::invalid_argument("control table: row " + std::to_string(row) + ": components differ in degree");
    }
    u.coefficients.push_back(Eigen::Map<const Eigen::VectorXd>(values.data() + 1, values.size() - 1));
  }
  if (u.coefficients.empty()) throw std::invalid_argument("control table: no components");
  return u;
}

ControlPolynomial extract_controller(const MomentVector& y, int r, int m, double horizon) {
  if (r < 0 || m < 0) throw std::invalid_argument("extract_controller: negative order or control dimension");
  if (!(y.mass() >= 1e-10)) throw std::runtime_error("degenerate occupation measure");
  const int d = r / 2;
  const int nv = y.nvars();
  const int first_control = nv - m;
  if (first_control < 1) throw std::invalid_argument("extract_controller: moment vector has too few variables");

  const auto moment = [&](int p, int control) {
    MultiIndex a(nv);
    a = a.with(0, p);
    if (control >= 0) a = a.with(first_control + control, 1);
    if (y.basis->index_of(a) < 0) throw std::invalid_argument("extract_controller: moment " + a.str() + " missing");
    return y.at(a);
  };

  Eigen::MatrixXd H(d + 1, d + 1);
  for (int j = 0; j <= d; ++j) {
    for (int k = 0; k <= d; ++k) H(j, k) = moment(j + k, -1);
  }
  const double ridge = 1e-8 * H.trace() / (d + 1);
  Eigen::MatrixXd Hr = H;
  Hr.diagonal().array() += ridge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(Hr);

  // Internal time is s = a t + b; p(s) = sum c_k s^k expands into physical t.
  const AffineMap& tm = y.scaling.time();
  Eigen::MatrixXd to_physical = Eigen::MatrixXd::Zero(d + 1, d + 1);  // column k: coefficients of s^k in t
  to_physical(0, 0) = 1.0;
  for (int k = 1; k <= d; ++k) {
    for (int j = 0; j < k; ++j) {
      to_physical(j, k) += tm.shift * to_physical(j, k - 1);
      to_physical(j + 1, k) += tm.scale * to_physical(j, k - 1);
    }
  }

  ControlPolynomial u;
  u.horizon = horizon;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd g(d + 1);
    for (int j = 0; j <= d; ++j) g(j) = moment(j, i);
    // Refinement against the unregularized H; every step lowers l_y((u - p)^2).
    Eigen::VectorXd c = ldlt.solve(g);
    for (int pass = 0; pass < 3; ++pass) c += ldlt.solve(g - H * c);
    u.coefficients.push_back(to_physical * c);
  }
  return u;
}

}  // namespace rieszocp
