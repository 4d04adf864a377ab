#include "polent/dichroic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "polent/error.hpp"
#include "polent/io.hpp"

namespace polent {

namespace {

// 10 %-90 % width in units of the profile scale parameter.
constexpr double kLogisticWidthScale = 4.394449154672439;  // 2 ln 9
constexpr double kErfWidthScale = 1.8123876048736466;      // 2 erfinv(0.8)

double analytic_transmission(const SplitterResponse& resp, double lambda, double edge) {
  double x = lambda - edge;
  if (resp.sense == EdgeSense::ShortPass) x = -x;
  if (resp.shape == EdgeShape::Logistic) {
    return 1.0 / (1.0 + std::exp(-x * kLogisticWidthScale / resp.step_width));
  }
  return 0.5 * std::erfc(-x * kErfWidthScale / resp.step_width);
}

}  // namespace

double TabulatedTransmission::operator()(double wavelength_m) const {
  if (wavelength_m <= wavelength.front()) return transmission.front();
  if (wavelength_m >= wavelength.back()) return transmission.back();
  const auto it = std::upper_bound(wavelength.begin(), wavelength.end(), wavelength_m);
  const auto k = static_cast<std::size_t>(it - wavelength.begin());
  const double w = (wavelength_m - wavelength[k - 1]) / (wavelength[k] - wavelength[k - 1]);
  return (1.0 - w) * transmission[k - 1] + w * transmission[k];
}

void TabulatedTransmission::validate() const {
  if (wavelength.size() < 2 || wavelength.size() != transmission.size()) {
    fail(ErrorKind::Format, "transmission table needs at least two (lambda, T) rows");
  }
  bool rising = true, falling = true;
  for (std::size_t k = 0; k < wavelength.size(); ++k) {
    if (!(transmission[k] >= 0.0 && transmission[k] <= 1.0)) {
      fail(ErrorKind::Format, "transmission table: T outside [0, 1]");
    }
    if (k == 0) continue;
    if (!(wavelength[k] > wavelength[k - 1])) {
      fail(ErrorKind::Format, "transmission table: wavelengths must be strictly increasing");
    }
    rising = rising && transmission[k] >= transmission[k - 1];
    falling = falling && transmission[k] <= transmission[k - 1];
  }
  if (!rising && !falling) fail(ErrorKind::Format, "transmission table: T is not monotonic");
}

void SplitterResponse::validate() const {
  for (double edge : {edge_wavelength_h, edge_wavelength_v}) {
    if (!(edge > 0.0) || !std::isfinite(edge)) {
      fail(ErrorKind::Domain, "SplitterResponse: edge wavelength must be positive");
    }
  }
  if (!(step_width > 0.0) || !std::isfinite(step_width)) {
    fail(ErrorKind::Domain, "SplitterResponse: step width must be positive");
  }
  if (table_h) table_h->validate();
  if (table_v) table_v->validate();
}

EdgeValue edge_response(const SplitterResponse& resp, double omega, Polarization pol) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    fail(ErrorKind::Domain, "edge_response: angular frequency must be positive");
  }
  const double lambda = omega_to_wavelength(omega);
  const auto& table = pol == Polarization::H ? resp.table_h : resp.table_v;
  double t = 0.0;
  if (table) {
    t = (*table)(lambda);
  } else {
    const double edge = pol == Polarization::H ? resp.edge_wavelength_h : resp.edge_wavelength_v;
    t = analytic_transmission(resp, lambda, edge);
  }
  return {t, 1.0 - t};
}

SampledSplitter sample_on_grid(const SplitterResponse& resp, const FrequencyGrid& grid) {
  grid.validate();
  resp.validate();
  SampledSplitter out;
  out.t_h.resize(grid.n_s());
  out.r_h.resize(grid.n_s());
  out.t_v.resize(grid.n_i());
  out.r_v.resize(grid.n_i());
  for (std::size_t j = 0; j < grid.n_s(); ++j) {
    const auto [t, r] = edge_response(resp, grid.signal.at(j), Polarization::H);
    out.t_h[j] = t;
    out.r_h[j] = r;
  }
  for (std::size_t k = 0; k < grid.n_i(); ++k) {
    const auto [t, r] = edge_response(resp, grid.idler.at(k), Polarization::V);
    out.t_v[k] = t;
    out.r_v[k] = r;
  }
  return out;
}

TabulatedTransmission read_transmission_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open transmission table '" + path + "'");
  TabulatedTransmission table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (!(fields >> b) || (fields >> extra)) {
      fail(ErrorKind::Format, where + ": expected 'lambda_nm T'");
    }
    table.wavelength.push_back(io::parse_double(a, where) * kNano);
    table.transmission.push_back(io::parse_double(b, where));
  }
  table.validate();
  return table;
}

}  // namespace polent
