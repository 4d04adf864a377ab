#include "polent/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "polent/error.hpp"

namespace polent::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string f;
  while (in >> f) out.push_back(f);
  return out;
}

std::uint64_t parse_count(std::string_view token, const std::string& context) {
  std::uint64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorKind::Format, context + ": expected a non-negative integer count, got '" +
                                std::string(token) + "'");
  }
  return value;
}

/// Reads data lines, skipping blanks. Lines starting with '#' go to `header`
/// when it is still empty, otherwise they are ignored.
template <typename RowFn>
void for_each_row(std::istream& in, const std::string& source, std::string* header, RowFn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (header && header->empty()) *header = trim(std::string_view(t).substr(1));
      continue;
    }
    fn(split_fields(t), source + ":" + std::to_string(line_no));
  }
}

void expect_fields(const std::vector<std::string>& f, std::size_t n, const std::string& where) {
  if (f.size() != n) {
    fail(ErrorKind::Format, where + ": expected " + std::to_string(n) + " columns, got " +
                                std::to_string(f.size()));
  }
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::scientific, 16);
  if (ec != std::errc()) fail(ErrorKind::Format, "cannot format number");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view token, const std::string& context) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    fail(ErrorKind::Format, context + ": expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

void write_jsa(std::ostream& out, const JsaGrid& jsa) {
  const auto& g = jsa.grid;
  out << "# " << g.n_s() << ' ' << g.n_i() << ' ' << format_double(g.signal.origin) << ' '
      << format_double(g.signal.step) << ' ' << format_double(g.idler.origin) << ' '
      << format_double(g.idler.step) << '\n';
  for (std::size_t j = 0; j < g.n_s(); ++j) {
    for (std::size_t k = 0; k < g.n_i(); ++k) {
      const auto v = jsa.amplitude(j, k);
      out << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
    }
  }
}

JsaGrid read_jsa(std::istream& in, const std::string& source) {
  std::string header;
  std::vector<std::complex<double>> values;
  for_each_row(in, source, &header, [&](const std::vector<std::string>& f, const std::string& where) {
    expect_fields(f, 2, where);
    values.emplace_back(parse_double(f[0], where), parse_double(f[1], where));
  });
  const auto h = split_fields(header);
  if (h.size() != 6) fail(ErrorKind::Format, source + ": JSA header needs 6 fields");
  const auto n_s = static_cast<std::size_t>(parse_count(h[0], source + ": header"));
  const auto n_i = static_cast<std::size_t>(parse_count(h[1], source + ": header"));
  FrequencyGrid grid{{parse_double(h[2], source), parse_double(h[3], source), n_s},
                     {parse_double(h[4], source), parse_double(h[5], source), n_i}};
  grid.validate();
  if (values.size() != n_s * n_i) {
    fail(ErrorKind::Format, source + ": expected " + std::to_string(n_s * n_i) +
                                " amplitude rows, got " + std::to_string(values.size()));
  }
  JsaGrid jsa{grid, ComplexGrid(n_s, n_i), 0.0};
  for (std::size_t j = 0; j < n_s; ++j)
    for (std::size_t k = 0; k < n_i; ++k) jsa.amplitude(j, k) = values[j * n_i + k];
  if (std::abs(jsa.norm() - 1.0) > 1e-9) normalize(jsa);
  return jsa;
}

void write_jsa_magnitude(std::ostream& out, const JsaGrid& jsa) {
  out << "# lambda_s_nm lambda_i_nm abs_f\n";
  for (std::size_t j = 0; j < jsa.grid.n_s(); ++j) {
    const double ls = omega_to_wavelength(jsa.grid.signal.at(j)) / kNano;
    for (std::size_t k = 0; k < jsa.grid.n_i(); ++k) {
      const double li = omega_to_wavelength(jsa.grid.idler.at(k)) / kNano;
      out << format_double(ls) << ' ' << format_double(li) << ' '
          << format_double(std::abs(jsa.amplitude(j, k))) << '\n';
    }
  }
}

void write_sweep(std::ostream& out, const DelaySweep& sweep) {
  out << "# tau_fs Re_D Im_D abs_D alpha beta purity phase_rad\n";
  for (const auto& s : sweep.samples) {
    out << format_double(s.tau / kFemto) << ' ' << format_double(s.d.real()) << ' '
        << format_double(s.d.imag()) << ' ' << format_double(std::abs(s.d)) << ' '
        << format_double(s.alpha) << ' ' << format_double(s.beta) << ' '
        << format_double(s.purity) << ' ' << format_double(s.phase) << '\n';
  }
}

DelaySweep read_sweep(std::istream& in, const std::string& source) {
  DelaySweep sweep;
  for_each_row(in, source, nullptr, [&](const std::vector<std::string>& f, const std::string& where) {
    expect_fields(f, 8, where);
    DelaySample s{};
    s.tau = parse_double(f[0], where) * kFemto;
    s.d = {parse_double(f[1], where), parse_double(f[2], where)};
    s.alpha = parse_double(f[4], where);
    s.beta = parse_double(f[5], where);
    s.purity = parse_double(f[6], where);
    s.phase = parse_double(f[7], where);
    if (!sweep.samples.empty() && !(s.tau > sweep.samples.back().tau)) {
      fail(ErrorKind::Format, where + ": tau must be strictly increasing");
    }
    sweep.samples.push_back(s);
  });
  return sweep;
}

void write_density_matrix(std::ostream& out, const Matrix4cd& rho) {
  out << "# row col re im  (basis HH HV VH VV)\n";
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      out << r << ' ' << c << ' ' << format_double(rho(r, c).real()) << ' '
          << format_double(rho(r, c).imag()) << '\n';
}

Matrix4cd read_density_matrix(std::istream& in, const std::string& source) {
  Matrix4cd rho = Matrix4cd::Zero();
  std::array<bool, 16> seen{};
  for_each_row(in, source, nullptr, [&](const std::vector<std::string>& f, const std::string& where) {
    expect_fields(f, 4, where);
    const auto r = parse_count(f[0], where);
    const auto c = parse_count(f[1], where);
    if (r > 3 || c > 3) fail(ErrorKind::Format, where + ": index out of range");
    if (seen[r * 4 + c]) fail(ErrorKind::Format, where + ": duplicate element");
    seen[r * 4 + c] = true;
    rho(static_cast<int>(r), static_cast<int>(c)) = {parse_double(f[2], where),
                                                     parse_double(f[3], where)};
  });
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) {
      fail(ErrorKind::Format, source + ": missing element (" + std::to_string(k / 4) + ", " +
                                  std::to_string(k % 4) + ")");
    }
  }
  return rho;
}

void write_count_table(std::ostream& out, const CountTable& table) {
  out << "# " << format_double(table.acquisition_time) << ' ' << format_double(table.gate_rate)
      << '\n';
  for (const auto& r : table.records) {
    out << token(r.basis_a) << ' ' << token(r.basis_b) << ' ' << r.coincidences << ' '
        << r.singles_a << ' ' << r.singles_b << '\n';
  }
}

CountTable read_count_table(std::istream& in, const std::string& source) {
  CountTable table;
  std::string header;
  std::array<bool, kProjectionCount> seen{};
  for_each_row(in, source, &header, [&](const std::vector<std::string>& f, const std::string& where) {
    expect_fields(f, 5, where);
    const auto a = parse_basis(f[0]);
    const auto b = parse_basis(f[1]);
    if (!a || !b) fail(ErrorKind::Format, where + ": unknown basis label");
    const auto idx = projection_index(*a, *b);
    if (seen[idx]) {
      fail(ErrorKind::Format, where + ": duplicate record for basis pair (" +
                                  std::string(token(*a)) + ", " + std::string(token(*b)) + ")");
    }
    seen[idx] = true;
    auto& r = table.records[idx];
    r.basis_a = *a;
    r.basis_b = *b;
    r.coincidences = parse_count(f[2], where);
    r.singles_a = parse_count(f[3], where);
    r.singles_b = parse_count(f[4], where);
  });
  const auto h = split_fields(header);
  if (h.size() != 2) {
    fail(ErrorKind::Format, source + ": header must be '# acquisition_s gate_rate_hz'");
  }
  table.acquisition_time = parse_double(h[0], source + ": header");
  table.gate_rate = parse_double(h[1], source + ": header");
  if (!(table.acquisition_time > 0.0) || !(table.gate_rate > 0.0)) {
    fail(ErrorKind::Format, source + ": acquisition time and gate rate must be positive");
  }
  for (Basis a : kAllBases) {
    for (Basis b : kAllBases) {
      if (!seen[projection_index(a, b)]) {
        fail(ErrorKind::Format, source + ": missing record for basis pair (" +
                                    std::string(token(a)) + ", " + std::string(token(b)) + ")");
      }
    }
  }
  estimate_accidentals(table);
  return table;
}

void write_metrics(std::ostream& out, const StateMetrics& m) {
  out << "purity " << format_double(m.purity) << '\n';
  out << "concurrence " << format_double(m.concurrence) << '\n';
  if (m.fidelity_vs_reference) out << "fidelity " << format_double(*m.fidelity_vs_reference) << '\n';
  out << "re_D " << format_double(m.d_extracted.real()) << '\n';
  out << "im_D " << format_double(m.d_extracted.imag()) << '\n';
  out << "abs_D " << format_double(std::abs(m.d_extracted)) << '\n';
  out << "phase_rad " << format_double(m.phase) << '\n';
  if (m.car) out << "car " << format_double(*m.car) << '\n';
}

std::vector<DelayObservation> read_observations(std::istream& in, const std::string& source) {
  std::vector<DelayObservation> obs;
  for_each_row(in, source, nullptr, [&](const std::vector<std::string>& f, const std::string& where) {
    expect_fields(f, 3, where);
    obs.push_back({parse_double(f[0], where) * kFemto,
                   {parse_double(f[1], where), parse_double(f[2], where)}});
  });
  return obs;
}

std::map<std::string, std::string> read_key_values(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Config, where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) fail(ErrorKind::Config, where + ": empty key");
    if (!out.emplace(key, value).second) {
      fail(ErrorKind::Config, where + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

}  // namespace polent::io
