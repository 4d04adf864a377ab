#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "polent/jointstate.hpp"
#include "polent/metrics.hpp"
#include "polent/spectral.hpp"
#include "polent/tomography.hpp"

namespace polent::io {

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double value);

/// Strict parse of a whole token; throws ErrorKind::Format.
double parse_double(std::string_view token, const std::string& context);

// JSA table: "# n_s n_i omega_s_min omega_s_step omega_i_min omega_i_step"
// followed by n_s * n_i rows "re im", signal-major.
void write_jsa(std::ostream& out, const JsaGrid& jsa);
JsaGrid read_jsa(std::istream& in, const std::string& source = "<stream>");

/// Plot table "lambda_s_nm lambda_i_nm abs_f".
void write_jsa_magnitude(std::ostream& out, const JsaGrid& jsa);

// Sweep table: tau_fs Re_D Im_D abs_D alpha beta purity phase_rad.
void write_sweep(std::ostream& out, const DelaySweep& sweep);
DelaySweep read_sweep(std::istream& in, const std::string& source = "<stream>");

// Density matrix: 16 lines "row col re im".
void write_density_matrix(std::ostream& out, const Matrix4cd& rho);
Matrix4cd read_density_matrix(std::istream& in, const std::string& source = "<stream>");

// Count table: "# acquisition_s gate_rate_hz" then 36 rows
// "basisA basisB coincidences singlesA singlesB". Accidentals are estimated
// from the singles on read.
void write_count_table(std::ostream& out, const CountTable& table);
CountTable read_count_table(std::istream& in, const std::string& source = "<stream>");

/// Metrics report: `key value` lines.
void write_metrics(std::ostream& out, const StateMetrics& metrics);

/// Observation rows "tau_fs re_D im_D".
std::vector<DelayObservation> read_observations(std::istream& in,
                                                const std::string& source = "<stream>");

/// Flat `key = value` file; '#' starts a comment. Duplicate keys are an error.
std::map<std::string, std::string> read_key_values(std::istream& in,
                                                   const std::string& source = "<stream>");

}  // namespace polent::io
