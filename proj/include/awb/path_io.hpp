#pragma once

#include <string>

#include "awb/model.hpp"

namespace awb {

// Round-trip-safe decimal rendering (17 significant digits).
std::string format_double(double v);

// CSV trajectory record: header "t,x", one row per grid point. The horizon T
// is deliberately not embedded; it travels as a flag / parameter.
void write_path_csv(const SamplePath& path, const std::string& out_path);
std::string path_to_csv(const SamplePath& path);

// Reads a CSV written by write_path_csv. horizon_T must exceed the last
// observation time. Provenance fields of the result default to
// (alpha = 0, sigma = 1) since the file does not carry them.
SamplePath read_path_csv(const std::string& in_path, double horizon_T);

} // namespace awb
