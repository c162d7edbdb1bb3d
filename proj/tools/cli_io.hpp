#pragma once

#include "tale/linalg.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace tale::cli {

using nlohmann::json;

/// Accepts decimal or 0x-prefixed hex.
std::uint64_t parse_seed(const std::string& s);

/// r0:r1:count[:log|:lin], log spacing by default.
std::vector<double> parse_radii(const std::string& s);

/// Comma-separated coordinates.
Vec parse_point(const std::string& s);

/// lo:hi, applied to every axis.
std::pair<double, double> parse_box(const std::string& s);

/// Spinor JSON: an array of [re, im] pairs, or an object with "spinor" (and optionally "point").
CVec read_spinor(const std::string& path);
json spinor_json(const CVec& v);
json vector_json(const Vec& v);
json matrix_json(const Mat& m);

/// "-" writes to standard output; otherwise write a sibling temp file and rename it into place.
void write_output(const std::string& path, const std::string& content);

std::string sha256_hex(const std::string& content);
std::string read_file(const std::string& path);

}  // namespace tale::cli
