#include "cli_io.hpp"

#include "tale/errors.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace tale::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& what)
{
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("bad number in " + what + ": '" + s + "'");
}

}  // namespace

std::uint64_t parse_seed(const std::string& s)
{
    try {
        size_t used = 0;
        const auto v = std::stoull(s, &used, 0);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("bad seed '" + s + "'");
}

std::vector<double> parse_radii(const std::string& s)
{
    const auto parts = split(s, ':');
    if (parts.size() < 3 || parts.size() > 4) throw UsageError("expected radii r0:r1:count[:log|lin], got '" + s + "'");
    const double r0 = to_double(parts[0], "radii"), r1 = to_double(parts[1], "radii");
    int count = 0;
    try {
        count = std::stoi(parts[2]);
    } catch (const std::exception&) {
        throw UsageError("bad radius count '" + parts[2] + "'");
    }
    const std::string mode = parts.size() == 4 ? parts[3] : "log";
    if (mode != "log" && mode != "lin") throw UsageError("radius spacing must be log or lin");
    if (!(r0 > 0) || !(r1 > r0) || count < 1) throw UsageError("need 0 < r0 < r1 and count >= 1");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out.push_back(mode == "log" ? r0 * std::pow(r1 / r0, f) : r0 + (r1 - r0) * f);
    }
    return out;
}

Vec parse_point(const std::string& s)
{
    const auto parts = split(s, ',');
    if (parts.empty()) throw UsageError("empty point");
    Vec v(static_cast<Eigen::Index>(parts.size()));
    for (size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_double(parts[i], "point");
    return v;
}

std::pair<double, double> parse_box(const std::string& s)
{
    // Split at the colon that is not a sign: "-2:2".
    const auto pos = s.find(':', 1);
    if (pos == std::string::npos) throw UsageError("expected box lo:hi");
    const double lo = to_double(s.substr(0, pos), "box"), hi = to_double(s.substr(pos + 1), "box");
    if (!(hi > lo)) throw UsageError("box needs lo < hi");
    return {lo, hi};
}

CVec read_spinor(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read spinor file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("spinor file '" + path + "' is not JSON: " + e.what());
    }
    const json& arr = j.is_object() ? j.at("spinor") : j;
    if (!arr.is_array() || arr.empty()) throw UsageError("spinor file '" + path + "' has no component array");
    CVec v(static_cast<Eigen::Index>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) {
        const json& c = arr[i];
        if (c.is_number())
            v[static_cast<Eigen::Index>(i)] = c.get<double>();
        else if (c.is_array() && c.size() == 2)
            v[static_cast<Eigen::Index>(i)] = Complex(c[0].get<double>(), c[1].get<double>());
        else
            throw UsageError("spinor components must be [re, im] pairs");
    }
    const auto d = v.size();
    if (d != 2 && d != 4 && d != 8) throw UsageError("spinor length must be 2^(n/2) for n = 2, 4, 6");
    return v;
}

json spinor_json(const CVec& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
    return out;
}

json vector_json(const Vec& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json matrix_json(const Mat& m)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
    return out;
}

void write_output(const std::string& path, const std::string& content)
{
    if (path == "-") {
        std::cout << content << std::flush;
        return;
    }
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw UsageError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw UsageError("cannot move output into place at '" + path + "': " + ec.message());
}

std::string sha256_hex(const std::string& content)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return os.str();
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace tale::cli
