#include "cylstab/curve_io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace cylstab {

namespace {

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

double parse_double(const std::string& token, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("curve file: bad number '" + token + "' in " + context);
    }
}

}  // namespace

void write_curve_csv(const PlanarCurve& curve, const std::string& path) {
    std::string out;
    out.reserve(static_cast<std::size_t>(curve.n_samples) * 96 + 256);
    auto meta = [&](const char* key, double v) {
        out += "# ";
        out += key;
        out += "=";
        append_double(out, v);
        out += "\n";
    };
    meta("a", curve.params.a);
    meta("b", curve.params.b);
    out += "# k=" + std::to_string(curve.params.symmetry_order) + "\n";
    out += "# n=" + std::to_string(curve.params.rotation_index) + "\n";
    meta("L", curve.length);
    out += "# n_samples=" + std::to_string(curve.n_samples) + "\n";
    meta("closure_residual", curve.closure_residual);
    out += "s,x1,x2,theta,kappa\n";
    for (int i = 0; i < curve.n_samples; ++i) {
        append_double(out, curve.length * i / curve.n_samples);
        out += ',';
        append_double(out, curve.points[i].x);
        out += ',';
        append_double(out, curve.points[i].y);
        out += ',';
        append_double(out, curve.theta[i]);
        out += ',';
        append_double(out, curve.kappa[i]);
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open '" + path + "' for writing");
    f << out;
    if (!f) throw InvalidArgument("write failed for '" + path + "'");
}

PlanarCurve read_curve_csv(const std::string& path, const SolverConfig& config) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot open curve file '" + path + "'");

    std::map<std::string, std::string> meta;
    std::string line;
    bool header_seen = false;
    std::vector<std::array<double, 5>> rows;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.back() == '\r') line.pop_back();
        if (line[0] == '#') {
            std::string body = line.substr(1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            std::string key = body.substr(0, eq);
            std::string val = body.substr(eq + 1);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            meta[key] = val;
            continue;
        }
        if (!header_seen) {
            if (line != "s,x1,x2,theta,kappa") {
                throw InvalidArgument("curve file: expected header 's,x1,x2,theta,kappa', got '" +
                                      line + "'");
            }
            header_seen = true;
            continue;
        }
        std::array<double, 5> row{};
        std::stringstream ss(line);
        std::string token;
        for (int c = 0; c < 5; ++c) {
            if (!std::getline(ss, token, ',')) {
                throw InvalidArgument("curve file: short row at line " + std::to_string(lineno));
            }
            row[c] = parse_double(token, "line " + std::to_string(lineno));
        }
        rows.push_back(row);
    }
    if (!header_seen) throw InvalidArgument("curve file: missing header row");

    auto require_meta = [&](const char* key) -> std::string {
        const auto it = meta.find(key);
        if (it == meta.end()) {
            throw InvalidArgument(std::string("curve file: missing metadata '") + key + "'");
        }
        return it->second;
    };

    PlanarCurve curve;
    curve.params.a = parse_double(require_meta("a"), "metadata a");
    curve.params.b = parse_double(require_meta("b"), "metadata b");
    curve.params.symmetry_order = static_cast<int>(parse_double(require_meta("k"), "metadata k"));
    curve.params.rotation_index = static_cast<int>(parse_double(require_meta("n"), "metadata n"));
    curve.length = parse_double(require_meta("L"), "metadata L");
    curve.n_samples =
        static_cast<int>(parse_double(require_meta("n_samples"), "metadata n_samples"));
    curve.closure_residual =
        parse_double(require_meta("closure_residual"), "metadata closure_residual");

    if (curve.n_samples != static_cast<int>(rows.size())) {
        throw InvalidArgument("curve file: n_samples=" + std::to_string(curve.n_samples) +
                              " but " + std::to_string(rows.size()) + " rows present");
    }
    curve.points.resize(rows.size());
    curve.theta.resize(rows.size());
    curve.kappa.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        curve.points[i] = {rows[i][1], rows[i][2]};
        curve.theta[i] = rows[i][3];
        curve.kappa[i] = rows[i][4];
    }
    validate_curve(curve, config);
    return curve;
}

}  // namespace cylstab
