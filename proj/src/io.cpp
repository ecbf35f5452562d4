#include "ssrf/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ssrf/errors.hpp"

namespace ssrf {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

double round9(double x) {
    if (!std::isfinite(x)) {
        return x;
    }
    return std::stod(format_number(x));
}

SampleData parse_samples_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        if (!blank(line)) {
            header = split(line);
            break;
        }
    }
    if (header.size() < 2) {
        throw ArgumentError("CSV header must list at least one coordinate column and a value column");
    }
    const std::size_t cols = header.size();
    std::vector<double> flat;
    std::size_t rows = 0;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (blank(line)) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != cols) {
            throw ArgumentError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                                " fields, got " + std::to_string(cells.size()));
        }
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != c.size()) {
                throw ArgumentError("CSV line " + std::to_string(lineno) + ": '" + c + "' is not a number");
            }
            flat.push_back(v);
        }
        ++rows;
    }
    if (rows < 2) {
        throw DegenerateDataError("insufficient data: at least 2 samples are required, got " + std::to_string(rows));
    }
    SampleData data;
    const auto d = static_cast<Eigen::Index>(cols - 1);
    data.locations.resize(static_cast<Eigen::Index>(rows), d);
    data.values.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        for (Eigen::Index k = 0; k < d; ++k) {
            data.locations(static_cast<Eigen::Index>(r), k) = flat[r * cols + static_cast<std::size_t>(k)];
        }
        data.values(static_cast<Eigen::Index>(r)) = flat[r * cols + cols - 1];
    }
    data.validate();
    return data;
}

SampleData read_samples_csv(const std::string& path) { return parse_samples_csv(read_text(path)); }

std::string samples_csv(const Eigen::MatrixXd& locations, const Eigen::VectorXd& values) {
    std::ostringstream os;
    for (Eigen::Index k = 0; k < locations.cols(); ++k) {
        os << 'x' << (k + 1) << ',';
    }
    os << "value\n";
    for (Eigen::Index i = 0; i < locations.rows(); ++i) {
        for (Eigen::Index k = 0; k < locations.cols(); ++k) {
            os << format_number(locations(i, k)) << ',';
        }
        os << format_number(values(i)) << '\n';
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw ArgumentError("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw ArgumentError("failed writing '" + path + "'");
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ArgumentError("cannot open '" + path + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

nlohmann::json to_json(const ConstraintEstimates& c) {
    nlohmann::json j;
    j["dimension"] = c.dimension;
    j["kernel"] = c.kernel;
    j["s0_bar"] = round9(c.s0_bar);
    j["phi1_bar"] = round9(c.phi1_bar);
    j["phi2_bar"] = round9(c.phi2_bar);
    j["s1_bar"] = round9(c.s1_bar);
    j["s2_bar"] = round9(c.s2_bar);
    j["a1"] = round9(c.a1);
    j["a2"] = round9(c.a2);
    j["h1"] = round9(c.h1);
    j["h2"] = round9(c.h2);
    j["mu1"] = round9(c.mu1);
    j["mu2"] = round9(c.mu2);
    return j;
}

nlohmann::json to_json(const FitResult& r) {
    nlohmann::json j;
    j["eta0"] = round9(r.params.eta0);
    j["eta1"] = round9(r.params.eta1);
    j["xi"] = round9(r.params.xi);
    j["kc"] = round9(r.params.kc);
    j["phi"] = round9(r.phi_value);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["z"] = {round9(r.z_values[0]), round9(r.z_values[1]), round9(r.z_values[2])};
    j["a1"] = round9(r.constraints_used.a1);
    j["h1"] = round9(r.constraints_used.h1);
    j["h2"] = round9(r.constraints_used.h2);
    j["warnings"] = r.warnings;
    nlohmann::json locals = nlohmann::json::array();
    for (const auto& s : r.local_solutions) {
        locals.push_back({{"eta1", round9(s.theta.eta1)},
                          {"xi", round9(s.theta.xi)},
                          {"kc", round9(s.theta.kc)},
                          {"phi", round9(s.phi)},
                          {"converged", s.converged}});
    }
    j["local_solutions"] = locals;
    j["constraints"] = to_json(r.constraints_used);
    return j;
}

std::string csv_row(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += format_number(values[i]);
    }
    return out;
}

}  // namespace ssrf
