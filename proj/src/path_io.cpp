#include "awb/path_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace awb {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string path_to_csv(const SamplePath& path) {
    std::string out = "t,x\n";
    for (std::size_t k = 0; k < path.grid.size(); ++k) {
        out += format_double(path.grid[k]);
        out += ',';
        out += format_double(path.values[k]);
        out += '\n';
    }
    return out;
}

void write_path_csv(const SamplePath& path, const std::string& out_path) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f)
        throw io_error("cannot open for writing: " + out_path);
    f << path_to_csv(path);
    f.flush();
    if (!f)
        throw io_error("write failed: " + out_path);
}

SamplePath read_path_csv(const std::string& in_path, double horizon_T) {
    std::ifstream f(in_path, std::ios::binary);
    if (!f)
        throw io_error("cannot open for reading: " + in_path);
    std::string line;
    if (!std::getline(f, line))
        throw io_error("empty file: " + in_path);
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "t,x")
        throw io_error("expected header 't,x' in " + in_path);

    std::vector<double> times, values;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw io_error(in_path + ":" + std::to_string(lineno) + ": expected 't,x' row");
        char* end = nullptr;
        const std::string ts = line.substr(0, comma);
        const std::string xs = line.substr(comma + 1);
        const double t = std::strtod(ts.c_str(), &end);
        if (end == ts.c_str() || *end != '\0')
            throw io_error(in_path + ":" + std::to_string(lineno) + ": bad time value");
        const double x = std::strtod(xs.c_str(), &end);
        if (end == xs.c_str() || *end != '\0')
            throw io_error(in_path + ":" + std::to_string(lineno) + ": bad state value");
        times.push_back(t);
        values.push_back(x);
    }
    SamplePath path{TimeGrid(std::move(times)), std::move(values),
                    BridgeParams{0.0, 1.0, horizon_T}};
    validate_path(path);
    return path;
}

} // namespace awb
