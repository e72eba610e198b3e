#include "lwk/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "lwk/errors.hpp"

namespace lwk {

namespace {

void require_open(const std::ios& stream, const std::string& path, const char* what) {
    if (!stream)
        throw IoError(std::string(what) + ": cannot open " + path);
}

} // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_pgm(const GridFunction& f, const std::string& path,
               std::optional<std::pair<double, double>> range) {
    f.spec.validate();
    double lo, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
    } else {
        lo = *std::min_element(f.values.begin(), f.values.end());
        hi = *std::max_element(f.values.begin(), f.values.end());
    }

    std::ofstream out(path, std::ios::binary);
    require_open(out, path, "write_pgm");
    out << "P5\n" << f.spec.nx << " " << f.spec.ny << "\n65535\n";

    const double span = hi - lo;
    std::vector<unsigned char> row(static_cast<std::size_t>(f.spec.nx) * 2);
    for (int j = 0; j < f.spec.ny; ++j) {
        for (int i = 0; i < f.spec.nx; ++i) {
            double t = span > 0.0 ? (f.at(i, j) - lo) / span : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
            row[static_cast<std::size_t>(i) * 2] = static_cast<unsigned char>(q >> 8);
            row[static_cast<std::size_t>(i) * 2 + 1] = static_cast<unsigned char>(q & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw IoError("write_pgm: write failed for " + path);
}

std::vector<std::uint16_t> read_pgm(const std::string& path, int& nx, int& ny) {
    std::ifstream in(path, std::ios::binary);
    require_open(in, path, "read_pgm");

    std::string magic;
    in >> magic;
    if (magic != "P5")
        throw IoError("read_pgm: not a P5 file: " + path);
    int maxval = 0;
    in >> nx >> ny >> maxval;
    if (!in || nx <= 0 || ny <= 0)
        throw IoError("read_pgm: bad header in " + path);
    if (maxval != 65535)
        throw IoError("read_pgm: expected 16-bit samples in " + path);
    in.get();  // the single whitespace byte after maxval

    std::vector<std::uint16_t> pixels(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    std::vector<unsigned char> raw(pixels.size() * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw IoError("read_pgm: truncated pixel data in " + path);
    for (std::size_t k = 0; k < pixels.size(); ++k)
        pixels[k] = static_cast<std::uint16_t>((raw[2 * k] << 8) | raw[2 * k + 1]);
    return pixels;
}

void write_trace_csv(const SolveResult& result, const std::string& path) {
    std::ofstream out(path);
    require_open(out, path, "write_trace_csv");
    out << "sweep,i,residual,mu,skipped,R_n,bregman\n";

    std::size_t si = 0;  // sweep records parallel the step records in order
    for (const StepRecord& st : result.steps) {
        while (si < result.sweeps.size() && result.sweeps[si].sweep < st.sweep)
            ++si;
        double rn = std::numeric_limits<double>::quiet_NaN();
        double breg = std::numeric_limits<double>::quiet_NaN();
        if (si < result.sweeps.size() && result.sweeps[si].sweep == st.sweep) {
            rn = result.sweeps[si].residual_sum_p;
            if (result.sweeps[si].bregman)
                breg = *result.sweeps[si].bregman;
        }
        out << st.sweep << ',' << st.index << ',' << format_g17(st.residual) << ','
            << format_g17(st.mu) << ',' << (st.skipped ? 1 : 0) << ',' << format_g17(rn) << ','
            << format_g17(breg) << '\n';
    }
    if (!out)
        throw IoError("write_trace_csv: write failed for " + path);
}

} // namespace lwk
