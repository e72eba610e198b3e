#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lwk/grid.hpp"
#include "lwk/solver.hpp"

namespace lwk {

/// 16-bit binary PGM (P5, maxval 65535, big-endian samples). Values are
/// mapped linearly from [lo, hi] (default: the field's min/max) onto
/// [0, 65535] and clamped. The first pixel row written is the j = 0 row of
/// the field, so top-to-bottom in the file is increasing y. A degenerate
/// range (hi == lo) maps everything to 0.
void write_pgm(const GridFunction& f, const std::string& path,
               std::optional<std::pair<double, double>> range = std::nullopt);

/// Test helper for round-trips; accepts only the format written above.
std::vector<std::uint16_t> read_pgm(const std::string& path, int& nx, int& ny);

/// One row per inner step under the header
/// "sweep,i,residual,mu,skipped,R_n,bregman". R_n and bregman repeat the
/// parent sweep's record on every row of that sweep; bregman prints as nan
/// when no reference element was tracked. Floats carry 17 significant
/// digits so traces are exact on re-read.
void write_trace_csv(const SolveResult& result, const std::string& path);

std::string format_g17(double v);

} // namespace lwk
