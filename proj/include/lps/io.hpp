#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lps/grid.hpp"
#include "lps/kernelcheck.hpp"
#include "lps/martingale.hpp"
#include "lps/normlab.hpp"

namespace lps {

using json = nlohmann::json;

/// Writes `content` to a sibling temp file, then renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// {"domain": {"kind", "n", "N", "L"}, "r", "values": [[M numbers] per cell]}.
json to_json(const GridFunction& f);
GridFunction grid_function_from_json(const json& j);
void save_grid_function(const std::string& path, const GridFunction& f);
GridFunction load_grid_function(const std::string& path);

/// Columns x1[,x2], c1 .. cM; 17 significant digits.
std::string to_csv(const GridFunction& f);

/// {"operator", "p", "q", "r", "M", "estimate", "seed", "trace": [[iteration, ratio], ...]}
/// plus "variant" and "best_restart".
json to_json(const NormEstimate& e);

/// trial, depth, q, p, statistic, value.
std::string martingale_csv(const MartingaleTrialSpec& spec, const std::vector<MartingaleTrialRow>& rows);

/// scale, size-bound, gradient-bound.
std::string kernel_profile_csv(const CzProfile& profile);

/// Fixed 17-digit rendering used in CSV output.
std::string format_double(double v);

}  // namespace lps
