#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lps {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  ///< measured quantities against their thresholds
    double seconds = 0.0;
};

struct VerifyOptions {
    /// "core" runs every criterion; otherwise a comma-separated list of ids, e.g. "1,5,9".
    std::string suite = "core";
    /// "default" or a positive factor applied to every error tolerance.
    std::string tol = "default";
    std::uint64_t seed = 1;
};

int acceptance_count();
std::string acceptance_name(int id);
/// Criterion ids selected by a suite name; throws InvalidArgument on a bad suite.
std::vector<int> acceptance_suite(const std::string& suite);
double tolerance_factor(const std::string& tol);

CriterionResult run_criterion(int id, double tol_factor = 1.0, std::uint64_t seed = 1);
std::vector<CriterionResult> run_acceptance(const VerifyOptions& options);

/// One "PASS|FAIL  id  name  detail" line per criterion.
std::string format_line(const CriterionResult& r);
std::string format_table(const std::vector<CriterionResult>& rows);

}  // namespace lps
