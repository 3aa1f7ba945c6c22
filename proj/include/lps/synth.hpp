#pragma once

#include <string>
#include <vector>

#include "lps/grid.hpp"

namespace lps {

struct SynthParams {
    DomainKind kind = DomainKind::torus;
    int N = 256;
    double L = 1.0;
    int M = 1;
    double r = 2.0;
    int k = 1;            ///< frequency for cos
    int depth = 3;        ///< haar: 2^depth cells
    double width = 1.0;   ///< bump and dirac-col
    double center = 0.0;
};

/// Named inputs, sampled exactly at the grid points:
///   cos        cos(k x1) (torus angle or first coordinate)
///   lacunary   torus, coordinate k = cos(2^k theta), k = 1 .. M
///   haar       line [-L, L) with 2^depth cells: +1 on the left half, -1 on the right
///   bump       exp(-1/(1 - |y|^2)) with y = (x - center) / width
///   hermite2   4 x1^2 - 2 on a Gaussian kind
///   dirac-col  the bump rescaled to unit integral (an approximate identity as width -> 0)
GridFunction synth(const std::string& name, const SynthParams& params);
const std::vector<std::string>& synth_names();

}  // namespace lps
