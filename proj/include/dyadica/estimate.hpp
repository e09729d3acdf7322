#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dyadica/grid.hpp"

namespace dyadica {

/// Value of a testing / Muckenhoupt / weak-boundedness / norm functional
/// together with how it was obtained and enough witness data to replay it.
struct ConstantEstimate {
    enum class Kind { ExactSup, LowerBound };

    std::string name;
    double value = 0.0;
    Kind kind = Kind::ExactSup;
    std::string family;                 // search space description
    std::vector<CubeId> witness_cubes;  // argmax cube(s)
    Eigen::VectorXd witness_f;          // optimizing function / coefficient vector
    Eigen::VectorXd witness_coeffs;     // sequence coefficients a_i when applicable
    std::uint64_t seed = 0;

    const char* kind_str() const {
        return kind == Kind::ExactSup ? "exact-sup" : "lower-bound";
    }
};

}  // namespace dyadica
