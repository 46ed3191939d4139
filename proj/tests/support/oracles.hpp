#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "compmodel/model.hpp"

namespace testsupport {

// Brute-force evaluation of a classical (FinFn or Stoch) diagram: enumerate
// every input tuple and every assignment of values to wires, multiplying
// generator entries along the way. Returns the cod x dom matrix.
Eigen::MatrixXd path_sum(const compmodel::ModelBinding& b, const compmodel::Diagram& d);

// Matrix form of a classical morphism.
Eigen::MatrixXd as_matrix(const compmodel::MorphSem& m);

}  // namespace testsupport
