// Copyright 2026 The fluxcz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace fluxcz {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

/// Flips column signs so that each column's largest-magnitude entry is positive.
inline void fix_gauge(RMat &vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index r;
        vectors.col(c).cwiseAbs().maxCoeff(&r);
        if (vectors(r, c) < 0) {
            vectors.col(c) *= -1.0;
        }
    }
}

/// Relative Frobenius distance of m from its adjoint.
inline double hermiticity_defect(const CMat &m) {
    double n = m.norm();
    if (n == 0) {
        return 0;
    }
    return (m - m.adjoint()).norm() / n;
}

/// Real symmetric eigensolve with ascending eigenvalues and gauge-fixed vectors.
inline void eigh(const RMat &h, RVec &values, RMat &vectors) {
    Eigen::SelfAdjointEigenSolver<RMat> es(h);
    values = es.eigenvalues();
    vectors = es.eigenvectors();
    fix_gauge(vectors);
}

}  // namespace fluxcz
