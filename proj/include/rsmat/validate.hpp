#pragma once
//
// Structural invariant suites for compressed matrices.
//
// Each check reports the measured defect next to its threshold. The HBS
// transfer and long-basis checks are weighted by the retained singular values
// y / z: a basis column whose weight was zeroed carries no information and is
// allowed to drift off the orthonormal set.
//

#include <string>
#include <vector>

#include "rsmat/serialize.hpp"

namespace rsmat {

struct InvariantCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<InvariantCheck> checks;
  bool passed() const;
};

inline constexpr double kBasisOrthonormalityTol = 1e-12;
// Per level of nesting for the weighted HBS checks.
inline constexpr double kNestedOrthonormalityTol = 1e-11;

ValidationReport validate(const CompressedMatrix& m);
ValidationReport validate(const HodlrMatrix& h);
ValidationReport validate(const HbsMatrix& h);
ValidationReport validate(const HbsIdMatrix& h);

// max |Q^T Q - I|_{ij} w_i w_j / max(w)^2; 0 for an empty basis or zero weights.
double weighted_orthonormality_defect(ConstMatrixView q, const std::vector<double>& w);

// True when every parent skeleton is contained in the union of its
// children's skeletons, for both row and column sides.
bool skeletons_nested(const HbsIdMatrix& h);
// True when the interpolation matrix of every node holds an exact identity at
// the rows of its skeleton.
bool identity_rows_exact(const HbsIdMatrix& h);
// max |b_skel - A(skel_in, skel_out)| over all sibling pairs.
double skeleton_coupling_error(const HbsIdMatrix& h, const DenseMatrix& a);

}  // namespace rsmat
