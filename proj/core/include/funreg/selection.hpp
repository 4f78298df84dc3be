#pragma once

#include "funreg/regression.hpp"

#include <string>
#include <vector>

namespace funreg {

/// Candidate tuning parameters alpha = (h, L) for one estimator.
struct TuningGrid {
    std::vector<Bandwidth> bandwidths;
    std::vector<Eigen::Index> truncations;
    Method method = Method::fcr;
    FitOptions options;
};

struct CvCell {
    double bandwidth;
    Eigen::Index truncation;
    double pe;        ///< average leave-one-out squared prediction error; NaN when infeasible
    bool feasible;
    std::string failure;
};

struct CvReport {
    Method method;
    std::vector<CvCell> cells; ///< bandwidth-major, in the order of the tuning grid
    std::size_t chosen;        ///< index into `cells`
    /// Leave-one-out predictions (subjects x response grid) per cell; only
    /// filled when requested, empty matrices for infeasible cells.
    std::vector<Eigen::MatrixXd> predictions;

    const CvCell& best() const { return cells.at(chosen); }
};

struct CvOptions {
    bool keep_predictions = false;
};

/// Leave-one-curve-out cross-validation. Every fold refits the whole
/// pipeline on the remaining n-1 pairs. Cells whose fit fails numerically
/// in some fold are reported infeasible; the arg-min over feasible cells is
/// chosen, ties going to the smaller truncation, then the smaller bandwidth.
CvReport loocv(const FunctionalSample& x, const FunctionalSample& y, const TuningGrid& grid,
               const CvOptions& options = {});

} // namespace funreg
