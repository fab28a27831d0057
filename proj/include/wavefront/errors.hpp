// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace wavefront {

enum class ErrorCode : int {
    Ok = 0,
    InvalidArgument = 1,
    PointOutsideChart = 2,
    OutsideInjectivityRadius = 3,
    ZeroCovector = 4,
    IntegratorDivergence = 5,
    OutsideGeodesicNeighbourhood = 6,
    BranchDegenerate = 7,
    NotALoop = 8,
    SingularPhaseHessian = 9,
    JetOrderInsufficient = 10,
    QuadratureFailure = 11,
    UnsupportedOrder = 12,
    NoStationaryDirection = 13,
    TruncationInsufficient = 14,
    SpectrumTruncated = 15,
    NonAnalyticCall = 16,
    OrderExceeded = 17,
    ModelLoad = 18,
    ConfigParse = 19,
    Internal = 99,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace wavefront
