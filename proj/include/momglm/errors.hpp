#pragma once

#include <stdexcept>
#include <string>

namespace momglm {

// Every failure mode of the library is reported through Error with a stable
// code. Codes split into two families: input/validation problems (bad data,
// bad config, missing columns) and numerical/solver problems (singular
// factorizations, non-convergence). The CLI maps the former to exit code 2
// and the latter to exit code 3.
enum class ErrorCode {
    // validation
    InvalidOrder,
    InvalidIndexLaw,
    EmptyDataset,
    DimensionMismatch,
    IndexOutOfRange,
    MissingResponseA,
    MissingMoment,
    InsufficientSamples,
    RankDeficientDesign,
    NonBinaryA,
    ConfigInvalid,
    CsvInvalid,
    UnknownIdentity,
    TooFewReplicates,
    DegenerateSample,
    // numerical / solver
    NonFiniteIntegral,
    NonPSDCovariance,
    SingularSigma,
    NonMonotoneMap,
    SingularJacobian,
    NoConvergence,
    SingularLinearStage,
    DegenerateG1,
    DegenerateF1,
    SingularGram,
};

inline const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::InvalidIndexLaw: return "InvalidIndexLaw";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::MissingResponseA: return "MissingResponseA";
        case ErrorCode::MissingMoment: return "MissingMoment";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
        case ErrorCode::NonBinaryA: return "NonBinaryA";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::CsvInvalid: return "CsvInvalid";
        case ErrorCode::UnknownIdentity: return "UnknownIdentity";
        case ErrorCode::TooFewReplicates: return "TooFewReplicates";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::NonFiniteIntegral: return "NonFiniteIntegral";
        case ErrorCode::NonPSDCovariance: return "NonPSDCovariance";
        case ErrorCode::SingularSigma: return "SingularSigma";
        case ErrorCode::NonMonotoneMap: return "NonMonotoneMap";
        case ErrorCode::SingularJacobian: return "SingularJacobian";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::SingularLinearStage: return "SingularLinearStage";
        case ErrorCode::DegenerateG1: return "DegenerateG1";
        case ErrorCode::DegenerateF1: return "DegenerateF1";
        case ErrorCode::SingularGram: return "SingularGram";
    }
    return "UnknownError";
}

inline bool is_validation_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidOrder:
        case ErrorCode::InvalidIndexLaw:
        case ErrorCode::EmptyDataset:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::IndexOutOfRange:
        case ErrorCode::MissingResponseA:
        case ErrorCode::MissingMoment:
        case ErrorCode::InsufficientSamples:
        case ErrorCode::RankDeficientDesign:
        case ErrorCode::NonBinaryA:
        case ErrorCode::ConfigInvalid:
        case ErrorCode::CsvInvalid:
        case ErrorCode::UnknownIdentity:
        case ErrorCode::TooFewReplicates:
        case ErrorCode::DegenerateSample:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace momglm
