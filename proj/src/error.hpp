#pragma once

#include <stdexcept>
#include <string>

namespace kosim {

enum class ErrorKind {
    // csv / record parsing
    MissingColumn,
    NonNumericField,
    DuplicateTeamRow,
    InvariantViolation,
    RangeViolation,
    // corpus validation
    UnpairedMatch,
    OrphanPlayerRow,
    EmptyCorpus,
    // numeric plumbing
    DimensionMismatch,
    DimChainMismatch,
    UnknownEntity,
    // training
    EmptyDataset,
    TrainingDiverged,
    // model artifacts
    CorruptArtifact,
    VersionMismatch,
    // simulation
    InvalidBracket,
    UnknownTeam,
    MissingSquad,
    NoPlayersForScoringTeam,
    // filesystem
    Io,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::NonNumericField: return "NonNumericField";
    case ErrorKind::DuplicateTeamRow: return "DuplicateTeamRow";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::RangeViolation: return "RangeViolation";
    case ErrorKind::UnpairedMatch: return "UnpairedMatch";
    case ErrorKind::OrphanPlayerRow: return "OrphanPlayerRow";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DimChainMismatch: return "DimChainMismatch";
    case ErrorKind::UnknownEntity: return "UnknownEntity";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::TrainingDiverged: return "TrainingDiverged";
    case ErrorKind::CorruptArtifact: return "CorruptArtifact";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::InvalidBracket: return "InvalidBracket";
    case ErrorKind::UnknownTeam: return "UnknownTeam";
    case ErrorKind::MissingSquad: return "MissingSquad";
    case ErrorKind::NoPlayersForScoringTeam: return "NoPlayersForScoringTeam";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

} // namespace kosim
