// Exception hierarchy shared by all lingdist modules. Every error thrown by
// the library derives from lingdist::Error so callers can catch one type at
// the boundary (the CLI maps them to exit code 2).
#pragma once

#include <stdexcept>
#include <string>

namespace lingdist {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// geo
struct EmptyInput : Error {
  using Error::Error;
};
struct AllZeroCounts : Error {
  using Error::Error;
};
struct InvalidCoordinate : Error {
  using Error::Error;
};
struct InvalidDistribution : Error {
  using Error::Error;
};

// genetic
struct CycleDetected : Error {
  using Error::Error;
};
struct EmptyGraph : Error {
  using Error::Error;
};
struct NoEligibleNegatives : Error {
  using Error::Error;
};
struct PointOutsideBall : Error {
  using Error::Error;
};
struct OffManifold : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct TooFewNodes : Error {
  using Error::Error;
};
struct DegenerateTable : Error {
  using Error::Error;
};
struct UnknownNode : Error {
  using Error::Error;
};
struct NoAncestorPairs : Error {
  using Error::Error;
};

// typology
struct UnknownFeature : Error {
  using Error::Error;
};
struct UnknownLanguage : Error {
  using Error::Error;
};
struct InsufficientData : Error {
  using Error::Error;
};
struct InvalidFeatureMatrix : Error {
  using Error::Error;
};
struct ZeroVector : Error {
  using Error::Error;
};

// composite
struct MissingModality : Error {
  using Error::Error;
};
struct RankDeficient : Error {
  using Error::Error;
};
struct TooFewRows : Error {
  using Error::Error;
};

// evaluation
struct NoCandidates : Error {
  using Error::Error;
};
struct MissingScore : Error {
  using Error::Error;
};
struct NonPositiveMax : Error {
  using Error::Error;
};

// io
struct ParseError : Error {
  using Error::Error;
};
struct RaggedRows : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace lingdist
