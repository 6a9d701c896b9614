#pragma once

#include <stdexcept>
#include <string>

namespace ozbias {

// Base class for all domain/data errors. The CLI maps these to exit code 2.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define OZBIAS_ERROR(NAME)                                                   \
  struct NAME : Error {                                                      \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {}       \
  }

OZBIAS_ERROR(OutOfDomain);
OZBIAS_ERROR(EmptyInput);
OZBIAS_ERROR(ChannelMismatch);
OZBIAS_ERROR(ChannelCountMismatch);
OZBIAS_ERROR(ShapeMismatch);
OZBIAS_ERROR(EmptyCell);
OZBIAS_ERROR(DateMismatch);
OZBIAS_ERROR(EmptyEval);
OZBIAS_ERROR(AllMasked);
OZBIAS_ERROR(OddSpatialDims);
OZBIAS_ERROR(EmptyDataset);
OZBIAS_ERROR(DimensionMismatch);
OZBIAS_ERROR(NoValidPairs);
OZBIAS_ERROR(MismatchedEvalSets);
OZBIAS_ERROR(IoError);
OZBIAS_ERROR(DataError);

#undef OZBIAS_ERROR

}  // namespace ozbias
