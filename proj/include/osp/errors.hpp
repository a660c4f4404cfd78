#pragma once

#include <stdexcept>

namespace osp {

/// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An index fell outside the valid range of a series.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A series (or derived sequence) is too short for the requested operation.
class TooShortError : public Error {
public:
    using Error::Error;
};

/// A model/config combination is invalid (e.g. seasonal model on frequency-1 data).
class InvalidSpecError : public Error {
public:
    using Error::Error;
};

/// A metric is undefined for the given inputs (constant scaling series, zero actual).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

/// A series cannot be labeled or forecast under the given segmentation geometry.
class IneligibleSeriesError : public Error {
public:
    using Error::Error;
};

/// No series in a collection survived eligibility screening.
class EmptyTrainingSetError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; the message carries row/column position.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A model file failed schema, version, or feature-order validation.
class ModelIoError : public Error {
public:
    using Error::Error;
};

/// Every candidate forecast for a series failed.
class ForecastError : public Error {
public:
    using Error::Error;
};

} // namespace osp
