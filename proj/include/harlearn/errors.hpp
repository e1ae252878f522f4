#pragma once

#include <stdexcept>
#include <string>

namespace harlearn {

/// Base for every error this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// dataset
struct MalformedRow : Error { using Error::Error; };
struct UnknownActivity : Error { using Error::Error; };
struct MissingSubject : Error { using Error::Error; };
struct InsufficientClassData : Error { using Error::Error; };
struct BadSampleRate : Error { using Error::Error; };

// features
struct RecordingTooShort : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct NonFiniteFeature : Error { using Error::Error; };

// classifiers
struct DegenerateClass : Error { using Error::Error; };
struct SingularCovariance : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// ensemble / personalization
struct EmptyEnsemble : Error { using Error::Error; };
struct EmptyChunk : Error { using Error::Error; };

// harness
struct MissingClassInTest : Error { using Error::Error; };
struct TestLeakage : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace harlearn
