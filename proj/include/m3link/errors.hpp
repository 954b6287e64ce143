#pragma once

#include <stdexcept>
#include <string>

namespace m3link {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrixError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct MalformedGramError : Error { using Error::Error; };
struct GroupMismatchError : Error { using Error::Error; };
struct BoundExceededError : Error { using Error::Error; };
struct DegeneratePairingError : Error { using Error::Error; };
struct GenerationFailureError : Error { using Error::Error; };
struct UnsupportedVariantError : Error { using Error::Error; };
struct UnsupportedEntryError : Error { using Error::Error; };
struct HypothesisViolationError : Error { using Error::Error; };
struct HorizonError : Error { using Error::Error; };
struct InvalidTagError : Error { using Error::Error; };
struct NotExactError : Error { using Error::Error; };     // complex fails to be exact
struct ContextMismatchError : Error { using Error::Error; };
struct SerializationError : Error { using Error::Error; };

}  // namespace m3link
