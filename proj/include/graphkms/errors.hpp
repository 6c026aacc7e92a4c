#pragma once

#include <stdexcept>
#include <string>

namespace graphkms {

/** Base class of every error raised by the library. */
class Error : public std::runtime_error
{
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define GRAPHKMS_DEFINE_ERROR(Name)                                   \
    class Name : public Error                                         \
    {                                                                 \
    public:                                                           \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// measure-core
GRAPHKMS_DEFINE_ERROR(MemberNotInSpace);
GRAPHKMS_DEFINE_ERROR(CoverIncomplete);
GRAPHKMS_DEFINE_ERROR(NotLocallyInjective);
GRAPHKMS_DEFINE_ERROR(SpaceMismatch);

/** Gluing failed; carries the witnessing point and the offending piece pair. */
class IncompatibleSections : public Error
{
public:
    IncompatibleSections(const std::string& point, std::size_t first, std::size_t second)
        : Error("IncompatibleSections: local measures " + std::to_string(first) + " and " +
                std::to_string(second) + " disagree at point " + point),
          point_(point), first_(first), second_(second)
    {
    }

    const std::string& point() const noexcept { return point_; }
    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

private:
    std::string point_;
    std::size_t first_;
    std::size_t second_;
};

// graph-core
GRAPHKMS_DEFINE_ERROR(IndexOutOfRange);
GRAPHKMS_DEFINE_ERROR(NotComposable);
GRAPHKMS_DEFINE_ERROR(UnknownIdentifier);
GRAPHKMS_DEFINE_ERROR(WindowRuleMissing);
GRAPHKMS_DEFINE_ERROR(NonPrimitiveCycle);
GRAPHKMS_DEFINE_ERROR(NotACycle);
GRAPHKMS_DEFINE_ERROR(NotAnExit);

// boundary-path
GRAPHKMS_DEFINE_ERROR(DepthMismatch);
GRAPHKMS_DEFINE_ERROR(ShiftOfVertex);
GRAPHKMS_DEFINE_ERROR(MixedLengthBase);

// kms-solver
GRAPHKMS_DEFINE_ERROR(WindowTooSmall);
GRAPHKMS_DEFINE_ERROR(ExactModeUnavailable);
GRAPHKMS_DEFINE_ERROR(NotSubInvariant);
GRAPHKMS_DEFINE_ERROR(ConsistencyFailure);
GRAPHKMS_DEFINE_ERROR(DepthExceeded);
GRAPHKMS_DEFINE_ERROR(InvalidParameter);

// io
GRAPHKMS_DEFINE_ERROR(SchemaError);

#undef GRAPHKMS_DEFINE_ERROR

} // namespace graphkms
