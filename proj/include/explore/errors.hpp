#pragma once

#include <stdexcept>
#include <string>

namespace explore {

// Root of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define EXPLORE_DEFINE_ERROR(Name)                \
    class Name : public Error {                   \
    public:                                       \
        explicit Name(const std::string& what)    \
            : Error(std::string(#Name ": ") + what) {} \
    }

EXPLORE_DEFINE_ERROR(OutOfBounds);
EXPLORE_DEFINE_ERROR(ParseError);
EXPLORE_DEFINE_ERROR(ValueError);
EXPLORE_DEFINE_ERROR(IoError);
EXPLORE_DEFINE_ERROR(InfeasibleSpec);
EXPLORE_DEFINE_ERROR(UnknownName);
EXPLORE_DEFINE_ERROR(InvalidPose);
EXPLORE_DEFINE_ERROR(DimensionMismatch);
EXPLORE_DEFINE_ERROR(ConsistencyError);
EXPLORE_DEFINE_ERROR(NoPath);
EXPLORE_DEFINE_ERROR(InvalidStart);
EXPLORE_DEFINE_ERROR(NoFrontier);
EXPLORE_DEFINE_ERROR(InvalidRatio);
EXPLORE_DEFINE_ERROR(EmptyInput);
EXPLORE_DEFINE_ERROR(InvalidInput);
EXPLORE_DEFINE_ERROR(MalformedLog);
EXPLORE_DEFINE_ERROR(InvalidConfig);
EXPLORE_DEFINE_ERROR(NotReset);
EXPLORE_DEFINE_ERROR(StrategyError);

#undef EXPLORE_DEFINE_ERROR

}  // namespace explore
