#ifndef LIVSIC_ERRORS_HPP
#define LIVSIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace livsic {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define LIVSIC_DEFINE_ERROR(Name)                                   \
    struct Name : Error {                                           \
        explicit Name(const std::string& what) : Error(what) {}     \
    }

LIVSIC_DEFINE_ERROR(DimMismatch);
LIVSIC_DEFINE_ERROR(NonFinite);
LIVSIC_DEFINE_ERROR(TooFarApart);
LIVSIC_DEFINE_ERROR(InadmissibleSplice);
LIVSIC_DEFINE_ERROR(NotCloseEnough);
LIVSIC_DEFINE_ERROR(SingularClosing);
LIVSIC_DEFINE_ERROR(PeriodBudgetExceeded);
LIVSIC_DEFINE_ERROR(NotMixing);
LIVSIC_DEFINE_ERROR(NoConnector);
LIVSIC_DEFINE_ERROR(InadmissibleWord);
LIVSIC_DEFINE_ERROR(TailNotNegligible);
LIVSIC_DEFINE_ERROR(NotOnStableLeaf);
LIVSIC_DEFINE_ERROR(NotOnUnstableLeaf);
LIVSIC_DEFINE_ERROR(NoConvergence);
LIVSIC_DEFINE_ERROR(ClosingFailed);
LIVSIC_DEFINE_ERROR(ProfileViolated);
LIVSIC_DEFINE_ERROR(OrbitNotDense);
LIVSIC_DEFINE_ERROR(ObstructionFailed);
LIVSIC_DEFINE_ERROR(BracketFailed);
LIVSIC_DEFINE_ERROR(InsufficientSpread);
LIVSIC_DEFINE_ERROR(ConfigError);

#undef LIVSIC_DEFINE_ERROR

} // namespace livsic

#endif
