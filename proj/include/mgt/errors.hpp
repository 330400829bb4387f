#pragma once

#include <stdexcept>
#include <string>

namespace mgt {

// Base for everything thrown by the library. The `code` string is stable and
// machine-readable; CLI reports carry it verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define MGT_ERROR(NAME)                                          \
  class NAME : public Error {                                    \
   public:                                                       \
    explicit NAME(const std::string& what) : Error(#NAME, what) {} \
  }

MGT_ERROR(MixedGroups);
MGT_ERROR(SubgroupViolation);
MGT_ERROR(BallTooLarge);

MGT_ERROR(NonFinitaryAtPoint);
MGT_ERROR(NoLampAction);
MGT_ERROR(IncomparableBackends);

MGT_ERROR(GroupMismatch);
MGT_ERROR(NotMeasurePreserving);
MGT_ERROR(DefectUnsupported);
MGT_ERROR(ChainMismatch);

MGT_ERROR(EmptyReduction);
MGT_ERROR(SizeCap);
MGT_ERROR(ActionInvalid);
MGT_ERROR(NotFreelyIndependent);
MGT_ERROR(NotHomomorphism);
MGT_ERROR(BadPartition);
MGT_ERROR(BadBisection);

MGT_ERROR(IndexMismatch);
MGT_ERROR(TruncationExceeded);
MGT_ERROR(EdgeNotOnGeodesic);

MGT_ERROR(ConfigInvalid);
MGT_ERROR(ComputeError);

#undef MGT_ERROR

}  // namespace mgt
