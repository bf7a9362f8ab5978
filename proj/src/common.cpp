#include "semifl/common.hpp"

namespace semifl {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnservableDevice: return "UnservableDevice";
    case ErrorCode::InfeasibleUpload: return "InfeasibleUpload";
    case ErrorCode::InfeasibleMse: return "InfeasibleMse";
    case ErrorCode::PowerBudgetExceeded: return "PowerBudgetExceeded";
    case ErrorCode::LatencyInfeasible: return "LatencyInfeasible";
    case ErrorCode::GapInfeasible: return "GapInfeasible";
    case ErrorCode::FrequencyCapExceeded: return "FrequencyCapExceeded";
    case ErrorCode::LpInfeasible: return "LpInfeasible";
    case ErrorCode::NoFeasibleStart: return "NoFeasibleStart";
    case ErrorCode::InnerSolverFailure: return "InnerSolverFailure";
    case ErrorCode::NonContractive: return "NonContractive";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace semifl
