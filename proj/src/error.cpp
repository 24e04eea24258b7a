#include "renoise/error.hpp"
#include "renoise/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace renoise {

const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::NonFiniteSample: return "NonFiniteSample";
    case ErrorKind::DomainEscape: return "DomainEscape";
    case ErrorKind::RangeEscape: return "RangeEscape";
    case ErrorKind::NotRenormalizable: return "NotRenormalizable";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::CrossCheckFailed: return "CrossCheckFailed";
    case ErrorKind::NonMonotone: return "NonMonotone";
    case ErrorKind::BracketLost: return "BracketLost";
    case ErrorKind::PositivityViolated: return "PositivityViolated";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NegativeEigenfunction: return "NegativeEigenfunction";
    case ErrorKind::ReconstructionMismatch: return "ReconstructionMismatch";
    case ErrorKind::AllSamplesGuarded: return "AllSamplesGuarded";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::MissingRho: return "MissingRho";
    case ErrorKind::MissingManifest: return "MissingManifest";
    case ErrorKind::Config: return "ConfigError";
    }
    return "Unknown";
}

int worker_count()
{
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("RENOISE_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap >= 1 && cap < n) n = cap;
        } catch (...) {
        }
    }
    return n < 1 ? 1 : n;
}

} // namespace renoise
