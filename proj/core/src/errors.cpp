#include "adaptivefog/errors.hpp"

namespace adaptivefog {

int exit_code_for(const Error& error) noexcept {
  if (dynamic_cast<const SolverError*>(&error) != nullptr) return 4;
  if (dynamic_cast<const ConfigError*>(&error) != nullptr ||
      dynamic_cast<const UsageError*>(&error) != nullptr ||
      dynamic_cast<const SpecError*>(&error) != nullptr) {
    return 2;
  }
  return 3;
}

}  // namespace adaptivefog
