#pragma once

#include <stdexcept>
#include <string>

namespace nsk {

/// Argument outside the mathematical domain of a function (rho <= 0, k >= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Psi^m lost its double-well structure: no common tangent could be found.
class NoBitangentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Korteweg parameter outside the range where a cnoidal wave of period 1 exists.
class NoCnoidalWaveError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative solver stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Failures raised while advancing the flow solver.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, long step)
      : std::runtime_error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class CflError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class VacuumError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class BlowUpError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class CharacteristicCrossingError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// Malformed configuration or input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nsk
