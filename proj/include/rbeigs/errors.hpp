#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rbeigs {

/// Base class for all library failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Cholesky pivot was <= 0. Carries the offending pivot index so callers
/// can decide whether a spectral shift is required.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t pivot)
      : Error("matrix not positive definite at pivot " + std::to_string(pivot)),
        pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Iterative method ran out of iterations. Carries the last residuals.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, std::size_t iterations,
                std::vector<double> residuals = {})
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations),
        residuals_(std::move(residuals)) {}
  std::size_t iterations() const noexcept { return iterations_; }
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::size_t iterations_;
  std::vector<double> residuals_;
};

/// x'Wx came out negative beyond roundoff slack: W is not PSD.
class NegativeNormSquared : public Error {
 public:
  explicit NegativeNormSquared(double value)
      : Error("negative weighted norm squared: " + std::to_string(value)) {}
};

/// Mesh resolution h does not tile the requested domain.
class IncompatibleResolution : public Error {
 public:
  using Error::Error;
};

/// A coefficient callable returned a non-finite value at a quadrature point.
class QuadratureDomainError : public Error {
 public:
  using Error::Error;
};

/// Problem has no affine parameter decomposition.
class NoAffineForm : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("zero vector") {}
};

/// P_A Phi lost rank; kappa is reported as an infinite sentinel upstream.
class RankDeficientProjection : public Error {
 public:
  using Error::Error;
};

/// The complement index set S_j^c is empty; tau is not applicable.
class EmptyComplement : public Error {
 public:
  using Error::Error;
};

/// FOM eigenvalue group has no ROM counterpart of equal size.
class GroupMismatch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rbeigs
