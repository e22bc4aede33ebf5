#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace invscat {

// Argument outside the documented range of a special function or solver.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Argument outside the domain where a quantity is defined at all.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double radius_reached)
      : std::runtime_error(what), radius_reached(radius_reached) {}
  double radius_reached;
};

// A least-squares fit whose residual is too far above the best attainable one.
class RejectedRunError : public std::runtime_error {
 public:
  RejectedRunError(const std::string& what, double d_estimate, double achieved)
      : std::runtime_error(what), d_estimate(d_estimate), achieved(achieved) {}
  double d_estimate;
  double achieved;
};

// The Newton-Sabatier kernel equation is numerically singular at these radii.
class NonSolvableError : public std::runtime_error {
 public:
  NonSolvableError(const std::string& what, std::vector<double> radii)
      : std::runtime_error(what), radii(std::move(radii)) {}
  std::vector<double> radii;
};

}  // namespace invscat
