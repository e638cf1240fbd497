#pragma once

#include "hbl/types.hpp"

#include <stdexcept>
#include <string>

namespace hbl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Raised by the normal-form transform when q_v at the equilibrium is singular.
class NotTransformable : public Error {
 public:
  using Error::Error;
};

class NotSemisimple : public Error {
 public:
  NotSemisimple(const std::string& what, cplx eigenvalue) : Error(what), eigenvalue_(eigenvalue) {}
  cplx eigenvalue() const { return eigenvalue_; }

 private:
  cplx eigenvalue_;
};

class NotHurwitz : public Error {
 public:
  NotHurwitz(const std::string& what, cplx eigenvalue) : Error(what), eigenvalue_(eigenvalue) {}
  cplx eigenvalue() const { return eigenvalue_; }

 private:
  cplx eigenvalue_;
};

// A dissipation condition is violated at the point a construction needed it.
class ConditionViolation : public Error {
 public:
  ConditionViolation(const std::string& what, std::string condition, Vec point, cplx eigenvalue)
      : Error(what), condition_(std::move(condition)), point_(std::move(point)), eigenvalue_(eigenvalue) {}
  const std::string& condition() const { return condition_; }
  const Vec& point() const { return point_; }
  cplx eigenvalue() const { return eigenvalue_; }

 private:
  std::string condition_;
  Vec point_;
  cplx eigenvalue_;
};

class RegimeBoundary : public Error {
 public:
  using Error::Error;
};

class CrossingDetected : public Error {
 public:
  CrossingDetected(const std::string& what, double location) : Error(what), location_(location) {}
  double location() const { return location_; }

 private:
  double location_;
};

class CflViolation : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

}  // namespace hbl
