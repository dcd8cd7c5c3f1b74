#ifndef NLSLAB_ERRORS_HPP
#define NLSLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nlslab {

enum class Status {
  ok = 0,
  invalid_argument,
  no_convergence,
  singular_system,
  shape_mismatch,
  boundary_mass,
  resolution_exceeded,
  drift_exceeded,
  non_finite,
  not_blowing_up,
  insufficient_data,
  degenerate_centers,
  config_invalid,
  io_error,
  internal,
};

const char* status_name(Status s);

class Error : public std::runtime_error {
 public:
  Error(Status s, const std::string& what)
      : std::runtime_error(what), status_(s) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

[[noreturn]] inline void fail(Status s, const std::string& msg) {
  throw Error(s, std::string(status_name(s)) + ": " + msg);
}

}  // namespace nlslab

#endif
