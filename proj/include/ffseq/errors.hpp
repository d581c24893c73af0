#pragma once

#include <stdexcept>
#include <string>

namespace ffseq {

// Configuration / input-file problems. CLI exit code 1.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Violations of mathematical preconditions or invalid domain inputs. CLI exit code 2.
class domain_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requests that exceed hard capacity guards (e.g. factorial enumeration). CLI exit code 3.
class capacity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class missing_polarization_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class dimension_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class format_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class invalid_permutation_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class degenerate_direction_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class rank_deficient_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class xpr_precondition_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class degenerate_amplitude_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class singular_fim_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class undefined_estimate_error : public domain_error {
 public:
  using domain_error::domain_error;
};

}  // namespace ffseq
