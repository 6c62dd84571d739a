#ifndef CODESPEC_VERIFY_HPP
#define CODESPEC_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "codespec/error.hpp"

namespace codespec {

struct VerifyCheck {
  enum class Status { kPass, kFail, kSkip };
  std::string name;
  bool exact = true;  // exact identity vs statistical check
  Status status = Status::kSkip;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t budget = kDefaultBudget;
  std::uint64_t seed = 1;
  // Test hook: corrupts one alpha table before comparison, to exercise
  // the failure path end to end.
  bool inject_alpha_fault = false;
};

// Suites: "props" (spectrum and alpha identities), "encoder" (the
// encoder laws, quantizer fidelity, rho), "analysis" (sample
// certification, the distance trend, GV, sparse and systematic rate
// obstructions).
std::vector<VerifyCheck> verify_suite(const std::string& suite, const VerifyOptions& options);

// True when every exact check that ran passed (skips do not fail).
bool verify_all_passed(const std::vector<VerifyCheck>& checks);

}  // namespace codespec

#endif
