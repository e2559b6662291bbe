#pragma once

#include <stdexcept>
#include <string>

namespace mmgest {

// One exception type, coded so callers (and the CLI exit-code mapping) can
// dispatch without string matching.
enum class Errc {
  // input / contract violations
  empty_cloud,
  non_positive_voxel,
  empty_collection,
  no_valid_pairs,
  empty_history,
  stream_too_short,
  segment_out_of_range,
  shape_mismatch,
  label_out_of_range,
  class_too_small,
  empty_dataset,
  empty_cell,
  length_mismatch,
  empty_pool,
  empty_list,
  parse_error,
  non_monotone_frames,
  version_mismatch,
  bad_schedule,
  bad_config,
  // data / runtime conditions
  no_cluster,
  non_finite_activation,
  trace_mismatch,
  divergence_detected,
  degenerate_class,
  oracle_mismatch,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

// Validation errors map to CLI exit 1, runtime conditions to exit 2.
inline bool is_validation_error(Errc c) {
  switch (c) {
    case Errc::no_cluster:
    case Errc::non_finite_activation:
    case Errc::trace_mismatch:
    case Errc::divergence_detected:
    case Errc::degenerate_class:
    case Errc::oracle_mismatch:
      return false;
    default:
      return true;
  }
}

}  // namespace mmgest
