#pragma once

#include <stdexcept>
#include <string>

namespace tca {

enum class errc {
  length_mismatch,
  non_finite_entry,
  invalid_mode,
  column_mismatch,
  dim_mismatch,
  zero_tensor,
  degenerate_component,
  index_out_of_range,
  rank_mismatch,
  not_normalized,
  non_square,
  negative_input,
  singular_update,
  too_few_ranks,
  no_stable_rank,
  empty_class_set,
  degenerate_input,
  hull_too_small,
  too_many_tasks,
  bad_magic,
  unsupported_dtype,
  fortran_order_unsupported,
  io_error,
  shape_mismatch_across_snapshots,
  empty_manifest,
  invalid_spec,
  invalid_argument,
};

const char* errc_name(errc code);

/// Library-wide exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace tca
