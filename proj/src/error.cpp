#include "tca/error.hpp"

namespace tca {

const char* errc_name(errc code) {
  switch (code) {
    case errc::length_mismatch: return "LengthMismatch";
    case errc::non_finite_entry: return "NonFiniteEntry";
    case errc::invalid_mode: return "InvalidMode";
    case errc::column_mismatch: return "ColumnMismatch";
    case errc::dim_mismatch: return "DimMismatch";
    case errc::zero_tensor: return "ZeroTensor";
    case errc::degenerate_component: return "DegenerateComponent";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::rank_mismatch: return "RankMismatch";
    case errc::not_normalized: return "NotNormalized";
    case errc::non_square: return "NonSquare";
    case errc::negative_input: return "NegativeInput";
    case errc::singular_update: return "SingularUpdate";
    case errc::too_few_ranks: return "TooFewRanks";
    case errc::no_stable_rank: return "NoStableRank";
    case errc::empty_class_set: return "EmptyClassSet";
    case errc::degenerate_input: return "DegenerateInput";
    case errc::hull_too_small: return "HullTooSmall";
    case errc::too_many_tasks: return "TooManyTasks";
    case errc::bad_magic: return "BadMagic";
    case errc::unsupported_dtype: return "UnsupportedDtype";
    case errc::fortran_order_unsupported: return "FortranOrderUnsupported";
    case errc::io_error: return "IoError";
    case errc::shape_mismatch_across_snapshots: return "ShapeMismatchAcrossSnapshots";
    case errc::empty_manifest: return "EmptyManifest";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace tca
