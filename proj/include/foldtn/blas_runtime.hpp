#pragma once

namespace foldtn {

/// OpenBLAS 0.3.20 picks a Cooper Lake dgemm kernel that returns wrong products
/// for large operands (and, through dgemm, non-orthonormal zgesdd vectors).
/// Call first thing in main: if that kernel was selected and the user has not
/// set OPENBLAS_CORETYPE, re-executes the process with the SkylakeX kernel.
/// A no-op for other BLAS implementations and CPUs.
void select_safe_blas_kernel(char** argv);

}  // namespace foldtn
