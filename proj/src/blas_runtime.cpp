#include "foldtn/blas_runtime.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <strings.h>
#include <unistd.h>

extern "C" char* openblas_get_corename() __attribute__((weak));

namespace foldtn {

void select_safe_blas_kernel(char** argv) {
  if (openblas_get_corename == nullptr || std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  const char* core = openblas_get_corename();
  if (core == nullptr || strcasecmp(core, "cooperlake") != 0) return;
  setenv("OPENBLAS_CORETYPE", "SkylakeX", 1);
  execv("/proc/self/exe", argv);
  std::fprintf(stderr, "warning: could not re-exec with OPENBLAS_CORETYPE=SkylakeX (%s); large products may be wrong\n",
               std::strerror(errno));
}

}  // namespace foldtn
