#include "pursuit/allocator.hpp"

#include <cstdlib>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace pursuit {

void retain_freed_memory() {
#if defined(__GLIBC__)
  constexpr int kThreshold = 16 << 20;
  mallopt(M_MMAP_THRESHOLD, kThreshold);
  mallopt(M_TRIM_THRESHOLD, kThreshold);
  mallopt(M_TOP_PAD, kThreshold);
#endif
}

}  // namespace pursuit
