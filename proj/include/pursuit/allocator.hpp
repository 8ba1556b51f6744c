#pragma once

namespace pursuit {

/// Keeps freed minibatch-sized blocks in the heap instead of returning them to
/// the kernel. Training allocates and frees the same few hundred KB every
/// update; without this glibc trims and refaults those pages each time.
/// No-op on other allocators. Call once at program start.
void retain_freed_memory();

}  // namespace pursuit
