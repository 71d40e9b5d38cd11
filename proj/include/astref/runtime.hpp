#pragma once

namespace astref {

/// Keeps freed matrix buffers in the heap instead of returning them to the
/// kernel; training allocates and frees the same large blocks every batch.
void tune_allocator();

} // namespace astref
