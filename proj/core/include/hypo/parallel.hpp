#pragma once

#include <cstddef>
#include <functional>

namespace hypo {

/// Caps the number of worker threads used by library loops. 0 restores the
/// default (hardware concurrency).
void setThreadCount(unsigned count);
unsigned threadCount();

/// Runs body(i) for i in [begin, end) on up to threadCount() threads using a
/// static contiguous partition. Bodies must only write to disjoint state, so
/// results do not depend on the schedule.
void parallelFor(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace hypo
