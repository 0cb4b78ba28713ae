#pragma once

// Trial-indexed loops. The parallel form splits the index range across
// OpenMP threads; the serial form is the reference used by tests. Bodies
// must write only to slots owned by their index.

#include <cstdint>

#include <omp.h>

namespace boolrr {

enum class Exec { kSerial, kParallel };

template <class Body>
void for_each_index_serial(std::int64_t count, Body&& body) {
  for (std::int64_t i = 0; i < count; ++i) body(i);
}

template <class Body>
void for_each_index_parallel(std::int64_t count, Body&& body) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) body(i);
}

template <class Body>
void for_each_index(Exec exec, std::int64_t count, Body&& body) {
  if (exec == Exec::kSerial) {
    for_each_index_serial(count, body);
  } else {
    for_each_index_parallel(count, body);
  }
}

inline int worker_count() { return omp_get_max_threads(); }

}  // namespace boolrr
