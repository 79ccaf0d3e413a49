/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_TESTS_FIXTURES_HPP
#define QSNOOP_TESTS_FIXTURES_HPP

#include "qsnoop/schedule.hpp"

namespace qsnoop::fixtures {

/// Shipped 4-qubit two-local-style schedule whose oracle trace at
/// tb = 2000 dt gives bucket totals [1, 2, 2, 1].
inline TimedSchedule fig6_schedule() {
  Circuit c;
  c.n_qubits = 4;
  c.name = "twolocal_fig6";
  c.family = "twolocal";
  c.add(Gate::cx(0, 1)); // @0, bucket 0
  c.add(Gate::delay(1820, 0));
  c.add(Gate::delay(1820, 1));
  c.add(Gate::cx(0, 1)); // @2000, bucket 1
  c.add(Gate::delay(2320, 2));
  c.add(Gate::delay(2320, 3));
  c.add(Gate::cx(2, 3)); // @2320, bucket 1
  c.add(Gate::delay(1920, 0));
  c.add(Gate::delay(1920, 1));
  c.add(Gate::cx(0, 1)); // @4100, bucket 2
  c.add(Gate::delay(2000, 2));
  c.add(Gate::delay(2000, 3));
  c.add(Gate::cx(2, 3)); // @4500, bucket 2
  c.add(Gate::delay(1900, 0));
  c.add(Gate::delay(1900, 1));
  c.add(Gate::cx(0, 1)); // @6180, bucket 3
  return schedule(c, {}, SchedulingMethod::Asap);
}

} // namespace qsnoop::fixtures

#endif
