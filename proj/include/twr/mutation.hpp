// Opt-in fault injection for self-test sanity checks.
//
// Setting the environment variable TWR_MUTATION to one of the names below
// deliberately miswires a specific quantity so that the validation battery
// can prove it would catch the bug.  Production runs leave it unset.
#pragma once

namespace twr {

enum class Mutation {
  none,
  // Drop the cross-interference term from the relayed-branch SINR
  // denominator in the Monte Carlo channel model.
  drop_interference_term,
  // Swap which coefficient pair couples to which hop gain inside the
  // closed-form power-split optimizer.
  swap_coefficient_roles,
};

// Parsed from TWR_MUTATION once per process; unknown names abort startup.
Mutation active_mutation();
const char* mutation_name(Mutation m);

}  // namespace twr
