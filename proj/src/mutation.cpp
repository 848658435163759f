#include "twr/mutation.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace twr {

const char* mutation_name(Mutation m) {
  switch (m) {
    case Mutation::drop_interference_term: return "drop_interference_term";
    case Mutation::swap_coefficient_roles: return "swap_coefficient_roles";
    default: return "none";
  }
}

Mutation active_mutation() {
  static const Mutation m = [] {
    const char* env = std::getenv("TWR_MUTATION");
    if (env == nullptr || *env == '\0') return Mutation::none;
    if (std::strcmp(env, "drop_interference_term") == 0) return Mutation::drop_interference_term;
    if (std::strcmp(env, "swap_coefficient_roles") == 0) return Mutation::swap_coefficient_roles;
    std::fprintf(stderr, "unknown TWR_MUTATION value: %s\n", env);
    std::abort();
  }();
  return m;
}

}  // namespace twr
