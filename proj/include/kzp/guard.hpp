#ifndef KZP_GUARD_HPP
#define KZP_GUARD_HPP

#include "kzp/arith.hpp"

#include <stdexcept>
#include <string>

namespace kzp {

/// Resource knobs threaded through the construction pipelines.
/// `max_terms` bounds the stored term count of any single constructed
/// polynomial object (a vector-valued solution counts the total across its
/// components). `jobs` is a pure throughput knob; results are bit-identical
/// for any value.
struct Limits {
    u64 max_terms = 10'000'000;
    int jobs = 0;   // 0 = hardware concurrency

    int effective_jobs() const;
};

class SizeGuardError : public std::runtime_error {
public:
    SizeGuardError(u64 estimate, u64 limit, const std::string& what_op)
        : std::runtime_error(what_op + ": estimated " + std::to_string(estimate)
                             + " terms exceeds the size guard of " + std::to_string(limit)
                             + " (raise max_terms to proceed)"),
          estimate(estimate), limit(limit) {}

    u64 estimate;
    u64 limit;
};

} // namespace kzp

#endif
