#ifndef MOE_ERRORS_HPP
#define MOE_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace moe {

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Factorization failed after the full jitter escalation schedule.
struct numerical_error : std::runtime_error {
    std::vector<double> jitter_attempts;
    numerical_error(const std::string& msg, std::vector<double> attempts = {})
        : std::runtime_error(msg), jitter_attempts(std::move(attempts)) {}
};

struct degenerate_weights_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace moe

#endif
