#pragma once

#include <stdexcept>
#include <string>

namespace leakforge {

inline constexpr const char* kToolVersion = "0.1.0";

/// Fatal configuration or input-contract problem; maps to exit code 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Corrupt or inconsistent data discovered mid-pipeline; maps to exit code 1.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A statistical test was handed a sample it is undefined on
/// (constant values, all-zero differences, ...).
struct degenerate_sample_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace leakforge
