#pragma once

#include <exception>
#include <string>
#include <utility>

#include "ilp/errors.hpp"

namespace ilp::cli {

enum Exit { kOk = 0, kUsage = 2, kFindings = 3, kTimeout = 4, kBreach = 5 };

/// Exit status and diagnostic for an exception escaping a subcommand.
inline std::pair<int, std::string> describe_failure(std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const ParseError& x) {
        return {kUsage, x.what()};
    } catch (const InvariantBreach& x) {
        return {kBreach, std::string("invariant breach: ") + x.what()};
    } catch (const std::exception& x) {
        return {kBreach, std::string("error: ") + x.what()};
    } catch (...) {
        return {kBreach, "error: unknown exception"};
    }
}

}  // namespace ilp::cli
