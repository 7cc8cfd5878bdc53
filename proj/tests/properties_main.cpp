// Runs the randomized invariant suite and fails the process when any
// property reports violations.

#include <chrono>
#include <cstdio>

#include "property_suite.hpp"

int main() {
    const auto start = std::chrono::steady_clock::now();
    std::printf("randomized invariant suite (1000 cases per property, fixed seed)\n");
    const propsuite::SuiteResult result = propsuite::run_all();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d properties, %d failed, %ld total violations, %.1f s\n",
                result.properties, result.failed_properties, result.violations, elapsed);
    return result.failed_properties == 0 ? 0 : 1;
}
