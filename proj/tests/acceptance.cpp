#include <cstdlib>
#include <iostream>
#include <thread>

#include "hfl/acceptance.hpp"

int main() {
    const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto reports = hfl::acc::verify_all(jobs);
    bool ok = true;
    for (const auto& r : reports) {
        std::cout << r.line() << " [" << r.seconds << " s]\n";
        ok = ok && r.pass();
    }
    return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
