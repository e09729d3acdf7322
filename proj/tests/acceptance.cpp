#include <cstdio>

#include "dyadica/verify.hpp"

int main() {
    auto summary = dyadica::verify_all(1);
    for (const auto& c : summary.results)
        std::printf("%2d %-28s %s (%.1fs) %s\n", c.id, c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.seconds, c.detail.c_str());
    return summary.pass ? 0 : 1;
}
