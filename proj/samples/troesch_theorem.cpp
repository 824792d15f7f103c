// Slice cohomology of B_{3n}(1)(k^{1|1}) for n = 1, 2, 3, next to the dimensions the theorem predicts.

#include <iostream>

#include "supertroesch/supertroesch.hpp"

using namespace supertroesch;

int main() {
    const int p = 3, r = 1;
    const SuperSpace u = k_space(1, 1);
    for (int n = 1; n <= 3; ++n) {
        const TheoremReport rep = verify_theorem_B(p, n, r, u);
        std::cout << "B_" << 3 * n << "(1)(k^{1|1}): " << (rep.ok() ? "matches" : "MISMATCH") << ", " << rep.decomposition.blocks.size()
                  << " kinds of cyclic block, normal = " << (rep.normal ? "yes" : "no") << "\n";
        for (const auto& [deg, d] : rep.table.row(1)) std::cout << "  H^" << deg << " = (" << d.first << "|" << d.second << ")\n";
        for (const auto& [deg, d] : theorem_dims(p, n, r, u)) std::cout << "  predicted H^" << deg << " = (" << d.first << "|" << d.second << ")\n";
    }
    return 0;
}
