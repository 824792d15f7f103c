// Ext^s between the parity pieces of the first Frobenius twist at p = 3, with class names.

#include <iostream>

#include "supertroesch/supertroesch.hpp"

using namespace supertroesch;

int main() {
    const int p = 3, r = 1, max_degree = 9;
    for (int x : {0, 1})
        for (int y : {0, 1}) {
            const ExtTable t = ext_table(p, r, max_degree, x, y);
            std::cout << "Ext^*(I_" << x << ", I_" << y << "):";
            for (auto [s, d] : t.dims) std::cout << " " << d;
            std::cout << "\n";
            for (const auto& c : t.classes) std::cout << "  s=" << c.degree << "  " << c.name << "\n";
        }
    const RingReport ring = ring_relations(p, r);
    for (const auto& rel : ring.relations) std::cout << rel.line << (rel.holds ? "" : "  [fails]") << "\n";
    return ring.ok() ? 0 : 1;
}
