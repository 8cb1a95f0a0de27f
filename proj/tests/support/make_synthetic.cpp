#include <cstdlib>
#include <iostream>
#include <string>

#include "synthetic.hpp"

// make-synthetic <out.csv> [rows] [seed] [raw|quantified]
int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: make-synthetic <out.csv> [rows] [seed] [raw|quantified]\n";
        return 2;
    }
    const std::size_t n = argc > 2 ? std::stoul(argv[2]) : 600;
    const std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 7;
    const std::string mode = argc > 4 ? argv[4] : "quantified";
    auto raw = pleiades::testing::synthetic_raw(n, seed);
    pleiades::testing::write_file(mode == "raw" ? raw : pleiades::testing::to_quantified(raw), argv[1]);
    return 0;
}
