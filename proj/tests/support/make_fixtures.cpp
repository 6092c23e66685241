// Regenerates the bundled fixture set: ws4a_make_fixtures <directory>

#include <iostream>

#include "synthetic.hpp"
#include "ws4a/error.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: " << argv[0] << " <directory>\n";
        return 2;
    }
    try {
        ws4a::testing::write_fixture_bundle(argv[1]);
    } catch (const std::exception& e) {
        std::cerr << "ws4a_make_fixtures: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
