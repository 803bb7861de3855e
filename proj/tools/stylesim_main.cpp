#include <string>
#include <vector>

#include "stylesim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stylesim::cli::run(args);
}
