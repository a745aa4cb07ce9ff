#include <string>
#include <vector>

#include "hsaw/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return hsaw::run_cli(std::move(args));
}
