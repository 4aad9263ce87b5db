#include <string>
#include <vector>

#include "cmasao/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cmasao::cli_main(args);
}
