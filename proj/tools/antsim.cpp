#include <string>
#include <vector>

#include "antcolony/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return antcolony::cli::main_entry(args);
}
