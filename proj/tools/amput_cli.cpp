#include <iostream>

#include "amput/cli.hpp"

int main(int argc, char** argv) {
    return amput::cli::main_entry(argc, argv, std::cout, std::cerr);
}
