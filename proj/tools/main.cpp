#include "sksv_cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return sksv::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}
