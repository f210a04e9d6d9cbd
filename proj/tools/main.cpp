#include "liqspread/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return liqspread::run_cli(argc, argv, std::cout, std::cerr);
}
